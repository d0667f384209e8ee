#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "matrixgt/codec.hpp"
#include "matrixgt/error.hpp"
#include "matrixgt/scene.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace matrixgt;
using test::unit_cube;

namespace {
CameraModel camera_f100() {
  CameraModel c;
  c.fx = c.fy = 100;
  return c;
}

ScenarioConfig tiny_config(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.frames = 20;
  cfg.camera = test::small_camera(64, 64, 60.0);
  return cfg;
}
}  // namespace

TEST_CASE("project_point") {
  const CameraModel cam = camera_f100();
  for (double z : {0.5, 3.0, 250.0}) {
    const auto p = project_point(cam, {0, 0, z});
    CHECK(p.u == cam.cx);
    CHECK(p.v == cam.cy);
    CHECK(p.depth == z);
  }
  const auto q = project_point(cam, {0.5, 0, 9.5});
  CHECK(q.u == doctest::Approx(325.263157894736842).epsilon(1e-14));
  CHECK(q.v == 240.0);
  CHECK_THROWS_AS(project_point(cam, {0, 0, -1}), BehindCameraError);
  CHECK_THROWS_AS(project_point(cam, {0, 0, 0}), BehindCameraError);
}

TEST_CASE("coarse box of an on-axis unit cube") {
  const CameraModel cam = camera_f100();
  const Box2 b = coarse_box(cam, unit_cube(2, 10.0));
  CHECK(b.left == doctest::Approx(314.7368421052632).epsilon(1e-12));
  CHECK(b.top == doctest::Approx(234.7368421052632).epsilon(1e-12));
  CHECK(b.right == doctest::Approx(325.2631578947368).epsilon(1e-12));
  CHECK(b.bottom == doctest::Approx(245.2631578947368).epsilon(1e-12));
  CHECK((b.left + b.right) / 2 == doctest::Approx(cam.cx));
  CHECK((b.top + b.bottom) / 2 == doctest::Approx(cam.cy));
}

TEST_CASE("coarse box is not clipped") {
  CameraModel cam;
  const Box2 b = coarse_box(cam, unit_cube(2, 5.0, 3.0));
  CHECK(b.right > cam.width);
  CHECK_THROWS_AS(coarse_box(cam, unit_cube(2, 0.3)), BehindCameraError);
}

TEST_CASE("inflate box grows about the center") {
  const Box2 b = inflate_box({10, 20, 30, 60}, 0.10);
  CHECK(b.left == doctest::Approx(9));
  CHECK(b.right == doctest::Approx(31));
  CHECK(b.top == doctest::Approx(18));
  CHECK(b.bottom == doctest::Approx(62));
}

TEST_CASE("cuboid corners follow yaw") {
  const SceneObject o = test::cuboid(2, ObjectClass::Vehicle, {0, 0, 10}, {4, 2, 1}, M_PI / 2);
  double min_z = 1e9, max_z = -1e9, min_x = 1e9, max_x = -1e9;
  for (const auto& c : cuboid_corners(o)) {
    min_z = std::min(min_z, c.z);
    max_z = std::max(max_z, c.z);
    min_x = std::min(min_x, c.x);
    max_x = std::max(max_x, c.x);
  }
  // length along depth after a quarter turn
  CHECK(max_z - min_z == doctest::Approx(4.0));
  CHECK(max_x - min_x == doctest::Approx(2.0));
}

TEST_CASE("render a single on-axis cube") {
  const CameraModel cam;
  const std::vector<SceneObject> scene{unit_cube(2, 10.0)};
  const FrameBundle fb = render_frame(cam, scene, 0);
  // front face at z = 9.5 spans u in 320 +- 26.316
  std::size_t lit = 0;
  for (std::uint32_t y = 0; y < cam.height; ++y) {
    for (std::uint32_t x = 0; x < cam.width; ++x) {
      const bool inside = x >= 294 && x <= 345 && y >= 214 && y <= 265;
      const auto id = fb.instance_oracle.at(x, y);
      REQUIRE((id != 0) == inside);
      if (!inside) {
        CHECK(fb.stencil.at(x, y) == 0);
        CHECK(fb.depth.at(x, y) == 1.0f);
        continue;
      }
      ++lit;
      const double z = linearize_depth(fb.depth.at(x, y), cam.depth_params);
      CHECK(z >= 9.5 - 1e-4);
      CHECK(z <= 10.5);
      CHECK(unpack_stencil(fb.stencil.at(x, y)).class_id == class_code(ObjectClass::Vehicle));
    }
  }
  CHECK(lit == 52 * 52);
  CHECK(linearize_depth(fb.depth.at(0, 0), cam.depth_params) == doctest::Approx(cam.depth_params.far_m));
  REQUIRE(fb.records.size() == 1);
  CHECK(fb.records[0].range_m == doctest::Approx(10.0));
  CHECK(fb.records[0].coarse_box == inflate_box(coarse_box(cam, scene[0]), 0.10));
}

TEST_CASE("a smaller cube behind a nearer one has no pixels") {
  const CameraModel cam;
  const std::vector<SceneObject> scene{unit_cube(2, 10.0), unit_cube(3, 20.0)};
  const FrameBundle fb = render_frame(cam, scene, 0);
  CHECK(std::count(fb.instance_oracle.samples().begin(), fb.instance_oracle.samples().end(), 3) == 0);
  CHECK(fb.records.size() == 2);
}

TEST_CASE("objects through the near plane are skipped") {
  const CameraModel cam;
  const std::vector<SceneObject> scene{unit_cube(2, 10.0), unit_cube(5, 0.4)};
  const FrameBundle fb = render_frame(cam, scene, 0);
  CHECK(fb.records.size() == 1);
  CHECK(fb.skipped_ids == std::vector<std::uint32_t>{5});
}

TEST_CASE("render with color") {
  const CameraModel cam = test::small_camera(32, 32, 30);
  const std::vector<SceneObject> scene{unit_cube(2, 5.0)};
  const FrameBundle fb = render_frame(cam, scene, 0, RenderOptions{0.1, 0.0, true});
  REQUIRE(fb.color.has_value());
  CHECK(fb.color->same_shape(32, 32));
  CHECK(fb.color->at(16, 16) != fb.color->at(0, 0));
}

TEST_CASE("generate_scene determinism and contents") {
  ScenarioConfig cfg;
  cfg.seed = 1;
  cfg.frames = 3;
  const auto a = generate_scene(cfg, 0);
  CHECK(a == generate_scene(cfg, 0));
  CHECK(a != generate_scene(cfg, 1));
  cfg.seed = 2;
  CHECK(a != generate_scene(cfg, 0));

  REQUIRE(!a.empty());
  CHECK(a[0].object_id == 1);
  CHECK(a[0].object_class == ObjectClass::Ground);
  std::int64_t vehicles = 0, distractors = 0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    CHECK(a[i].object_id == i + 1);
    CHECK(a[i].center.x >= cfg.region_x.lo);
    CHECK(a[i].center.x <= cfg.region_x.hi);
    CHECK(a[i].center.z >= cfg.region_z.lo);
    CHECK(a[i].center.z <= cfg.region_z.hi);
    if (a[i].object_class == ObjectClass::Vehicle) {
      CHECK(distractors == 0);  // vehicles come first
      ++vehicles;
    } else {
      CHECK(a[i].object_class == ObjectClass::Distractor);
      ++distractors;
    }
  }
  CHECK(vehicles >= cfg.vehicle_count.lo);
  CHECK(vehicles <= cfg.vehicle_count.hi);
  CHECK(distractors <= cfg.distractor_count.hi);
}

TEST_CASE("vehicle count range is honored") {
  ScenarioConfig cfg;
  cfg.vehicle_count = {3, 3};
  cfg.frames = 10;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    cfg.seed = seed;
    for (std::uint32_t f = 0; f < cfg.frames; ++f) {
      const auto s = generate_scene(cfg, f);
      CHECK(std::count_if(s.begin(), s.end(), [](const SceneObject& o) {
              return o.object_class == ObjectClass::Vehicle;
            }) == 3);
    }
  }
}

TEST_CASE("scenario errors") {
  ScenarioConfig cfg;
  cfg.frames = 2;
  CHECK_THROWS_AS(generate_scene(cfg, 2), DomainError);
  cfg.vehicle_count = {5, 3};
  CHECK_THROWS_AS(generate_scene(cfg, 0), ConfigError);
  cfg = {};
  cfg.vehicle_length = {5.0, 4.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.distractor_count = {-1, 2};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.camera.fx = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.camera.cx = 640;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("min depth gap separates overlapping vehicles") {
  ScenarioConfig cfg;
  cfg.seed = 11;
  cfg.frames = 10;
  cfg.min_depth_gap_m = 9.0;
  for (std::uint32_t f = 0; f < cfg.frames; ++f) {
    const auto scene = generate_scene(cfg, f);
    for (std::size_t i = 1; i < scene.size(); ++i) {
      for (std::size_t j = i + 1; j < scene.size(); ++j) {
        const Box2 bi = coarse_box(cfg.camera, scene[i]);
        const Box2 bj = coarse_box(cfg.camera, scene[j]);
        const Box2 img = image_box(cfg.camera.width, cfg.camera.height);
        if (intersect(intersect(bi, bj), img).area() > 0)
          CHECK(std::abs(scene[i].center.z - scene[j].center.z) >= cfg.min_depth_gap_m);
      }
    }
  }
}

TEST_CASE("z-buffer equals brute force on seeded small scenes") {
  const auto cfg = tiny_config(3);
  for (std::uint32_t f = 0; f < cfg.frames; ++f) {
    const auto scene = generate_scene(cfg, f);
    const auto fb = render_frame(cfg.camera, scene, f);
    const auto zb = oracle::brute_force_zbuffer(cfg.camera, scene);
    for (std::size_t i = 0; i < zb.depth.size(); ++i) {
      if (zb.owner[i] < 0) {
        REQUIRE(fb.instance_oracle[i] == 0);
        REQUIRE(fb.depth[i] == 1.0f);
        continue;
      }
      REQUIRE(fb.instance_oracle[i] == scene[static_cast<std::size_t>(zb.owner[i])].object_id);
      REQUIRE(fb.depth[i] == static_cast<float>(encode_log_depth(zb.depth[i], cfg.camera.depth_params)));
    }
  }
}

TEST_CASE("rendered depth matches ray casting against the boxes") {
  const auto cfg = tiny_config(4);
  double worst = 0.0;
  for (std::uint32_t f = 0; f < cfg.frames; ++f) {
    const auto scene = generate_scene(cfg, f);
    const auto fb = render_frame(cfg.camera, scene, f);
    for (std::uint32_t y = 0; y < cfg.camera.height; ++y) {
      for (std::uint32_t x = 0; x < cfg.camera.width; ++x) {
        const auto hit = oracle::ray_cast(cfg.camera, scene, x + 0.5, y + 0.5);
        const std::size_t i = std::size_t{y} * cfg.camera.width + x;
        REQUIRE(hit.has_value() == (fb.instance_oracle[i] != 0));
        if (!hit) continue;
        const double z = linearize_depth(fb.depth[i], cfg.camera.depth_params);
        worst = std::max(worst, std::abs(z - hit->first));
      }
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("containment, class consistency and record coverage") {
  ScenarioConfig cfg;
  cfg.seed = 5;
  cfg.frames = 6;
  cfg.distractor_count = {2, 3};
  for (std::uint32_t f = 0; f < cfg.frames; ++f) {
    const auto scene = generate_scene(cfg, f);
    const auto fb = render_frame(cfg.camera, scene, f, render_options(cfg));
    CHECK(fb.depth.same_shape(cfg.camera.width, cfg.camera.height));
    CHECK(fb.stencil.same_shape(cfg.camera.width, cfg.camera.height));
    CHECK(fb.instance_oracle.same_shape(cfg.camera.width, cfg.camera.height));
    for (std::uint32_t y = 0; y < cfg.camera.height; ++y) {
      for (std::uint32_t x = 0; x < cfg.camera.width; ++x) {
        const auto id = fb.instance_oracle.at(x, y);
        if (id == 0) {
          CHECK(fb.stencil.at(x, y) == 0);
          continue;
        }
        const SceneObject& obj = scene[id - 1];
        REQUIRE(obj.object_id == id);
        REQUIRE(unpack_stencil(fb.stencil.at(x, y)).class_id == class_code(obj.object_class));
        const auto rec = std::find_if(fb.records.begin(), fb.records.end(),
                                      [&](const EngineRecord& r) { return r.object_id == id; });
        REQUIRE(rec != fb.records.end());
        const Box2 hull = coarse_box(cfg.camera, obj);
        REQUIRE(x + 0.5 >= hull.left);
        REQUIRE(x + 0.5 <= hull.right);
        REQUIRE(y + 0.5 >= hull.top);
        REQUIRE(y + 0.5 <= hull.bottom);
      }
    }
  }
}

TEST_CASE("render is deterministic") {
  ScenarioConfig cfg;
  cfg.seed = 9;
  cfg.frames = 2;
  const auto s = generate_scene(cfg, 1);
  const auto a = render_frame(cfg.camera, s, 1);
  const auto b = render_frame(cfg.camera, generate_scene(cfg, 1), 1);
  CHECK(encode_raster(a.depth) == encode_raster(b.depth));
  CHECK(encode_raster(a.stencil) == encode_raster(b.stencil));
  CHECK(encode_raster(a.instance_oracle) == encode_raster(b.instance_oracle));
  CHECK(a.records == b.records);
}

TEST_CASE("registration range drops distant vehicle records") {
  const CameraModel cam;
  const std::vector<SceneObject> scene{unit_cube(2, 10.0, -2.0), unit_cube(3, 40.0, 3.0)};
  const auto fb = render_frame(cam, scene, 0, RenderOptions{0.1, 25.0, false});
  REQUIRE(fb.records.size() == 1);
  CHECK(fb.records[0].object_id == 2);
  CHECK(std::count(fb.instance_oracle.samples().begin(), fb.instance_oracle.samples().end(), 3) > 0);
}
