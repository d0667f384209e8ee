#include "matrixgt/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "matrixgt/error.hpp"
#include "matrixgt/rng.hpp"

namespace matrixgt {

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw ConfigError("camera focal lengths must be > 0");
  if (width < 1 || height < 1) throw ConfigError("camera image size must be >= 1");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw ConfigError("camera principal point must lie inside the image");
  }
  if (width > 65535 || height > 65535) throw ConfigError("camera image size too large");
  depth_params.validate();
}

namespace {

void check_range(const Range& r, const char* name, bool positive) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    throw ConfigError(std::string("empty or invalid range for ") + name);
  }
  if (positive && r.lo <= 0.0) throw ConfigError(std::string(name) + " must be > 0");
}

void check_count(const CountRange& r, const char* name) {
  if (r.lo < 0 || r.lo > r.hi) throw ConfigError(std::string("invalid count range for ") + name);
}

}  // namespace

void ScenarioConfig::validate() const {
  camera.validate();
  if (frames < 1) throw ConfigError("frames must be >= 1");
  if (!(camera_height_m > 0.0)) throw ConfigError("camera_height_m must be > 0");
  check_count(vehicle_count, "vehicle_count");
  check_count(distractor_count, "distractor_count");
  if (vehicle_count.hi + distractor_count.hi > 60000) throw ConfigError("too many objects per frame");
  check_range(vehicle_length, "vehicle_length", true);
  check_range(vehicle_width, "vehicle_width", true);
  check_range(vehicle_height, "vehicle_height", true);
  check_range(distractor_width, "distractor_width", true);
  check_range(distractor_height, "distractor_height", true);
  check_range(region_x, "region_x", false);
  check_range(region_z, "region_z", true);
  check_range(yaw, "yaw", false);
  if (region_z.lo <= camera.depth_params.near_m + 3.0) {
    throw ConfigError("region_z must start at least 3 m beyond the near plane");
  }
  if (!(min_depth_gap_m >= 0.0)) throw ConfigError("min_depth_gap_m must be >= 0");
  if (!(coarse_inflation >= 0.0)) throw ConfigError("coarse_inflation must be >= 0");
  if (!(registration_range_m >= 0.0)) throw ConfigError("registration_range_m must be >= 0");
}

namespace {

constexpr int kMaxPlacementAttempts = 2000;
constexpr double kFootprintClearance = 0.3;
constexpr double kGroundThickness = 0.01;

struct Placed {
  SceneObject obj;
  Box2 hull;
  double footprint_radius;
};

bool conflicts(const Placed& cand, const std::vector<Placed>& placed, double min_gap) {
  for (const auto& p : placed) {
    const double dx = cand.obj.center.x - p.obj.center.x;
    const double dz = cand.obj.center.z - p.obj.center.z;
    const double reach = cand.footprint_radius + p.footprint_radius + kFootprintClearance;
    if (dx * dx + dz * dz < reach * reach) return true;
    if (min_gap > 0.0 && intersect(cand.hull, p.hull).area() > 0.0 &&
        std::abs(cand.obj.center.z - p.obj.center.z) < min_gap) {
      return true;
    }
  }
  return false;
}

void place_objects(const ScenarioConfig& cfg, Xorshift64Star& rng, ObjectClass cls, std::int64_t count,
                   std::uint32_t& next_id, std::vector<Placed>& placed) {
  for (std::int64_t i = 0; i < count; ++i) {
    bool done = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !done; ++attempt) {
      SceneObject obj;
      obj.object_class = cls;
      if (cls == ObjectClass::Vehicle) {
        obj.size.length = rng.uniform(cfg.vehicle_length.lo, cfg.vehicle_length.hi);
        obj.size.width = rng.uniform(cfg.vehicle_width.lo, cfg.vehicle_width.hi);
        obj.size.height = rng.uniform(cfg.vehicle_height.lo, cfg.vehicle_height.hi);
      } else {
        obj.size.length = rng.uniform(cfg.distractor_width.lo, cfg.distractor_width.hi);
        obj.size.width = rng.uniform(cfg.distractor_width.lo, cfg.distractor_width.hi);
        obj.size.height = rng.uniform(cfg.distractor_height.lo, cfg.distractor_height.hi);
      }
      const double x = rng.uniform(cfg.region_x.lo, cfg.region_x.hi);
      const double z = rng.uniform(cfg.region_z.lo, cfg.region_z.hi);
      obj.yaw = rng.uniform(cfg.yaw.lo, cfg.yaw.hi);
      obj.center = {x, cfg.camera_height_m - obj.size.height / 2.0, z};

      Placed cand{obj, {}, 0.5 * std::hypot(obj.size.length, obj.size.width)};
      try {
        // Overlap is judged on the boxes the engine will report.
        cand.hull = inflate_box(coarse_box(cfg.camera, obj), cfg.coarse_inflation);
      } catch (const BehindCameraError&) {
        continue;
      }
      if (conflicts(cand, placed, cfg.min_depth_gap_m)) continue;
      cand.obj.object_id = next_id++;
      placed.push_back(cand);
      done = true;
    }
    if (!done) {
      throw ConfigError(std::string("could not place ") + class_name(cls) + " " + std::to_string(i + 1) + " of " +
                        std::to_string(count) + " after " + std::to_string(kMaxPlacementAttempts) +
                        " attempts; widen the placement region or lower min_depth_gap");
    }
  }
}

}  // namespace

std::vector<SceneObject> generate_scene(const ScenarioConfig& config, std::uint32_t frame_idx) {
  config.validate();
  if (frame_idx >= config.frames) {
    throw DomainError("frame index " + std::to_string(frame_idx) + " out of range (frames=" +
                      std::to_string(config.frames) + ")");
  }
  Xorshift64Star rng(frame_stream_seed(config.seed, frame_idx));

  std::vector<SceneObject> scene;
  SceneObject ground;
  ground.object_id = 1;
  ground.object_class = ObjectClass::Ground;
  const double g_near = 1.0;
  const double g_far = config.region_z.hi + 30.0;
  const double g_left = config.region_x.lo - 30.0;
  const double g_right = config.region_x.hi + 30.0;
  ground.center = {(g_left + g_right) / 2.0, config.camera_height_m + kGroundThickness / 2.0, (g_near + g_far) / 2.0};
  ground.size = {g_right - g_left, g_far - g_near, kGroundThickness};
  scene.push_back(ground);

  const std::int64_t vehicles = rng.uniform_int(config.vehicle_count.lo, config.vehicle_count.hi);
  const std::int64_t distractors = rng.uniform_int(config.distractor_count.lo, config.distractor_count.hi);

  std::uint32_t next_id = 2;
  std::vector<Placed> placed;
  place_objects(config, rng, ObjectClass::Vehicle, vehicles, next_id, placed);
  place_objects(config, rng, ObjectClass::Distractor, distractors, next_id, placed);
  for (const auto& p : placed) scene.push_back(p.obj);
  return scene;
}

ProjectedPoint project_point(const CameraModel& camera, Vec3 p) {
  if (!(p.z > 0.0)) throw BehindCameraError("point behind camera (z=" + std::to_string(p.z) + ")");
  return {camera.fx * p.x / p.z + camera.cx, camera.fy * p.y / p.z + camera.cy, p.z};
}

std::array<Vec3, 8> cuboid_corners(const SceneObject& obj) {
  const double c = std::cos(obj.yaw);
  const double s = std::sin(obj.yaw);
  std::array<Vec3, 8> out{};
  for (int k = 0; k < 8; ++k) {
    const double lx = ((k & 1) ? 0.5 : -0.5) * obj.size.length;
    const double ly = ((k & 2) ? 0.5 : -0.5) * obj.size.height;
    const double lz = ((k & 4) ? 0.5 : -0.5) * obj.size.width;
    out[k] = obj.center + Vec3{c * lx + s * lz, ly, -s * lx + c * lz};
  }
  return out;
}

Box2 coarse_box(const CameraModel& camera, const SceneObject& obj) {
  Box2 box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Vec3& p : cuboid_corners(obj)) {
    if (!(p.z > camera.depth_params.near_m)) {
      throw BehindCameraError("object " + std::to_string(obj.object_id) + " crosses the near plane");
    }
    const auto q = project_point(camera, p);
    box.left = std::min(box.left, q.u);
    box.right = std::max(box.right, q.u);
    box.top = std::min(box.top, q.v);
    box.bottom = std::max(box.bottom, q.v);
  }
  return box;
}

Box2 inflate_box(const Box2& box, double fraction) {
  const double dx = 0.5 * fraction * box.width();
  const double dy = 0.5 * fraction * box.height();
  return {box.left - dx, box.top - dy, box.right + dx, box.bottom + dy};
}

namespace {

constexpr std::array<std::array<int, 4>, 6> kFaces = {{
    {0, 2, 6, 4}, {1, 3, 7, 5}, {0, 1, 5, 4}, {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 5, 7, 6},
}};

double edge(const std::array<double, 2>& a, const std::array<double, 2>& b, double px, double py) noexcept {
  return (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0]);
}

bool top_left(const std::array<double, 2>& a, const std::array<double, 2>& b) noexcept {
  const double dx = b[0] - a[0];
  const double dy = b[1] - a[1];
  return (dy == 0.0 && dx > 0.0) || dy < 0.0;
}

std::vector<Vec3> clip_near(const std::array<Vec3, 4>& quad, double near_m) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const Vec3& p = quad[i];
    const Vec3& q = quad[(i + 1) % quad.size()];
    const bool p_in = p.z >= near_m;
    const bool q_in = q.z >= near_m;
    if (p_in) out.push_back(p);
    if (p_in != q_in) {
      const double t = (near_m - p.z) / (q.z - p.z);
      Vec3 x = p + t * (q - p);
      x.z = near_m;
      out.push_back(x);
    }
  }
  return out;
}

}  // namespace

std::vector<ScreenTriangle> build_triangles(const CameraModel& camera, std::span<const SceneObject> scene) {
  const Vec3 light = [] {
    const Vec3 l{-0.3, -1.0, -0.4};
    return (1.0 / norm(l)) * l;
  }();
  std::vector<ScreenTriangle> tris;
  tris.reserve(scene.size() * 12);
  for (std::uint32_t i = 0; i < scene.size(); ++i) {
    const auto corners = cuboid_corners(scene[i]);
    for (const auto& f : kFaces) {
      const std::array<Vec3, 4> quad = {corners[f[0]], corners[f[1]], corners[f[2]], corners[f[3]]};
      const Vec3 n = cross(quad[1] - quad[0], quad[2] - quad[0]);
      const double n_len = norm(n);
      if (n_len == 0.0) continue;
      const auto poly = clip_near(quad, camera.depth_params.near_m);
      if (poly.size() < 3) continue;
      std::vector<std::array<double, 2>> screen;
      screen.reserve(poly.size());
      for (const Vec3& p : poly) {
        const auto q = project_point(camera, p);
        screen.push_back({q.u, q.v});
      }
      const auto shade = static_cast<std::uint8_t>(60.0 + 195.0 * std::abs(dot(n, light)) / n_len);
      for (std::size_t k = 1; k + 1 < screen.size(); ++k) {
        ScreenTriangle t;
        t.object_index = i;
        t.a = screen[0];
        t.b = screen[k];
        t.c = screen[k + 1];
        const double area2 = edge(t.a, t.b, t.c[0], t.c[1]);
        if (std::abs(area2) < 1e-12) continue;
        if (area2 < 0.0) std::swap(t.b, t.c);
        t.normal = n;
        t.offset = dot(n, quad[0]);
        t.shade = shade;
        tris.push_back(t);
      }
    }
  }
  return tris;
}

bool covers(const ScreenTriangle& t, double px, double py) noexcept {
  const double w0 = edge(t.b, t.c, px, py);
  const double w1 = edge(t.c, t.a, px, py);
  const double w2 = edge(t.a, t.b, px, py);
  auto inside = [](double w, bool tl) { return w > 0.0 || (w == 0.0 && tl); };
  return inside(w0, top_left(t.b, t.c)) && inside(w1, top_left(t.c, t.a)) && inside(w2, top_left(t.a, t.b));
}

double surface_depth(const ScreenTriangle& t, const CameraModel& camera, double px, double py) noexcept {
  const Vec3 ray{(px - camera.cx) / camera.fx, (py - camera.cy) / camera.fy, 1.0};
  return t.offset / dot(t.normal, ray);
}

RenderOptions render_options(const ScenarioConfig& config) {
  return {config.coarse_inflation, config.registration_range_m, config.write_color};
}

namespace {

Rgb base_color(ObjectClass c) {
  switch (c) {
    case ObjectClass::Ground: return {96, 96, 100};
    case ObjectClass::Vehicle: return {200, 48, 40};
    case ObjectClass::Distractor: return {50, 150, 70};
    case ObjectClass::Background: break;
  }
  return {150, 180, 215};
}

}  // namespace

FrameBundle render_frame(const CameraModel& camera, std::span<const SceneObject> scene, std::uint32_t frame_id,
                         const RenderOptions& options) {
  camera.validate();
  const std::uint32_t w = camera.width;
  const std::uint32_t h = camera.height;
  const auto tris = build_triangles(camera, scene);

  std::vector<double> zbuf(std::size_t{w} * h, std::numeric_limits<double>::infinity());
  std::vector<std::int32_t> owner(zbuf.size(), -1);
  std::vector<std::uint8_t> shade(zbuf.size(), 255);

  for (const auto& t : tris) {
    const double min_u = std::min({t.a[0], t.b[0], t.c[0]});
    const double max_u = std::max({t.a[0], t.b[0], t.c[0]});
    const double min_v = std::min({t.a[1], t.b[1], t.c[1]});
    const double max_v = std::max({t.a[1], t.b[1], t.c[1]});
    const double x0 = std::max(0.0, std::ceil(min_u - 0.5));
    const double x1 = std::min(static_cast<double>(w) - 1.0, std::floor(max_u - 0.5));
    const double y0 = std::max(0.0, std::ceil(min_v - 0.5));
    const double y1 = std::min(static_cast<double>(h) - 1.0, std::floor(max_v - 0.5));
    if (x0 > x1 || y0 > y1) continue;
    for (auto y = static_cast<std::uint32_t>(y0); y <= static_cast<std::uint32_t>(y1); ++y) {
      const double py = y + 0.5;
      for (auto x = static_cast<std::uint32_t>(x0); x <= static_cast<std::uint32_t>(x1); ++x) {
        const double px = x + 0.5;
        if (!covers(t, px, py)) continue;
        const double z = surface_depth(t, camera, px, py);
        const std::size_t i = std::size_t{y} * w + x;
        if (z < zbuf[i]) {
          zbuf[i] = z;
          owner[i] = static_cast<std::int32_t>(t.object_index);
          shade[i] = t.shade;
        }
      }
    }
  }

  FrameBundle bundle;
  bundle.frame_id = frame_id;
  bundle.depth = RasterF32(w, h, 1.0f);
  bundle.stencil = RasterU8(w, h, 0);
  bundle.instance_oracle = RasterU16(w, h, 0);
  if (options.color) bundle.color = ColorImage(w, h, base_color(ObjectClass::Background));

  for (std::size_t i = 0; i < zbuf.size(); ++i) {
    if (owner[i] < 0) continue;
    const SceneObject& obj = scene[static_cast<std::size_t>(owner[i])];
    bundle.depth[i] = static_cast<float>(encode_log_depth(zbuf[i], camera.depth_params));
    bundle.stencil[i] = pack_stencil({class_code(obj.object_class), 0});
    bundle.instance_oracle[i] = static_cast<std::uint16_t>(obj.object_id);
    if (bundle.color) {
      const Rgb base = base_color(obj.object_class);
      auto lit = [&](std::uint8_t c) { return static_cast<std::uint8_t>(c * shade[i] / 255); };
      (*bundle.color)[i] = {lit(base.r), lit(base.g), lit(base.b)};
    }
  }

  for (const SceneObject& obj : scene) {
    EngineRecord rec;
    try {
      rec.coarse_box = inflate_box(coarse_box(camera, obj), options.coarse_inflation);
    } catch (const BehindCameraError&) {
      bundle.skipped_ids.push_back(obj.object_id);
      continue;
    }
    rec.object_id = obj.object_id;
    rec.object_class = obj.object_class;
    rec.range_m = norm(obj.center);
    rec.size = obj.size;
    rec.yaw = obj.yaw;
    rec.location_cam = obj.center;
    if (options.registration_range_m > 0.0 && obj.object_class == ObjectClass::Vehicle &&
        rec.range_m > options.registration_range_m) {
      continue;
    }
    bundle.records.push_back(rec);
  }
  return bundle;
}

}  // namespace matrixgt
