#include "matrixgt/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include "matrixgt/dataset.hpp"
#include "matrixgt/error.hpp"

namespace matrixgt {

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MATRIXGT_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw ConfigError(std::string("MATRIXGT_WORKERS is not a number: '") + env + "'");
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void run_frames(std::uint32_t count, unsigned workers, const std::function<void(std::uint32_t)>& task) {
  workers = std::max(1u, std::min<unsigned>(workers, std::max<std::uint32_t>(count, 1)));
  std::atomic<std::uint32_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::map<std::uint32_t, std::exception_ptr> errors;

  auto worker = [&] {
    while (!failed.load()) {
      const std::uint32_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(mu);
        errors.emplace(i, std::current_exception());
        failed.store(true);
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(worker);
  }
  if (!errors.empty()) std::rethrow_exception(errors.begin()->second);
}

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

void require_file(const std::filesystem::path& p, std::uint32_t frame) {
  if (!std::filesystem::is_regular_file(p)) {
    throw IoError("frame " + frame_stem(frame) + ": missing " + p.string());
  }
}

}  // namespace

void generate_dataset(const ScenarioConfig& config, const std::filesystem::path& out_dir, unsigned workers) {
  config.validate();
  ensure_dir(out_dir);
  write_text_file(out_dir / "manifest.txt", manifest_text(config));
  const RenderOptions options = render_options(config);
  run_frames(config.frames, workers, [&](std::uint32_t i) {
    const auto scene = generate_scene(config, i);
    write_frame_bundle(render_frame(config.camera, scene, i, options), out_dir);
  });
}

void annotate_dataset(const std::filesystem::path& dataset_dir, const std::filesystem::path& labels_dir,
                      const RefinementParams& params, unsigned workers) {
  params.validate();
  const ScenarioConfig config = read_manifest(dataset_dir);
  ensure_dir(labels_dir);
  run_frames(config.frames, workers, [&](std::uint32_t i) {
    const std::string stem = frame_stem(i);
    const auto depth_path = dataset_dir / (stem + "_depth.mrb");
    const auto stencil_path = dataset_dir / (stem + "_stencil.mrb");
    const auto meta_path = dataset_dir / (stem + "_meta.txt");
    require_file(depth_path, i);
    require_file(stencil_path, i);
    require_file(meta_path, i);
    const auto depth = read_raster_as<float>(depth_path);
    const auto stencil = read_raster_as<std::uint8_t>(stencil_path);
    const auto records = read_meta(meta_path);
    if (!stencil.same_shape(config.camera.width, config.camera.height)) {
      throw FormatError(stencil_path.string() + ": dimensions differ from the manifest camera");
    }
    std::vector<KittiLabel> labels;
    for (const auto& a : annotate_frame(stencil, depth, records, config.camera.depth_params, params)) {
      labels.push_back(from_annotation(a));
    }
    write_labels(labels, labels_dir / (stem + ".txt"));
  });
}

std::vector<KittiLabel> oracle_frame_labels(const CameraModel& camera, const RasterU16& instance,
                                            const RasterU8& stencil, std::span<const EngineRecord> records) {
  if (!instance.same_shape(stencil.width(), stencil.height())) {
    throw FormatError("instance and stencil dimensions differ");
  }
  const std::uint32_t w = instance.width();
  struct Hull {
    std::size_t count = 0;
    std::uint32_t x0 = UINT32_MAX, y0 = UINT32_MAX, x1 = 0, y1 = 0;
    int class_id = 0;
  };
  std::map<std::uint16_t, Hull> hulls;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const std::uint16_t id = instance[i];
    if (id == 0) continue;
    Hull& h = hulls[id];
    const auto x = static_cast<std::uint32_t>(i % w);
    const auto y = static_cast<std::uint32_t>(i / w);
    ++h.count;
    h.x0 = std::min(h.x0, x);
    h.x1 = std::max(h.x1, x);
    h.y0 = std::min(h.y0, y);
    h.y1 = std::max(h.y1, y);
    h.class_id = unpack_stencil(stencil[i]).class_id;
  }

  std::map<std::uint32_t, const EngineRecord*> by_id;
  for (const auto& r : records) by_id[r.object_id] = &r;

  std::vector<KittiLabel> out;
  for (const auto& [id, h] : hulls) {
    const Box2 box{static_cast<double>(h.x0), static_cast<double>(h.y0), h.x1 + 1.0, h.y1 + 1.0};
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      // Rendered but unregistered: geometry unknown.
      if (h.class_id != class_code(ObjectClass::Vehicle)) continue;
      KittiLabel l;
      l.bbox = box;
      l.truncated = 0.0;
      l.occluded = 2;
      out.push_back(l);
      continue;
    }
    const EngineRecord& rec = *it->second;
    if (rec.object_class != ObjectClass::Vehicle) continue;

    const SceneObject alone{rec.object_id, rec.object_class, rec.location_cam, rec.size, rec.yaw};
    const FrameBundle solo = render_frame(camera, std::span(&alone, 1), 0, {0.0, 0.0, false});
    const auto expected = static_cast<std::size_t>(
        std::count(solo.instance_oracle.samples().begin(), solo.instance_oracle.samples().end(), id));
    const double v = expected > 0 ? static_cast<double>(h.count) / static_cast<double>(expected) : 0.0;

    TightAnnotation a;
    a.source_id = id;
    a.tight_box = box;
    a.visible_px = h.count;
    a.truncation = estimate_truncation(rec.coarse_box, camera.width, camera.height);
    a.occlusion_level = v >= 0.8 ? 0 : (v >= 0.5 ? 1 : 2);
    a.range_m = rec.range_m;
    a.size = rec.size;
    a.location = rec.location_cam;
    a.yaw = rec.yaw;
    KittiLabel l = from_annotation(a);
    l.score.reset();
    out.push_back(l);
  }
  return out;
}

void oracle_labels_dataset(const std::filesystem::path& dataset_dir, const std::filesystem::path& labels_dir,
                           unsigned workers) {
  const ScenarioConfig config = read_manifest(dataset_dir);
  ensure_dir(labels_dir);
  run_frames(config.frames, workers, [&](std::uint32_t i) {
    const std::string stem = frame_stem(i);
    const auto instance_path = dataset_dir / (stem + "_instance.mrb");
    const auto stencil_path = dataset_dir / (stem + "_stencil.mrb");
    const auto meta_path = dataset_dir / (stem + "_meta.txt");
    require_file(instance_path, i);
    require_file(stencil_path, i);
    require_file(meta_path, i);
    const auto labels = oracle_frame_labels(config.camera, read_raster_as<std::uint16_t>(instance_path),
                                            read_raster_as<std::uint8_t>(stencil_path), read_meta(meta_path));
    write_labels(labels, labels_dir / (stem + ".txt"));
  });
}

}  // namespace matrixgt
