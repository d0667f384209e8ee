#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "matrixgt/codec.hpp"
#include "matrixgt/geometry.hpp"
#include "matrixgt/raster.hpp"

namespace matrixgt {

/// Pinhole camera. Camera space is x right, y down, z forward, in meters;
/// the world frame coincides with it.
struct CameraModel {
  double fx = 500.0;
  double fy = 500.0;
  double cx = 320.0;
  double cy = 240.0;
  std::uint32_t width = 640;
  std::uint32_t height = 480;
  DepthCodecParams depth_params;

  void validate() const;

  friend bool operator==(const CameraModel&, const CameraModel&) = default;
};

/// Cuboid extents. Length runs along the object's local x axis, width along
/// local z, height along y.
struct Size3 {
  double length = 0, width = 0, height = 0;
  friend bool operator==(const Size3&, const Size3&) = default;
};

struct SceneObject {
  std::uint32_t object_id = 0;
  ObjectClass object_class = ObjectClass::Vehicle;
  Vec3 center;
  Size3 size;
  double yaw = 0.0;  ///< rotation about camera y; yaw 0 puts the length along +x

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

/// What the engine reports for an object, including its (possibly loose) 2D box.
struct EngineRecord {
  std::uint32_t object_id = 0;
  ObjectClass object_class = ObjectClass::Vehicle;
  Box2 coarse_box;  ///< un-clipped
  double range_m = 0.0;
  Size3 size;
  double yaw = 0.0;
  Vec3 location_cam;

  friend bool operator==(const EngineRecord&, const EngineRecord&) = default;
};

struct FrameBundle {
  std::uint32_t frame_id = 0;
  std::optional<ColorImage> color;
  RasterF32 depth;             ///< encoded log-depth
  RasterU8 stencil;            ///< packed class/flags
  RasterU16 instance_oracle;   ///< 0 = nothing, else object_id; tests and oracle labels only
  std::vector<EngineRecord> records;
  std::vector<std::uint32_t> skipped_ids;  ///< objects crossing the near plane (no record)
};

struct Range {
  double lo = 0, hi = 0;
  friend bool operator==(const Range&, const Range&) = default;
};

struct CountRange {
  std::int64_t lo = 0, hi = 0;
  friend bool operator==(const CountRange&, const CountRange&) = default;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  std::uint32_t frames = 1;
  CameraModel camera;
  double camera_height_m = 1.65;

  CountRange vehicle_count{3, 8};
  CountRange distractor_count{0, 3};
  Range vehicle_length{3.6, 5.0};
  Range vehicle_width{1.6, 2.0};
  Range vehicle_height{1.4, 1.8};
  Range distractor_width{0.3, 1.2};
  Range distractor_height{0.6, 2.5};

  Range region_x{-12.0, 12.0};  ///< lateral placement extent, meters
  Range region_z{8.0, 45.0};    ///< longitudinal placement extent, meters
  Range yaw{-3.14159265358979, 3.14159265358979};

  double min_depth_gap_m = 0.0;     ///< center-depth gap required between image-overlapping objects
  double coarse_inflation = 0.10;   ///< relative growth of reported coarse boxes
  double registration_range_m = 0.0;  ///< vehicles farther than this get no record; 0 disables
  bool write_color = false;

  /// Throws ConfigError on empty ranges, negative counts or an invalid camera.
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Deterministic scene for (config.seed, frame_idx). Object 1 is always the
/// ground slab; vehicles follow, then distractors.
std::vector<SceneObject> generate_scene(const ScenarioConfig& config, std::uint32_t frame_idx);

struct ProjectedPoint {
  double u = 0, v = 0, depth = 0;
};

ProjectedPoint project_point(const CameraModel& camera, Vec3 p);

std::array<Vec3, 8> cuboid_corners(const SceneObject& obj);

/// Hull of the 8 projected corners, not clipped to the image.
/// Throws BehindCameraError if any corner has z <= near_m.
Box2 coarse_box(const CameraModel& camera, const SceneObject& obj);

/// Grows a box about its center by `fraction` of its width and height.
Box2 inflate_box(const Box2& box, double fraction);

/// A screen-space triangle of a cuboid face (after near-plane clipping).
/// Depth at a pixel is recovered from the face plane n·p = offset in camera space.
struct ScreenTriangle {
  std::uint32_t object_index = 0;  ///< index into the scene list
  std::array<double, 2> a{}, b{}, c{};
  Vec3 normal;
  double offset = 0;
  std::uint8_t shade = 255;
};

std::vector<ScreenTriangle> build_triangles(const CameraModel& camera, std::span<const SceneObject> scene);

/// Pixel-center coverage with the top-left fill rule.
bool covers(const ScreenTriangle& tri, double px, double py) noexcept;

/// Camera-space z where the ray through (px, py) meets the triangle's plane.
double surface_depth(const ScreenTriangle& tri, const CameraModel& camera, double px, double py) noexcept;

struct RenderOptions {
  double coarse_inflation = 0.10;
  double registration_range_m = 0.0;
  bool color = false;
};

FrameBundle render_frame(const CameraModel& camera, std::span<const SceneObject> scene, std::uint32_t frame_id,
                         const RenderOptions& options = {});

RenderOptions render_options(const ScenarioConfig& config);

}  // namespace matrixgt
