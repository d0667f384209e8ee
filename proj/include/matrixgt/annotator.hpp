#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "matrixgt/codec.hpp"
#include "matrixgt/geometry.hpp"
#include "matrixgt/raster.hpp"
#include "matrixgt/scene.hpp"

namespace matrixgt {

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(std::uint32_t width, std::uint32_t height) : width_(width), height_(height), bits_(std::size_t{width} * height, 0) {}

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool test(std::size_t i) const noexcept { return bits_[i] != 0; }
  bool test(std::uint32_t x, std::uint32_t y) const noexcept { return test(std::size_t{y} * width_ + x); }
  void set(std::size_t i, bool on = true) noexcept { bits_[i] = on ? 1 : 0; }
  void set_at(std::uint32_t x, std::uint32_t y, bool on = true) noexcept { set(std::size_t{y} * width_ + x, on); }

  std::size_t count() const noexcept;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Maximal 8-connected set of mask pixels. `pixels` holds ascending raster indices.
struct Component {
  std::vector<std::uint32_t> pixels;
  Box2 box;

  std::size_t pixel_count() const noexcept { return pixels.size(); }
};

struct RefinementParams {
  double rho = 0.10;                 ///< band |z - mean| <= rho * mean + extent slack
  int iterations = 2;                ///< mean re-estimation passes
  std::size_t min_component_px = 16;
  int coarse_box_margin_px = 2;
  /// Multiple of the record's half depth extent added to the band. A cuboid seen
  /// obliquely spans several meters of depth, more than rho * mean at close range.
  /// 0 gives the purely relative band.
  double extent_margin = 1.0;
  /// Seed the first mean from candidates inside the record's own depth span
  /// (center depth +- half extent) instead of the whole candidate window.
  /// The record is rejected when no candidate qualifies.
  bool record_seed = true;

  void validate() const;
};

/// Half the camera-z extent of the record's cuboid footprint (from size and yaw).
double depth_half_extent(const EngineRecord& record);

struct TightAnnotation {
  std::uint32_t source_id = 0;  ///< engine object id, 0 for orphans
  ObjectClass object_class = ObjectClass::Vehicle;
  Box2 tight_box;
  std::size_t visible_px = 0;
  double truncation = 0.0;
  int occlusion_level = 0;
  double range_m = 0.0;
  double score = 1.0;  ///< higher for record-backed, less occluded annotations
  std::optional<Size3> size;
  std::optional<Vec3> location;
  std::optional<double> yaw;

  friend bool operator==(const TightAnnotation&, const TightAnnotation&) = default;
};

/// Linearized depth in meters, same layout as the encoded raster.
using DepthMap = Image<double>;

DepthMap linearize_depth_map(const RasterF32& encoded, const DepthCodecParams& params, std::size_t* clamped = nullptr);

BinaryMask vehicle_mask(const RasterU8& stencil);

/// Components ordered by (top, left) of their bounding box, then first pixel.
std::vector<Component> connected_components(const BinaryMask& mask);

/// Exact pixel-edge hull of a set of raster indices (non-empty).
Box2 pixel_hull(std::span<const std::uint32_t> pixels, std::uint32_t width);

/// Mean linearized depth over `region`; DomainError when the region is empty.
double mean_region_depth(std::span<const std::uint32_t> region, const RasterF32& depth, const DepthCodecParams& params);
double mean_region_depth(std::span<const std::uint32_t> region, const DepthMap& depth_m);

/// Pixel window the refinement draws candidates from: the coarse box grown by the
/// margin, snapped outward to whole pixels and clipped to the image.
Box2 candidate_window(const Box2& coarse, int margin_px, std::uint32_t width, std::uint32_t height);

struct Refinement {
  TightAnnotation annotation;
  std::vector<std::uint32_t> kept;  ///< raster indices, ascending
};

/// Depth-band refinement of one engine record. Returns nullopt when the record is
/// rejected (no candidate pixels, or fewer kept pixels than min_component_px).
std::optional<Refinement> refine_tight_box(const EngineRecord& record, const BinaryMask& mask, const DepthMap& depth_m,
                                           const RefinementParams& params);
std::optional<Refinement> refine_tight_box(const EngineRecord& record, const BinaryMask& mask, const RasterF32& depth,
                                           const DepthCodecParams& depth_params, const RefinementParams& params);

/// Vehicle components left unclaimed by `claimed` (the union of accepted kept
/// sets), at least min_component_px in size, each promoted to an annotation.
std::vector<TightAnnotation> recover_orphans(const BinaryMask& mask, const BinaryMask& claimed,
                                             const DepthMap& depth_m, const RefinementParams& params);
std::vector<TightAnnotation> recover_orphans(const BinaryMask& mask, std::span<const Refinement> accepted,
                                             const DepthMap& depth_m, const RefinementParams& params);

/// Fraction of an un-clipped box lying outside the image.
double estimate_truncation(const Box2& coarse, std::uint32_t width, std::uint32_t height);

/// 0 when visible_px covers >= 80% of the clipped box, 1 from 50%, else 2.
int estimate_occlusion(std::size_t visible_px, const Box2& coarse, std::uint32_t width, std::uint32_t height);

/// Full pipeline for one frame. Reads only stencil, depth and records.
/// Output: record-backed annotations by source_id, then orphans by position.
std::vector<TightAnnotation> annotate_frame(const RasterU8& stencil, const RasterF32& depth,
                                            std::span<const EngineRecord> records,
                                            const DepthCodecParams& depth_params, const RefinementParams& params);

/// Same as above; the bundle's instance oracle is never touched.
std::vector<TightAnnotation> annotate_frame(const FrameBundle& bundle, const DepthCodecParams& depth_params,
                                            const RefinementParams& params);

}  // namespace matrixgt
