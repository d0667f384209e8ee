#include "matrixgt/annotator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "matrixgt/error.hpp"

namespace matrixgt {

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void RefinementParams::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho must lie in (0, 1)");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (min_component_px < 1) throw ConfigError("min_component_px must be >= 1");
  if (coarse_box_margin_px < 0) throw ConfigError("coarse_box_margin_px must be >= 0");
  if (!(extent_margin >= 0.0) || !std::isfinite(extent_margin)) throw ConfigError("extent_margin must be >= 0");
}

double depth_half_extent(const EngineRecord& record) {
  return 0.5 * (record.size.length * std::abs(std::sin(record.yaw)) + record.size.width * std::abs(std::cos(record.yaw)));
}

DepthMap linearize_depth_map(const RasterF32& encoded, const DepthCodecParams& params, std::size_t* clamped) {
  return DepthMap(encoded.width(), encoded.height(), linearize_raster(encoded, params, clamped));
}

BinaryMask vehicle_mask(const RasterU8& stencil) {
  BinaryMask mask(stencil.width(), stencil.height());
  const int vehicle = class_code(ObjectClass::Vehicle);
  for (std::size_t i = 0; i < stencil.size(); ++i) {
    if (unpack_stencil(stencil[i]).class_id == vehicle) mask.set(i);
  }
  return mask;
}

Box2 pixel_hull(std::span<const std::uint32_t> pixels, std::uint32_t width) {
  if (pixels.empty()) throw DomainError("hull of an empty pixel set");
  std::uint32_t x0 = std::numeric_limits<std::uint32_t>::max(), y0 = x0, x1 = 0, y1 = 0;
  for (std::uint32_t p : pixels) {
    const std::uint32_t x = p % width;
    const std::uint32_t y = p / width;
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  return {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1) + 1.0,
          static_cast<double>(y1) + 1.0};
}

std::vector<Component> connected_components(const BinaryMask& mask) {
  const std::uint32_t w = mask.width();
  const std::uint32_t h = mask.height();
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<Component> comps;
  std::vector<std::uint32_t> stack;

  for (std::uint32_t start = 0; start < mask.size(); ++start) {
    if (!mask.test(start) || seen[start]) continue;
    Component comp;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::uint32_t p = stack.back();
      stack.pop_back();
      comp.pixels.push_back(p);
      const std::uint32_t x = p % w;
      const std::uint32_t y = p / w;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const std::int64_t nx = std::int64_t{x} + dx;
          const std::int64_t ny = std::int64_t{y} + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const auto q = static_cast<std::uint32_t>(ny * w + nx);
          if (mask.test(q) && !seen[q]) {
            seen[q] = 1;
            stack.push_back(q);
          }
        }
      }
    }
    std::sort(comp.pixels.begin(), comp.pixels.end());
    comp.box = pixel_hull(comp.pixels, w);
    comps.push_back(std::move(comp));
  }

  std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
    if (a.box.top != b.box.top) return a.box.top < b.box.top;
    if (a.box.left != b.box.left) return a.box.left < b.box.left;
    return a.pixels.front() < b.pixels.front();
  });
  return comps;
}

double mean_region_depth(std::span<const std::uint32_t> region, const DepthMap& depth_m) {
  if (region.empty()) throw DomainError("mean depth of an empty region");
  double sum = 0.0;
  for (std::uint32_t p : region) sum += depth_m[p];
  return sum / static_cast<double>(region.size());
}

double mean_region_depth(std::span<const std::uint32_t> region, const RasterF32& depth,
                         const DepthCodecParams& params) {
  if (region.empty()) throw DomainError("mean depth of an empty region");
  double sum = 0.0;
  for (std::uint32_t p : region) sum += linearize_depth(depth[p], params);
  return sum / static_cast<double>(region.size());
}

Box2 candidate_window(const Box2& coarse, int margin_px, std::uint32_t width, std::uint32_t height) {
  const double m = margin_px;
  return {std::max(0.0, std::floor(coarse.left) - m), std::max(0.0, std::floor(coarse.top) - m),
          std::min(static_cast<double>(width), std::ceil(coarse.right) + m),
          std::min(static_cast<double>(height), std::ceil(coarse.bottom) + m)};
}

double estimate_truncation(const Box2& coarse, std::uint32_t width, std::uint32_t height) {
  if (!coarse.well_ordered()) throw DomainError("truncation of a zero-area box");
  const double inside = intersect(coarse, image_box(width, height)).area();
  return std::clamp(1.0 - inside / coarse.area(), 0.0, 1.0);
}

int estimate_occlusion(std::size_t visible_px, const Box2& coarse, std::uint32_t width, std::uint32_t height) {
  const double area = intersect(coarse, image_box(width, height)).area();
  if (!(area > 0.0)) return 2;
  const double v = static_cast<double>(visible_px) / area;
  if (v >= 0.8) return 0;
  if (v >= 0.5) return 1;
  return 2;
}

namespace {

double record_score(std::size_t visible_px, const Box2& coarse, std::uint32_t w, std::uint32_t h) {
  const double area = intersect(coarse, image_box(w, h)).area();
  const double v = area > 0.0 ? std::min(1.0, static_cast<double>(visible_px) / area) : 0.0;
  return 0.5 + 0.5 * v;
}

}  // namespace

std::optional<Refinement> refine_tight_box(const EngineRecord& record, const BinaryMask& mask, const DepthMap& depth_m,
                                           const RefinementParams& params) {
  params.validate();
  if (record.object_class != ObjectClass::Vehicle) throw DomainError("refinement expects a Vehicle record");
  if (!depth_m.same_shape(mask.width(), mask.height())) throw FormatError("mask and depth dimensions differ");
  const std::uint32_t w = mask.width();
  const std::uint32_t h = mask.height();

  const Box2 win = candidate_window(record.coarse_box, params.coarse_box_margin_px, w, h);
  if (!win.well_ordered()) return std::nullopt;

  std::vector<std::uint32_t> seed;
  for (auto y = static_cast<std::uint32_t>(win.top); y < static_cast<std::uint32_t>(win.bottom); ++y) {
    for (auto x = static_cast<std::uint32_t>(win.left); x < static_cast<std::uint32_t>(win.right); ++x) {
      const std::uint32_t p = y * w + x;
      if (mask.test(p)) seed.push_back(p);
    }
  }
  if (seed.empty()) return std::nullopt;

  const double half_extent = depth_half_extent(record);
  const double slack = params.extent_margin * half_extent;
  double mu = mean_region_depth(seed, depth_m);
  if (params.record_seed) {
    // Pixels inside the record's own depth span, with a small allowance for
    // binary32 depth quantization.
    const double zc = record.location_cam.z;
    const double gate = half_extent + 1e-3 * std::abs(zc);
    std::vector<std::uint32_t> gated;
    for (std::uint32_t p : seed) {
      if (std::abs(depth_m[p] - zc) <= gate) gated.push_back(p);
    }
    // Nothing at the object's own depth: whatever is in the window belongs to others.
    if (gated.empty()) return std::nullopt;
    mu = mean_region_depth(gated, depth_m);
  }
  std::vector<std::uint32_t> kept;
  for (int it = 0; it < params.iterations; ++it) {
    kept.clear();
    const double band = params.rho * mu + slack;
    for (std::uint32_t p : seed) {
      if (std::abs(depth_m[p] - mu) <= band) kept.push_back(p);
    }
    if (kept.empty()) return std::nullopt;
    mu = mean_region_depth(kept, depth_m);
  }
  if (kept.size() < params.min_component_px) return std::nullopt;

  Refinement out;
  TightAnnotation& a = out.annotation;
  a.source_id = record.object_id;
  a.tight_box = pixel_hull(kept, w);
  a.visible_px = kept.size();
  a.truncation = estimate_truncation(record.coarse_box, w, h);
  a.occlusion_level = estimate_occlusion(kept.size(), record.coarse_box, w, h);
  a.range_m = record.range_m;
  a.score = record_score(kept.size(), record.coarse_box, w, h);
  a.size = record.size;
  a.location = record.location_cam;
  a.yaw = record.yaw;
  out.kept = std::move(kept);
  return out;
}

std::optional<Refinement> refine_tight_box(const EngineRecord& record, const BinaryMask& mask, const RasterF32& depth,
                                           const DepthCodecParams& depth_params, const RefinementParams& params) {
  return refine_tight_box(record, mask, linearize_depth_map(depth, depth_params), params);
}

std::vector<TightAnnotation> recover_orphans(const BinaryMask& mask, const BinaryMask& claimed,
                                             const DepthMap& depth_m, const RefinementParams& params) {
  params.validate();
  if (!(claimed.width() == mask.width() && claimed.height() == mask.height()) ||
      !depth_m.same_shape(mask.width(), mask.height())) {
    throw FormatError("orphan recovery inputs differ in dimensions");
  }
  BinaryMask residual(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) residual.set(i, mask.test(i) && !claimed.test(i));

  std::vector<TightAnnotation> out;
  for (const Component& c : connected_components(residual)) {
    if (c.pixel_count() < params.min_component_px) continue;
    TightAnnotation a;
    a.source_id = 0;
    a.tight_box = c.box;
    a.visible_px = c.pixel_count();
    a.truncation = estimate_truncation(c.box, mask.width(), mask.height());
    a.occlusion_level = 2;
    a.range_m = mean_region_depth(c.pixels, depth_m);
    a.score = 0.5 * static_cast<double>(c.pixel_count()) / c.box.area();
    out.push_back(a);
  }
  return out;
}

std::vector<TightAnnotation> recover_orphans(const BinaryMask& mask, std::span<const Refinement> accepted,
                                             const DepthMap& depth_m, const RefinementParams& params) {
  BinaryMask claimed(mask.width(), mask.height());
  for (const auto& r : accepted) {
    for (std::uint32_t p : r.kept) claimed.set(p);
  }
  return recover_orphans(mask, claimed, depth_m, params);
}

std::vector<TightAnnotation> annotate_frame(const RasterU8& stencil, const RasterF32& depth,
                                            std::span<const EngineRecord> records,
                                            const DepthCodecParams& depth_params, const RefinementParams& params) {
  params.validate();
  if (!depth.same_shape(stencil.width(), stencil.height())) {
    throw FormatError("stencil is " + std::to_string(stencil.width()) + "x" + std::to_string(stencil.height()) +
                      " but depth is " + std::to_string(depth.width()) + "x" + std::to_string(depth.height()));
  }
  const DepthMap depth_m = linearize_depth_map(depth, depth_params);
  const BinaryMask mask = vehicle_mask(stencil);

  // Nearer records claim their pixels first; later records only see what is left.
  std::vector<const EngineRecord*> order;
  for (const auto& r : records) {
    if (r.object_class == ObjectClass::Vehicle) order.push_back(&r);
  }
  std::sort(order.begin(), order.end(), [](const EngineRecord* a, const EngineRecord* b) {
    if (a->range_m != b->range_m) return a->range_m < b->range_m;
    return a->object_id < b->object_id;
  });

  BinaryMask available = mask;
  BinaryMask claimed(mask.width(), mask.height());
  std::vector<TightAnnotation> out;
  for (const EngineRecord* rec : order) {
    auto refined = refine_tight_box(*rec, available, depth_m, params);
    if (!refined) continue;
    for (std::uint32_t p : refined->kept) {
      available.set(p, false);
      claimed.set(p);
    }
    out.push_back(std::move(refined->annotation));
  }
  std::sort(out.begin(), out.end(),
            [](const TightAnnotation& a, const TightAnnotation& b) { return a.source_id < b.source_id; });

  auto orphans = recover_orphans(mask, claimed, depth_m, params);
  out.insert(out.end(), orphans.begin(), orphans.end());
  return out;
}

std::vector<TightAnnotation> annotate_frame(const FrameBundle& bundle, const DepthCodecParams& depth_params,
                                            const RefinementParams& params) {
  return annotate_frame(bundle.stencil, bundle.depth, bundle.records, depth_params, params);
}

}  // namespace matrixgt
