#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "matrixgt/raster.hpp"

namespace matrixgt {

/// Near/far range of the logarithmic depth encoding, in meters.
struct DepthCodecParams {
  double near_m = 0.15;
  double far_m = 600.0;

  /// Throws ConfigError unless 0 < near_m < far_m (both finite).
  void validate() const;

  friend bool operator==(const DepthCodecParams&, const DepthCodecParams&) = default;
};

/// d = ln(z/near) / ln(far/near), with z clamped into [near, far] first.
double encode_log_depth(double z, const DepthCodecParams& params);

/// z = near * (far/near)^d, with d clamped into [0, 1] first.
/// Increments `*clamped` when d had to be clamped.
double linearize_depth(double d, const DepthCodecParams& params, std::size_t* clamped = nullptr);

/// Linearizes every sample of an encoded depth raster.
std::vector<double> linearize_raster(const RasterF32& encoded, const DepthCodecParams& params,
                                     std::size_t* clamped = nullptr);

/// Low nibble: class id. High nibble: flags.
struct StencilValue {
  int class_id = 0;
  int flags = 0;

  friend bool operator==(const StencilValue&, const StencilValue&) = default;
};

std::uint8_t pack_stencil(StencilValue v);
StencilValue unpack_stencil(std::uint8_t b) noexcept;

enum class ObjectClass : std::uint8_t { Background = 0, Ground = 1, Vehicle = 2, Distractor = 3 };

constexpr int class_code(ObjectClass c) noexcept { return static_cast<int>(c); }

const char* class_name(ObjectClass c) noexcept;
/// Inverse of class_name; throws FormatError for unknown names.
ObjectClass parse_class_name(const std::string& name);

}  // namespace matrixgt
