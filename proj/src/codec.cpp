#include "matrixgt/codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matrixgt/error.hpp"

namespace matrixgt {

void DepthCodecParams::validate() const {
  if (!std::isfinite(near_m) || !std::isfinite(far_m) || near_m <= 0.0 || near_m >= far_m) {
    throw ConfigError("depth codec requires 0 < near_m < far_m (got near_m=" + std::to_string(near_m) +
                      ", far_m=" + std::to_string(far_m) + ")");
  }
}

double encode_log_depth(double z, const DepthCodecParams& params) {
  params.validate();
  z = std::clamp(z, params.near_m, params.far_m);
  return std::log(z / params.near_m) / std::log(params.far_m / params.near_m);
}

double linearize_depth(double d, const DepthCodecParams& params, std::size_t* clamped) {
  params.validate();
  if (d < 0.0 || d > 1.0) {
    if (clamped) ++*clamped;
    d = std::clamp(d, 0.0, 1.0);
  }
  return params.near_m * std::pow(params.far_m / params.near_m, d);
}

std::vector<double> linearize_raster(const RasterF32& encoded, const DepthCodecParams& params,
                                     std::size_t* clamped) {
  params.validate();
  std::vector<double> z(encoded.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = linearize_depth(encoded[i], params, clamped);
  return z;
}

std::uint8_t pack_stencil(StencilValue v) {
  if (v.class_id < 0 || v.class_id > 15 || v.flags < 0 || v.flags > 15) {
    throw DomainError("stencil fields must fit in 4 bits (class_id=" + std::to_string(v.class_id) +
                      ", flags=" + std::to_string(v.flags) + ")");
  }
  return static_cast<std::uint8_t>((v.flags << 4) | v.class_id);
}

StencilValue unpack_stencil(std::uint8_t b) noexcept { return {b & 0x0F, b >> 4}; }

const char* class_name(ObjectClass c) noexcept {
  switch (c) {
    case ObjectClass::Background: return "Background";
    case ObjectClass::Ground: return "Ground";
    case ObjectClass::Vehicle: return "Vehicle";
    case ObjectClass::Distractor: return "Distractor";
  }
  return "?";
}

ObjectClass parse_class_name(const std::string& name) {
  for (auto c : {ObjectClass::Background, ObjectClass::Ground, ObjectClass::Vehicle, ObjectClass::Distractor}) {
    if (name == class_name(c)) return c;
  }
  throw FormatError("unknown object class '" + name + "'");
}

}  // namespace matrixgt
