#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace matrixgt {

enum class SampleKind : std::uint8_t { U8 = 0, U16 = 1, F32 = 2 };

/// Row-major grid of samples with a top-left origin.
template <typename T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(std::uint32_t width, std::uint32_t height, T fill = T{})
      : width_(width), height_(height), samples_(std::size_t{width} * height, fill) {}
  Image(std::uint32_t width, std::uint32_t height, std::vector<T> samples);

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return samples_.size(); }

  T& at(std::uint32_t x, std::uint32_t y) { return samples_[std::size_t{y} * width_ + x]; }
  const T& at(std::uint32_t x, std::uint32_t y) const { return samples_[std::size_t{y} * width_ + x]; }
  T& operator[](std::size_t i) { return samples_[i]; }
  const T& operator[](std::size_t i) const { return samples_[i]; }

  std::span<T> samples() noexcept { return samples_; }
  std::span<const T> samples() const noexcept { return samples_; }

  bool same_shape(std::uint32_t w, std::uint32_t h) const noexcept { return width_ == w && height_ == h; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::vector<T> samples_;
};

using RasterU8 = Image<std::uint8_t>;
using RasterU16 = Image<std::uint16_t>;
using RasterF32 = Image<float>;
using Raster = std::variant<RasterU8, RasterU16, RasterF32>;

SampleKind sample_kind(const Raster& r) noexcept;

/// Checks width/height ≥ 1, sample count, and finiteness of F32 samples.
/// Throws DomainError on violation.
void validate_raster(const Raster& r);

// MRB: "MRXB" · version u8 (=1) · kind u8 · width u32 · height u32 · payload,
// little-endian, no padding.
inline constexpr std::uint8_t kMrbVersion = 1;
inline constexpr std::size_t kMrbHeaderSize = 14;

void write_raster(const Raster& r, std::ostream& out);
void write_raster(const Raster& r, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_raster(const Raster& r);

Raster read_raster(std::istream& in);
Raster read_raster(const std::filesystem::path& path);
Raster decode_raster(std::span<const std::uint8_t> bytes);

/// Reads a raster and requires a specific sample kind (FormatError otherwise).
template <typename T>
Image<T> read_raster_as(const std::filesystem::path& path);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};
using ColorImage = Image<Rgb>;

/// Binary P6 / P5 writers (maxval 255).
void write_ppm(const ColorImage& img, const std::filesystem::path& path);
void write_pgm(const RasterU8& img, const std::filesystem::path& path);

}  // namespace matrixgt
