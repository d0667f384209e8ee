#include "matrixgt/raster.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "matrixgt/error.hpp"

namespace matrixgt {

template <typename T>
Image<T>::Image(std::uint32_t width, std::uint32_t height, std::vector<T> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (samples_.size() != std::size_t{width} * height) {
    throw DomainError("raster sample count " + std::to_string(samples_.size()) + " does not match " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
}

template class Image<std::uint8_t>;
template class Image<std::uint16_t>;
template class Image<float>;
template class Image<Rgb>;
template class Image<double>;

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'M', 'R', 'X', 'B'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{b[at + i]} << (8 * i);
  return v;
}

std::size_t sample_size(SampleKind k) {
  switch (k) {
    case SampleKind::U8: return 1;
    case SampleKind::U16: return 2;
    case SampleKind::F32: return 4;
  }
  return 0;
}

void put_samples(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> s) {
  out.insert(out.end(), s.begin(), s.end());
}

void put_samples(std::vector<std::uint8_t>& out, std::span<const std::uint16_t> s) {
  for (std::uint16_t v : s) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  }
}

void put_samples(std::vector<std::uint8_t>& out, std::span<const float> s) {
  for (float f : s) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

std::vector<std::uint8_t> slurp(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

SampleKind sample_kind(const Raster& r) noexcept {
  return static_cast<SampleKind>(r.index());
}

void validate_raster(const Raster& r) {
  std::visit(
      [](const auto& img) {
        if (img.width() < 1 || img.height() < 1) throw DomainError("raster dimensions must be >= 1");
        if (img.size() != std::size_t{img.width()} * img.height()) throw DomainError("raster sample count mismatch");
        using T = typename std::decay_t<decltype(img)>::value_type;
        if constexpr (std::is_same_v<T, float>) {
          for (float f : img.samples()) {
            if (!std::isfinite(f)) throw DomainError("F32 raster holds a non-finite sample");
          }
        }
      },
      r);
}

std::vector<std::uint8_t> encode_raster(const Raster& r) {
  validate_raster(r);
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.push_back(kMrbVersion);
  out.push_back(static_cast<std::uint8_t>(sample_kind(r)));
  std::visit(
      [&](const auto& img) {
        put_u32(out, img.width());
        put_u32(out, img.height());
        out.reserve(out.size() + img.size() * sizeof(typename std::decay_t<decltype(img)>::value_type));
        put_samples(out, img.samples());
      },
      r);
  return out;
}

void write_raster(const Raster& r, std::ostream& out) {
  const auto bytes = encode_raster(r);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing MRB stream");
}

void write_raster(const Raster& r, const std::filesystem::path& path) {
  const auto bytes = encode_raster(r);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing " + path.string());
}

Raster decode_raster(std::span<const std::uint8_t> b) {
  if (b.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), b.begin())) {
    throw FormatError("bad MRB magic");
  }
  if (b.size() < kMrbHeaderSize) throw TruncationError("MRB header truncated");
  if (b[4] != kMrbVersion) throw FormatError("unsupported MRB version " + std::to_string(b[4]));
  if (b[5] > 2) throw FormatError("unknown MRB sample kind " + std::to_string(b[5]));
  const auto kind = static_cast<SampleKind>(b[5]);
  const std::uint32_t w = get_u32(b, 6);
  const std::uint32_t h = get_u32(b, 10);
  if (w < 1 || h < 1) throw FormatError("MRB dimensions must be >= 1");
  const std::size_t n = std::size_t{w} * h;
  const std::size_t need = n * sample_size(kind);
  const auto payload = b.subspan(kMrbHeaderSize);
  if (payload.size() < need) {
    throw TruncationError("MRB payload has " + std::to_string(payload.size()) + " bytes, expected " +
                          std::to_string(need));
  }
  if (payload.size() > need) throw FormatError("MRB payload has trailing bytes");

  switch (kind) {
    case SampleKind::U8:
      return RasterU8(w, h, std::vector<std::uint8_t>(payload.begin(), payload.end()));
    case SampleKind::U16: {
      std::vector<std::uint16_t> s(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = static_cast<std::uint16_t>(payload[2 * i] | (payload[2 * i + 1] << 8));
      }
      return RasterU16(w, h, std::move(s));
    }
    case SampleKind::F32: {
      std::vector<float> s(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::bit_cast<float>(get_u32(payload, 4 * i));
        if (!std::isfinite(s[i])) throw FormatError("MRB F32 payload holds a non-finite sample");
      }
      return RasterF32(w, h, std::move(s));
    }
  }
  throw FormatError("unreachable sample kind");
}

Raster read_raster(std::istream& in) {
  const auto bytes = slurp(in);
  return decode_raster(bytes);
}

Raster read_raster(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  try {
    return read_raster(f);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const TruncationError& e) {
    throw TruncationError(path.string() + ": " + e.what());
  }
}

template <typename T>
Image<T> read_raster_as(const std::filesystem::path& path) {
  Raster r = read_raster(path);
  if (auto* img = std::get_if<Image<T>>(&r)) return std::move(*img);
  throw FormatError(path.string() + ": unexpected MRB sample kind " +
                    std::to_string(static_cast<int>(sample_kind(r))));
}

template RasterU8 read_raster_as<std::uint8_t>(const std::filesystem::path&);
template RasterU16 read_raster_as<std::uint16_t>(const std::filesystem::path&);
template RasterF32 read_raster_as<float>(const std::filesystem::path&);

namespace {

template <typename Pixel>
void write_netpbm(const Image<Pixel>& img, const std::filesystem::path& path, const char* magic) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << magic << '\n' << img.width() << ' ' << img.height() << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.samples().data()),
          static_cast<std::streamsize>(img.size() * sizeof(Pixel)));
  if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace

void write_ppm(const ColorImage& img, const std::filesystem::path& path) {
  static_assert(sizeof(Rgb) == 3);
  write_netpbm(img, path, "P6");
}

void write_pgm(const RasterU8& img, const std::filesystem::path& path) { write_netpbm(img, path, "P5"); }

}  // namespace matrixgt
