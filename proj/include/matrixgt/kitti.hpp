#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "matrixgt/annotator.hpp"
#include "matrixgt/geometry.hpp"

namespace matrixgt {

enum class Difficulty { Easy = 0, Moderate = 1, Hard = 2, Unknown = 3 };

inline constexpr std::array<Difficulty, 3> kEvaluatedLevels = {Difficulty::Easy, Difficulty::Moderate,
                                                               Difficulty::Hard};

const char* difficulty_name(Difficulty d) noexcept;

/// Per-level limits, indexed Easy, Moderate, Hard.
struct DifficultyThresholds {
  std::array<double, 3> min_height_px{40.0, 25.0, 25.0};
  std::array<double, 3> max_truncation{0.15, 0.30, 0.50};
  std::array<int, 3> max_occlusion{0, 1, 2};
};

struct KittiLabel {
  std::string type = "Car";
  double truncated = 0.0;
  int occluded = 0;
  double alpha = -10.0;
  Box2 bbox;
  double height_m = -1.0;
  double width_m = -1.0;
  double length_m = -1.0;
  Vec3 location{-1000.0, -1000.0, -1000.0};
  double rotation_y = -10.0;
  std::optional<double> score;

  friend bool operator==(const KittiLabel&, const KittiLabel&) = default;
};

/// Easiest level whose height, truncation and occlusion limits the label meets.
Difficulty classify_difficulty(const KittiLabel& label, const DifficultyThresholds& t = {});

/// Wraps an angle into [-pi, pi].
double normalize_angle(double a);

KittiLabel from_annotation(const TightAnnotation& a);

/// One label line without a trailing newline: 2-decimal floats, 4-decimal score.
std::string format_label(const KittiLabel& label);

/// Rounds every field to the precision format_label writes.
KittiLabel quantize(const KittiLabel& label);

void write_labels(const std::vector<KittiLabel>& labels, std::ostream& out);
void write_labels(const std::vector<KittiLabel>& labels, const std::filesystem::path& path);

/// Accepts 15 or 16 whitespace-separated fields per line; blank lines are skipped.
/// FormatError messages carry "<source>:<line>".
std::vector<KittiLabel> parse_labels(std::istream& in, const std::string& source_name = "<stream>");
std::vector<KittiLabel> parse_labels(const std::filesystem::path& path);

/// Sorted `NNNNNN.txt` file names (stems) of a labels directory.
std::vector<std::string> list_label_frames(const std::filesystem::path& dir);

}  // namespace matrixgt
