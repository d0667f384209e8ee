#include "matrixgt/kitti.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "matrixgt/error.hpp"

namespace matrixgt {

const char* difficulty_name(Difficulty d) noexcept {
  switch (d) {
    case Difficulty::Easy: return "Easy";
    case Difficulty::Moderate: return "Moderate";
    case Difficulty::Hard: return "Hard";
    case Difficulty::Unknown: return "Unknown";
  }
  return "?";
}

Difficulty classify_difficulty(const KittiLabel& label, const DifficultyThresholds& t) {
  if (!label.bbox.well_ordered()) throw DomainError("malformed bbox in difficulty classification");
  const double h = label.bbox.height();
  for (Difficulty level : kEvaluatedLevels) {
    const auto i = static_cast<std::size_t>(level);
    if (h >= t.min_height_px[i] && label.truncated <= t.max_truncation[i] && label.occluded <= t.max_occlusion[i]) {
      return level;
    }
  }
  return Difficulty::Unknown;
}

double normalize_angle(double a) {
  constexpr double pi = std::numbers::pi;
  a = std::remainder(a, 2.0 * pi);
  return std::clamp(a, -pi, pi);
}

KittiLabel from_annotation(const TightAnnotation& a) {
  KittiLabel l;
  l.type = "Car";
  l.truncated = a.truncation;
  l.occluded = a.occlusion_level;
  l.bbox = a.tight_box;
  l.score = a.score;
  if (a.size && a.location && a.yaw) {
    l.height_m = a.size->height;
    l.width_m = a.size->width;
    l.length_m = a.size->length;
    l.location = *a.location;
    l.rotation_y = normalize_angle(*a.yaw);
    l.alpha = normalize_angle(l.rotation_y - std::atan2(a.location->x, a.location->z));
  }
  return l;
}

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  // "-0.00" and "0.00" are the same quantized value; keep one spelling.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

double round_to(double v, int decimals) { return std::stod(fixed(v, decimals)); }

double parse_number(const std::string& tok, const std::string& where) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = first + tok.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw FormatError(where + ": unparseable number '" + tok + "'");
  }
  return v;
}

}  // namespace

std::string format_label(const KittiLabel& l) {
  std::string s = l.type;
  auto add = [&](const std::string& t) {
    s += ' ';
    s += t;
  };
  add(fixed(l.truncated, 2));
  add(std::to_string(l.occluded));
  for (double v : {l.alpha, l.bbox.left, l.bbox.top, l.bbox.right, l.bbox.bottom, l.height_m, l.width_m, l.length_m,
                   l.location.x, l.location.y, l.location.z, l.rotation_y}) {
    add(fixed(v, 2));
  }
  if (l.score) add(fixed(*l.score, 4));
  return s;
}

KittiLabel quantize(const KittiLabel& l) {
  KittiLabel q = l;
  q.truncated = round_to(l.truncated, 2);
  q.alpha = round_to(l.alpha, 2);
  q.bbox = {round_to(l.bbox.left, 2), round_to(l.bbox.top, 2), round_to(l.bbox.right, 2), round_to(l.bbox.bottom, 2)};
  q.height_m = round_to(l.height_m, 2);
  q.width_m = round_to(l.width_m, 2);
  q.length_m = round_to(l.length_m, 2);
  q.location = {round_to(l.location.x, 2), round_to(l.location.y, 2), round_to(l.location.z, 2)};
  q.rotation_y = round_to(l.rotation_y, 2);
  if (l.score) q.score = round_to(*l.score, 4);
  return q;
}

void write_labels(const std::vector<KittiLabel>& labels, std::ostream& out) {
  for (const auto& l : labels) out << format_label(l) << '\n';
  if (!out) throw IoError("failed writing labels");
}

void write_labels(const std::vector<KittiLabel>& labels, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  write_labels(labels, f);
}

std::vector<KittiLabel> parse_labels(std::istream& in, const std::string& source_name) {
  std::vector<KittiLabel> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (tok.size() != 15 && tok.size() != 16) {
      throw FormatError(where + ": expected 15 or 16 fields, got " + std::to_string(tok.size()));
    }
    KittiLabel l;
    l.type = tok[0];
    l.truncated = parse_number(tok[1], where);
    const double occ = parse_number(tok[2], where);
    if (occ != std::floor(occ)) throw FormatError(where + ": occluded must be an integer");
    l.occluded = static_cast<int>(occ);
    l.alpha = parse_number(tok[3], where);
    l.bbox = {parse_number(tok[4], where), parse_number(tok[5], where), parse_number(tok[6], where),
              parse_number(tok[7], where)};
    l.height_m = parse_number(tok[8], where);
    l.width_m = parse_number(tok[9], where);
    l.length_m = parse_number(tok[10], where);
    l.location = {parse_number(tok[11], where), parse_number(tok[12], where), parse_number(tok[13], where)};
    l.rotation_y = parse_number(tok[14], where);
    if (tok.size() == 16) l.score = parse_number(tok[15], where);
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<KittiLabel> parse_labels(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  return parse_labels(f, path.string());
}

std::vector<std::string> list_label_frames(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
  std::vector<std::string> frames;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") frames.push_back(entry.path().stem().string());
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

}  // namespace matrixgt
