#include "matrixgt/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "matrixgt/error.hpp"

namespace matrixgt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double to_double(const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw std::invalid_argument("not a number: '" + v + "'");
  }
  return out;
}

std::int64_t to_int(const std::string& v) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw std::invalid_argument("not an integer: '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw std::invalid_argument("not a non-negative integer: '" + v + "'");
  }
  return out;
}

std::uint32_t to_u32(const std::string& v) {
  const auto x = to_uint(v);
  if (x > 0xFFFFFFFFULL) throw std::invalid_argument("value too large: '" + v + "'");
  return static_cast<std::uint32_t>(x);
}

bool to_bool(const std::string& v) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw std::invalid_argument("not a boolean: '" + v + "'");
}

struct Field {
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

#define MGT_DOUBLE(key, member) \
  {key, {[](ScenarioConfig& c, const std::string& v) { c.member = to_double(v); }, \
         [](const ScenarioConfig& c) { return shortest(c.member); }}}
#define MGT_INT(key, member) \
  {key, {[](ScenarioConfig& c, const std::string& v) { c.member = to_int(v); }, \
         [](const ScenarioConfig& c) { return std::to_string(c.member); }}}

// Ordered: scenario_text emits keys in this order.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"seed", {[](ScenarioConfig& c, const std::string& v) { c.seed = to_uint(v); },
                [](const ScenarioConfig& c) { return std::to_string(c.seed); }}},
      {"frames", {[](ScenarioConfig& c, const std::string& v) { c.frames = to_u32(v); },
                  [](const ScenarioConfig& c) { return std::to_string(c.frames); }}},
      {"width", {[](ScenarioConfig& c, const std::string& v) { c.camera.width = to_u32(v); },
                 [](const ScenarioConfig& c) { return std::to_string(c.camera.width); }}},
      {"height", {[](ScenarioConfig& c, const std::string& v) { c.camera.height = to_u32(v); },
                  [](const ScenarioConfig& c) { return std::to_string(c.camera.height); }}},
      MGT_DOUBLE("fx", camera.fx),
      MGT_DOUBLE("fy", camera.fy),
      MGT_DOUBLE("cx", camera.cx),
      MGT_DOUBLE("cy", camera.cy),
      MGT_DOUBLE("near_m", camera.depth_params.near_m),
      MGT_DOUBLE("far_m", camera.depth_params.far_m),
      MGT_DOUBLE("camera_height_m", camera_height_m),
      MGT_INT("vehicles_min", vehicle_count.lo),
      MGT_INT("vehicles_max", vehicle_count.hi),
      MGT_INT("distractors_min", distractor_count.lo),
      MGT_INT("distractors_max", distractor_count.hi),
      MGT_DOUBLE("vehicle_length_min", vehicle_length.lo),
      MGT_DOUBLE("vehicle_length_max", vehicle_length.hi),
      MGT_DOUBLE("vehicle_width_min", vehicle_width.lo),
      MGT_DOUBLE("vehicle_width_max", vehicle_width.hi),
      MGT_DOUBLE("vehicle_height_min", vehicle_height.lo),
      MGT_DOUBLE("vehicle_height_max", vehicle_height.hi),
      MGT_DOUBLE("distractor_width_min", distractor_width.lo),
      MGT_DOUBLE("distractor_width_max", distractor_width.hi),
      MGT_DOUBLE("distractor_height_min", distractor_height.lo),
      MGT_DOUBLE("distractor_height_max", distractor_height.hi),
      MGT_DOUBLE("region_x_min", region_x.lo),
      MGT_DOUBLE("region_x_max", region_x.hi),
      MGT_DOUBLE("region_z_min", region_z.lo),
      MGT_DOUBLE("region_z_max", region_z.hi),
      MGT_DOUBLE("yaw_min", yaw.lo),
      MGT_DOUBLE("yaw_max", yaw.hi),
      MGT_DOUBLE("min_depth_gap_m", min_depth_gap_m),
      MGT_DOUBLE("coarse_inflation", coarse_inflation),
      MGT_DOUBLE("registration_range_m", registration_range_m),
      {"write_color", {[](ScenarioConfig& c, const std::string& v) { c.write_color = to_bool(v); },
                       [](const ScenarioConfig& c) { return std::string(c.write_color ? "1" : "0"); }}},
  };
  return table;
}

#undef MGT_DOUBLE
#undef MGT_INT

ScenarioConfig parse_key_values(const std::string& text, const std::string& source, bool manifest) {
  std::map<std::string, const Field*> lookup;
  for (const auto& [k, f] : fields()) lookup[k] = &f;

  ScenarioConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool version_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    if (manifest && key == "format_version") {
      if (value != std::to_string(kDatasetFormatVersion)) {
        throw ConfigError(where + ": unsupported dataset format version '" + value + "'");
      }
      version_seen = true;
      continue;
    }
    const auto it = lookup.find(key);
    if (it == lookup.end()) throw ConfigError(where + ": unknown key '" + key + "'");
    try {
      it->second->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + key + ": " + e.what());
    }
  }
  if (!seen.count("seed")) throw ConfigError(source + ": missing required key 'seed'");
  if (manifest && !version_seen) throw ConfigError(source + ": missing format_version");
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& source_name) {
  return parse_key_values(text, source_name, false);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_text_file(path), path.string());
}

std::string scenario_text(const ScenarioConfig& config) {
  std::string s;
  for (const auto& [k, f] : fields()) s += k + "=" + f.get(config) + "\n";
  return s;
}

std::string manifest_text(const ScenarioConfig& config) {
  return "format_version=" + std::to_string(kDatasetFormatVersion) + "\n" + scenario_text(config);
}

ScenarioConfig read_manifest(const std::filesystem::path& dataset_dir) {
  const auto path = dataset_dir / "manifest.txt";
  return parse_key_values(read_text_file(path), path.string(), true);
}

std::string frame_stem(std::uint32_t frame_idx) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06u", frame_idx);
  return buf;
}

std::string format_meta_line(const EngineRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%u %s %.4f %.4f %.4f %.4f %.4f %.4f %.4f %.4f %.4f %.4f %.4f %.4f", r.object_id,
                class_name(r.object_class), r.coarse_box.left, r.coarse_box.top, r.coarse_box.right,
                r.coarse_box.bottom, r.range_m, r.size.height, r.size.width, r.size.length, r.location_cam.x,
                r.location_cam.y, r.location_cam.z, r.yaw);
  return buf;
}

std::string meta_text(const std::vector<EngineRecord>& records) {
  std::string s;
  for (const auto& r : records) s += format_meta_line(r) + "\n";
  return s;
}

std::vector<EngineRecord> parse_meta(const std::string& text, const std::string& source_name) {
  std::vector<EngineRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (tok.size() != 14) throw FormatError(where + ": expected 14 fields, got " + std::to_string(tok.size()));
    try {
      EngineRecord r;
      r.object_id = to_u32(tok[0]);
      r.object_class = parse_class_name(tok[1]);
      r.coarse_box = {to_double(tok[2]), to_double(tok[3]), to_double(tok[4]), to_double(tok[5])};
      r.range_m = to_double(tok[6]);
      r.size = {to_double(tok[9]), to_double(tok[8]), to_double(tok[7])};
      r.location_cam = {to_double(tok[10]), to_double(tok[11]), to_double(tok[12])};
      r.yaw = to_double(tok[13]);
      if (!r.coarse_box.well_ordered() || !(r.range_m > 0.0) || r.object_id == 0) {
        throw std::invalid_argument("record violates box/range/id invariants");
      }
      out.push_back(r);
    } catch (const std::invalid_argument& e) {
      throw FormatError(where + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  return out;
}

std::vector<EngineRecord> read_meta(const std::filesystem::path& path) {
  return parse_meta(read_text_file(path), path.string());
}

void write_frame_bundle(const FrameBundle& bundle, const std::filesystem::path& dir) {
  const std::string stem = frame_stem(bundle.frame_id);
  if (bundle.color) write_ppm(*bundle.color, dir / (stem + "_color.ppm"));
  write_raster(bundle.depth, dir / (stem + "_depth.mrb"));
  write_raster(bundle.stencil, dir / (stem + "_stencil.mrb"));
  write_raster(bundle.instance_oracle, dir / (stem + "_instance.mrb"));
  write_text_file(dir / (stem + "_meta.txt"), meta_text(bundle.records));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace matrixgt
