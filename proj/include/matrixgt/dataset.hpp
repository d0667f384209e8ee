#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "matrixgt/scene.hpp"

namespace matrixgt {

inline constexpr int kDatasetFormatVersion = 1;

/// Parses a line-oriented `key=value` scenario. '#' starts a comment.
/// `seed` is required; other keys default to ScenarioConfig's values.
/// Errors are ConfigError("<source>:<line>: ...").
ScenarioConfig parse_scenario(const std::string& text, const std::string& source_name = "<scenario>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Canonical scenario text: every key, one per line, shortest round-trip numbers.
std::string scenario_text(const ScenarioConfig& config);

std::string manifest_text(const ScenarioConfig& config);
/// Reads `manifest.txt` of a dataset directory and checks its format version.
ScenarioConfig read_manifest(const std::filesystem::path& dataset_dir);

/// Zero-padded six-digit frame stem, e.g. "000042".
std::string frame_stem(std::uint32_t frame_idx);

/// `id class left top right bottom range_m h w l x y z yaw` with 4 decimals.
std::string format_meta_line(const EngineRecord& record);
std::string meta_text(const std::vector<EngineRecord>& records);
std::vector<EngineRecord> parse_meta(const std::string& text, const std::string& source_name = "<meta>");
std::vector<EngineRecord> read_meta(const std::filesystem::path& path);

/// Writes the per-frame files of one bundle into `dir`.
void write_frame_bundle(const FrameBundle& bundle, const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace matrixgt
