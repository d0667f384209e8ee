#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "matrixgt/kitti.hpp"

namespace matrixgt {

struct HeatmapGrid {
  std::uint32_t cols = 0;
  std::uint32_t rows = 0;
  double image_width = 0;
  double image_height = 0;
  std::vector<std::uint64_t> counts;  ///< row-major
  std::uint64_t clamped = 0;          ///< centroids outside the image, pinned to a border cell

  std::uint64_t total() const noexcept;
  std::uint64_t at(std::uint32_t col, std::uint32_t row) const { return counts[std::size_t{row} * cols + col]; }
};

/// detections per frame -> number of frames
using FrameHistogram = std::map<std::size_t, std::size_t>;

struct DatasetSummary {
  std::size_t frames = 0;
  std::size_t boxes = 0;
  std::array<std::size_t, 4> per_difficulty{};  ///< Easy, Moderate, Hard, Unknown
  double mean_boxes_per_frame = 0.0;
};

/// Per-frame Car labels of a labels directory, in frame-name order.
using LabelSet = std::vector<std::pair<std::string, std::vector<KittiLabel>>>;

LabelSet load_label_set(const std::filesystem::path& dir);

HeatmapGrid make_heatmap(double image_width, double image_height, std::uint32_t cols, std::uint32_t rows);

/// Bins one centroid. Centroids on a cell boundary go to the lower-index cell.
void add_centroid(HeatmapGrid& grid, double x, double y);

HeatmapGrid centroid_heatmap(const LabelSet& labels, double image_width, double image_height, std::uint32_t cols,
                             std::uint32_t rows);
HeatmapGrid centroid_heatmap(const std::filesystem::path& labels_dir, double image_width, double image_height,
                             std::uint32_t cols, std::uint32_t rows);

FrameHistogram detections_histogram(const LabelSet& labels);
FrameHistogram detections_histogram(const std::filesystem::path& labels_dir);

DatasetSummary dataset_summary(const LabelSet& labels, const DifficultyThresholds& thresholds = {});
DatasetSummary dataset_summary(const std::filesystem::path& labels_dir, const DifficultyThresholds& thresholds = {});

/// Max-count normalized 8-bit rendering of the grid (all zero when empty).
RasterU8 heatmap_image(const HeatmapGrid& grid);

std::string heatmap_csv(const HeatmapGrid& grid);
std::string histogram_csv(const FrameHistogram& hist);
std::string summary_text(const DatasetSummary& summary, const HeatmapGrid& grid);

struct StatsOptions {
  double image_width = 640;
  double image_height = 480;
  std::uint32_t cols = 48;
  std::uint32_t rows = 27;
};

/// Writes heatmap.pgm, heatmap.csv, detections_hist.csv and summary.txt.
void write_stats(const std::filesystem::path& labels_dir, const std::filesystem::path& out_dir,
                 const StatsOptions& options = {});

}  // namespace matrixgt
