#include "matrixgt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "matrixgt/error.hpp"

namespace matrixgt {

std::uint64_t HeatmapGrid::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

LabelSet load_label_set(const std::filesystem::path& dir) {
  LabelSet out;
  for (const auto& frame : list_label_frames(dir)) {
    out.emplace_back(frame, parse_labels(dir / (frame + ".txt")));
  }
  return out;
}

HeatmapGrid make_heatmap(double image_width, double image_height, std::uint32_t cols, std::uint32_t rows) {
  if (cols < 1 || rows < 1) throw ConfigError("heatmap grid must be at least 1x1");
  if (!(image_width > 0.0) || !(image_height > 0.0)) throw ConfigError("heatmap image size must be > 0");
  HeatmapGrid g;
  g.cols = cols;
  g.rows = rows;
  g.image_width = image_width;
  g.image_height = image_height;
  g.counts.assign(std::size_t{cols} * rows, 0);
  return g;
}

namespace {

// Index of the cell holding coordinate v; boundary values belong to the lower cell.
std::int64_t cell_of(double v, double extent, std::uint32_t cells) {
  return static_cast<std::int64_t>(std::ceil(v * cells / extent)) - 1;
}

}  // namespace

void add_centroid(HeatmapGrid& g, double x, double y) {
  const bool outside = x < 0.0 || y < 0.0 || x > g.image_width || y > g.image_height;
  const auto col = std::clamp<std::int64_t>(cell_of(x, g.image_width, g.cols), 0, g.cols - 1);
  const auto row = std::clamp<std::int64_t>(cell_of(y, g.image_height, g.rows), 0, g.rows - 1);
  ++g.counts[static_cast<std::size_t>(row) * g.cols + static_cast<std::size_t>(col)];
  if (outside) ++g.clamped;
}

HeatmapGrid centroid_heatmap(const LabelSet& labels, double image_width, double image_height, std::uint32_t cols,
                             std::uint32_t rows) {
  HeatmapGrid g = make_heatmap(image_width, image_height, cols, rows);
  for (const auto& [frame, ls] : labels) {
    for (const auto& l : ls) {
      if (l.type != "Car") continue;
      add_centroid(g, 0.5 * (l.bbox.left + l.bbox.right), 0.5 * (l.bbox.top + l.bbox.bottom));
    }
  }
  return g;
}

HeatmapGrid centroid_heatmap(const std::filesystem::path& labels_dir, double image_width, double image_height,
                             std::uint32_t cols, std::uint32_t rows) {
  return centroid_heatmap(load_label_set(labels_dir), image_width, image_height, cols, rows);
}

FrameHistogram detections_histogram(const LabelSet& labels) {
  FrameHistogram h;
  for (const auto& [frame, ls] : labels) {
    const auto cars = static_cast<std::size_t>(
        std::count_if(ls.begin(), ls.end(), [](const KittiLabel& l) { return l.type == "Car"; }));
    ++h[cars];
  }
  return h;
}

FrameHistogram detections_histogram(const std::filesystem::path& labels_dir) {
  return detections_histogram(load_label_set(labels_dir));
}

DatasetSummary dataset_summary(const LabelSet& labels, const DifficultyThresholds& thresholds) {
  DatasetSummary s;
  s.frames = labels.size();
  for (const auto& [frame, ls] : labels) {
    for (const auto& l : ls) {
      if (l.type != "Car") continue;
      ++s.boxes;
      ++s.per_difficulty[static_cast<std::size_t>(classify_difficulty(l, thresholds))];
    }
  }
  s.mean_boxes_per_frame = s.frames ? static_cast<double>(s.boxes) / static_cast<double>(s.frames) : 0.0;
  return s;
}

DatasetSummary dataset_summary(const std::filesystem::path& labels_dir, const DifficultyThresholds& thresholds) {
  return dataset_summary(load_label_set(labels_dir), thresholds);
}

RasterU8 heatmap_image(const HeatmapGrid& g) {
  RasterU8 img(g.cols, g.rows, 0);
  const std::uint64_t peak = g.counts.empty() ? 0 : *std::max_element(g.counts.begin(), g.counts.end());
  if (peak == 0) return img;
  for (std::size_t i = 0; i < g.counts.size(); ++i) {
    img[i] = static_cast<std::uint8_t>((g.counts[i] * 255 + peak / 2) / peak);
  }
  return img;
}

std::string heatmap_csv(const HeatmapGrid& g) {
  std::string s = "row,col,count\n";
  for (std::uint32_t r = 0; r < g.rows; ++r) {
    for (std::uint32_t c = 0; c < g.cols; ++c) {
      s += std::to_string(r) + "," + std::to_string(c) + "," + std::to_string(g.at(c, r)) + "\n";
    }
  }
  return s;
}

std::string histogram_csv(const FrameHistogram& hist) {
  std::string s = "n,frames\n";
  for (const auto& [n, frames] : hist) s += std::to_string(n) + "," + std::to_string(frames) + "\n";
  return s;
}

std::string summary_text(const DatasetSummary& s, const HeatmapGrid& g) {
  char mean[32];
  std::snprintf(mean, sizeof mean, "%.4f", s.mean_boxes_per_frame);
  std::string t;
  t += "frames=" + std::to_string(s.frames) + "\n";
  t += "boxes=" + std::to_string(s.boxes) + "\n";
  t += "easy=" + std::to_string(s.per_difficulty[0]) + "\n";
  t += "moderate=" + std::to_string(s.per_difficulty[1]) + "\n";
  t += "hard=" + std::to_string(s.per_difficulty[2]) + "\n";
  t += "unknown=" + std::to_string(s.per_difficulty[3]) + "\n";
  t += std::string("mean_boxes_per_frame=") + mean + "\n";
  t += "heatmap_grid=" + std::to_string(g.cols) + "x" + std::to_string(g.rows) + "\n";
  t += "heatmap_clamped=" + std::to_string(g.clamped) + "\n";
  return t;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace

void write_stats(const std::filesystem::path& labels_dir, const std::filesystem::path& out_dir,
                 const StatsOptions& o) {
  const LabelSet labels = load_label_set(labels_dir);
  const HeatmapGrid grid = centroid_heatmap(labels, o.image_width, o.image_height, o.cols, o.rows);
  const FrameHistogram hist = detections_histogram(labels);
  const DatasetSummary summary = dataset_summary(labels);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  write_pgm(heatmap_image(grid), out_dir / "heatmap.pgm");
  write_text(out_dir / "heatmap.csv", heatmap_csv(grid));
  write_text(out_dir / "detections_hist.csv", histogram_csv(hist));
  write_text(out_dir / "summary.txt", summary_text(summary, grid));
}

}  // namespace matrixgt
