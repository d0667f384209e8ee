// matrixgt: generate synthetic frames, annotate them, and evaluate/describe label sets.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "matrixgt/dataset.hpp"
#include "matrixgt/error.hpp"
#include "matrixgt/evaluator.hpp"
#include "matrixgt/pipeline.hpp"
#include "matrixgt/stats.hpp"

namespace fs = std::filesystem;
using namespace matrixgt;

namespace {

enum Exit { kOk = 0, kConfig = 2, kIo = 3, kValidation = 4 };

int exit_code(const Error& e) {
  switch (e.kind()) {
    case Error::Kind::Io: return kIo;
    case Error::Kind::Validation: return kValidation;
    default: return kConfig;
  }
}

std::pair<std::uint32_t, std::uint32_t> parse_dims(const std::string& s, const char* what) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    std::size_t used_a = 0, used_b = 0;
    const std::string a = s.substr(0, x), b = s.substr(x + 1);
    const long c = std::stol(a, &used_a);
    const long r = std::stol(b, &used_b);
    if (used_a != a.size() || used_b != b.size() || c < 1 || r < 1) throw std::invalid_argument(s);
    return {static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(r)};
  } catch (const std::exception&) {
    throw ConfigError(std::string("bad ") + what + " '" + s + "' (expected AxB with positive integers)");
  }
}

void require_dir(const fs::path& p, const char* what) {
  if (!fs::is_directory(p)) throw IoError(std::string(what) + " is not a directory: " + p.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic ground-truth forge: render, annotate, evaluate"};
  app.require_subcommand(1);

  unsigned workers = 0;

  std::string scenario, out;
  auto* gen = app.add_subcommand("generate", "Render a dataset directory from a scenario file");
  gen->add_option("--scenario", scenario, "key=value scenario file")->required();
  gen->add_option("--out", out, "output dataset directory")->required();
  gen->add_option("--workers", workers, "worker threads (0 = auto)");

  std::string in, labels_out;
  RefinementParams params;
  auto* ann = app.add_subcommand("annotate", "Refine engine boxes into tight KITTI labels");
  ann->add_option("--in", in, "dataset directory")->required();
  ann->add_option("--out", labels_out, "labels directory")->required();
  ann->add_option("--rho", params.rho, "relative depth band");
  ann->add_option("--iterations", params.iterations, "mean re-estimation passes");
  ann->add_option("--min-px", params.min_component_px, "minimum orphan component size");
  ann->add_option("--margin", params.coarse_box_margin_px, "coarse box dilation in pixels");
  ann->add_option("--extent-margin", params.extent_margin, "weight of the object depth extent in the band");
  bool window_seed = false;
  ann->add_flag("--window-seed", window_seed, "seed the depth mean from the whole candidate window");
  ann->add_option("--workers", workers, "worker threads (0 = auto)");

  auto* orc = app.add_subcommand("oracle-labels", "Reference labels from the withheld instance buffers");
  orc->add_option("--in", in, "dataset directory")->required();
  orc->add_option("--out", labels_out, "labels directory")->required();
  orc->add_option("--workers", workers, "worker threads (0 = auto)");

  std::string det_dir, gt_dir, report_dir = ".", ap_method = "11pt";
  double iou_thr = 0.7;
  auto* ev = app.add_subcommand("evaluate", "Difficulty-binned average precision of detections vs ground truth");
  ev->add_option("--det", det_dir, "detection labels directory")->required();
  ev->add_option("--gt", gt_dir, "ground-truth labels directory")->required();
  ev->add_option("--iou", iou_thr, "IoU threshold");
  ev->add_option("--ap", ap_method, "11pt or all");
  ev->add_option("--out", report_dir, "directory for report.csv");

  std::string labels_dir, stats_out, grid = "48x27", image = "640x480";
  auto* st = app.add_subcommand("stats", "Centroid heatmap, detections histogram and summary");
  st->add_option("--labels", labels_dir, "labels directory")->required();
  st->add_option("--out", stats_out, "output directory")->required();
  st->add_option("--grid", grid, "heatmap grid COLSxROWS");
  st->add_option("--image", image, "image size WIDTHxHEIGHT the grid divides");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*gen) {
      const ScenarioConfig cfg = load_scenario(scenario);
      generate_dataset(cfg, out, resolve_workers(workers));
      std::cout << "wrote " << cfg.frames << " frames to " << out << "\n";
    } else if (*ann) {
      params.record_seed = !window_seed;
      params.validate();
      require_dir(in, "--in");
      annotate_dataset(in, labels_out, params, resolve_workers(workers));
    } else if (*orc) {
      require_dir(in, "--in");
      oracle_labels_dataset(in, labels_out, resolve_workers(workers));
    } else if (*ev) {
      const ApMethod method = parse_ap_method(ap_method);
      if (!(iou_thr > 0.0 && iou_thr <= 1.0)) throw ConfigError("--iou must lie in (0, 1]");
      require_dir(det_dir, "--det");
      require_dir(gt_dir, "--gt");
      const EvalReport report = evaluate(det_dir, gt_dir, iou_thr, method);
      std::cout << format_report(report);
      fs::create_directories(report_dir);
      write_text_file(fs::path(report_dir) / "report.csv", report_csv(report));
    } else if (*st) {
      StatsOptions o;
      std::tie(o.cols, o.rows) = parse_dims(grid, "--grid");
      const auto [iw, ih] = parse_dims(image, "--image");
      o.image_width = iw;
      o.image_height = ih;
      require_dir(labels_dir, "--labels");
      write_stats(labels_dir, stats_out, o);
    }
  } catch (const Error& e) {
    std::cerr << "matrixgt: " << e.what() << "\n";
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "matrixgt: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
