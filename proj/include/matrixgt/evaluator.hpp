#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matrixgt/geometry.hpp"
#include "matrixgt/kitti.hpp"

namespace matrixgt {

struct Detection {
  std::uint32_t frame_id = 0;
  Box2 box;
  double score = 1.0;
};

struct GroundTruth {
  std::uint32_t frame_id = 0;
  Box2 box;
  Difficulty difficulty = Difficulty::Easy;
  bool dont_care = false;

  /// Counts toward recall at `level`; everything else is an ignore box.
  bool required_at(Difficulty level) const noexcept { return !dont_care && difficulty <= level; }
};

/// Continuous-area intersection over union; DomainError for zero-area inputs.
double iou(const Box2& a, const Box2& b);

enum class Outcome { TruePositive, FalsePositive, Ignored };

struct FrameMatch {
  std::vector<Outcome> outcomes;  ///< parallel to the input detections
  std::vector<bool> gt_matched;   ///< parallel to the input ground truth
};

/// Greedy matching: detections by descending score (ties: left, then top, then
/// input order) each take the best unmatched required GT with IoU >= threshold;
/// failing that, the best unmatched ignore GT (Ignored); otherwise FalsePositive.
FrameMatch match_frame(std::span<const Detection> dets, std::span<const GroundTruth> gts, double iou_threshold,
                       Difficulty level);

enum class ApMethod { ElevenPoint, AllPoint };

const char* ap_method_name(ApMethod m) noexcept;
ApMethod parse_ap_method(const std::string& s);

struct ScoredOutcome {
  double score = 0.0;
  Outcome outcome = Outcome::FalsePositive;
  Box2 box;  ///< tie-break key only
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct ApResult {
  std::optional<double> ap;  ///< absent when there is no required ground truth
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::vector<PrPoint> curve;
};

/// Ignored outcomes are dropped; the rest are ranked by descending score.
ApResult average_precision(std::span<const ScoredOutcome> outcomes, std::size_t required_gt_count,
                           ApMethod method = ApMethod::ElevenPoint);

struct LevelReport {
  Difficulty level = Difficulty::Easy;
  std::optional<double> ap;
  std::size_t tp = 0, fp = 0, fn = 0, gt_count = 0;
  std::vector<PrPoint> curve;
};

struct EvalReport {
  double iou_threshold = 0.7;
  ApMethod method = ApMethod::ElevenPoint;
  std::size_t frames = 0;
  std::array<LevelReport, 3> levels;
};

struct FrameLabels {
  std::vector<KittiLabel> detections;
  std::vector<KittiLabel> ground_truth;
};

/// Evaluates in-memory frames keyed by frame name.
EvalReport evaluate_frames(const std::map<std::string, FrameLabels>& frames, double iou_threshold = 0.7,
                           ApMethod method = ApMethod::ElevenPoint, const DifficultyThresholds& thresholds = {});

/// Evaluates two label directories. ValidationError when their frame sets differ.
EvalReport evaluate(const std::filesystem::path& det_dir, const std::filesystem::path& gt_dir,
                    double iou_threshold = 0.7, ApMethod method = ApMethod::ElevenPoint,
                    const DifficultyThresholds& thresholds = {});

std::string format_report(const EvalReport& report);
/// Columns level,ap,tp,fp,fn,gt_count; ap is "n/a" when absent.
std::string report_csv(const EvalReport& report);

}  // namespace matrixgt
