#include "matrixgt/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "matrixgt/error.hpp"

namespace matrixgt {

double iou(const Box2& a, const Box2& b) {
  if (!a.well_ordered() || !b.well_ordered()) throw DomainError("IoU of a zero-area box");
  const double inter = intersect(a, b).area();
  if (inter <= 0.0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

namespace {

template <typename Item>
bool ranks_before(const Item& a, const Item& b, double sa, double sb) {
  if (sa != sb) return sa > sb;
  if (a.box.left != b.box.left) return a.box.left < b.box.left;
  return a.box.top < b.box.top;
}

}  // namespace

FrameMatch match_frame(std::span<const Detection> dets, std::span<const GroundTruth> gts, double iou_threshold,
                       Difficulty level) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return ranks_before(dets[i], dets[j], dets[i].score, dets[j].score);
  });

  FrameMatch m;
  m.outcomes.assign(dets.size(), Outcome::FalsePositive);
  m.gt_matched.assign(gts.size(), false);

  for (std::size_t di : order) {
    std::optional<std::size_t> best_required, best_ignore;
    double best_required_iou = -1.0, best_ignore_iou = -1.0;
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (m.gt_matched[gi]) continue;
      const double o = iou(dets[di].box, gts[gi].box);
      if (o < iou_threshold) continue;
      if (gts[gi].required_at(level)) {
        if (o > best_required_iou) {
          best_required_iou = o;
          best_required = gi;
        }
      } else if (o > best_ignore_iou) {
        best_ignore_iou = o;
        best_ignore = gi;
      }
    }
    if (best_required) {
      m.gt_matched[*best_required] = true;
      m.outcomes[di] = Outcome::TruePositive;
    } else if (best_ignore) {
      m.gt_matched[*best_ignore] = true;
      m.outcomes[di] = Outcome::Ignored;
    }
  }
  return m;
}

const char* ap_method_name(ApMethod m) noexcept { return m == ApMethod::ElevenPoint ? "11pt" : "all"; }

ApMethod parse_ap_method(const std::string& s) {
  if (s == "11pt") return ApMethod::ElevenPoint;
  if (s == "all") return ApMethod::AllPoint;
  throw ConfigError("unknown AP method '" + s + "' (expected 11pt or all)");
}

ApResult average_precision(std::span<const ScoredOutcome> outcomes, std::size_t required_gt_count, ApMethod method) {
  std::vector<ScoredOutcome> ranked;
  for (const auto& o : outcomes) {
    if (o.outcome != Outcome::Ignored) ranked.push_back(o);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const ScoredOutcome& a, const ScoredOutcome& b) {
    return ranks_before(a, b, a.score, b.score);
  });

  ApResult r;
  for (const auto& o : ranked) {
    if (o.outcome == Outcome::TruePositive) {
      ++r.tp;
    } else {
      ++r.fp;
    }
    if (required_gt_count > 0) {
      r.curve.push_back({static_cast<double>(r.tp) / static_cast<double>(required_gt_count),
                         static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp)});
    }
  }
  if (required_gt_count == 0) return r;

  // Precision envelope: best precision at any recall >= this point's.
  std::vector<double> envelope(r.curve.size());
  double best = 0.0;
  for (std::size_t i = r.curve.size(); i-- > 0;) {
    best = std::max(best, r.curve[i].precision);
    envelope[i] = best;
  }

  double ap = 0.0;
  if (method == ApMethod::ElevenPoint) {
    for (int k = 0; k <= 10; ++k) {
      const double level = k / 10.0;
      // Curve recall is non-decreasing, so the first point reaching `level` carries the max.
      auto it = std::find_if(r.curve.begin(), r.curve.end(),
                             [&](const PrPoint& p) { return p.recall >= level - 1e-12; });
      if (it != r.curve.end()) ap += envelope[static_cast<std::size_t>(it - r.curve.begin())];
    }
    ap /= 11.0;
  } else {
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < r.curve.size(); ++i) {
      if (r.curve[i].recall > prev_recall) {
        ap += (r.curve[i].recall - prev_recall) * envelope[i];
        prev_recall = r.curve[i].recall;
      }
    }
  }
  r.ap = std::clamp(ap, 0.0, 1.0);
  return r;
}

namespace {
void check_threshold(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw ConfigError("IoU threshold must lie in (0, 1]");
}
}  // namespace

EvalReport evaluate_frames(const std::map<std::string, FrameLabels>& frames, double iou_threshold, ApMethod method,
                           const DifficultyThresholds& thresholds) {
  check_threshold(iou_threshold);
  EvalReport report;
  report.iou_threshold = iou_threshold;
  report.method = method;
  report.frames = frames.size();

  struct Prepared {
    std::vector<Detection> dets;
    std::vector<GroundTruth> gts;
  };
  std::vector<Prepared> prepared;
  std::uint32_t frame_index = 0;
  for (const auto& [name, labels] : frames) {
    Prepared p;
    for (const auto& l : labels.detections) {
      if (l.type != "Car") continue;
      if (!l.bbox.well_ordered()) throw DomainError(name + ": detection with malformed bbox");
      p.dets.push_back({frame_index, l.bbox, l.score.value_or(1.0)});
    }
    for (const auto& l : labels.ground_truth) {
      GroundTruth g;
      g.frame_id = frame_index;
      g.box = l.bbox;
      if (l.type == "Car") {
        g.difficulty = classify_difficulty(l, thresholds);
      } else {
        // DontCare and any other class only absorb detections.
        if (!l.bbox.well_ordered()) continue;
        g.dont_care = true;
        g.difficulty = Difficulty::Unknown;
      }
      p.gts.push_back(g);
    }
    prepared.push_back(std::move(p));
    ++frame_index;
  }

  for (std::size_t li = 0; li < kEvaluatedLevels.size(); ++li) {
    const Difficulty level = kEvaluatedLevels[li];
    std::vector<ScoredOutcome> outcomes;
    std::size_t required = 0;
    for (const auto& p : prepared) {
      for (const auto& g : p.gts) required += g.required_at(level) ? 1 : 0;
      const FrameMatch m = match_frame(p.dets, p.gts, iou_threshold, level);
      for (std::size_t i = 0; i < p.dets.size(); ++i) outcomes.push_back({p.dets[i].score, m.outcomes[i], p.dets[i].box});
    }
    const ApResult ap = average_precision(outcomes, required, method);
    LevelReport& lr = report.levels[li];
    lr.level = level;
    lr.ap = ap.ap;
    lr.tp = ap.tp;
    lr.fp = ap.fp;
    lr.gt_count = required;
    lr.fn = required - ap.tp;
    lr.curve = ap.curve;
  }
  return report;
}

EvalReport evaluate(const std::filesystem::path& det_dir, const std::filesystem::path& gt_dir, double iou_threshold,
                    ApMethod method, const DifficultyThresholds& thresholds) {
  check_threshold(iou_threshold);
  const auto det_frames = list_label_frames(det_dir);
  const auto gt_frames = list_label_frames(gt_dir);
  if (det_frames != gt_frames) {
    const std::set<std::string> d(det_frames.begin(), det_frames.end());
    const std::set<std::string> g(gt_frames.begin(), gt_frames.end());
    std::string msg = "label directories hold different frame sets;";
    for (const auto& f : g) {
      if (!d.count(f)) msg += " missing " + (det_dir / (f + ".txt")).string() + ";";
    }
    for (const auto& f : d) {
      if (!g.count(f)) msg += " missing " + (gt_dir / (f + ".txt")).string() + ";";
    }
    throw ValidationError(msg);
  }
  std::map<std::string, FrameLabels> frames;
  for (const auto& f : gt_frames) {
    frames[f] = {parse_labels(det_dir / (f + ".txt")), parse_labels(gt_dir / (f + ".txt"))};
  }
  return evaluate_frames(frames, iou_threshold, method, thresholds);
}

namespace {

std::string ap_text(const std::optional<double>& ap) {
  if (!ap) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *ap);
  return buf;
}

}  // namespace

std::string format_report(const EvalReport& r) {
  char head[128];
  std::snprintf(head, sizeof head, "IoU threshold: %.2f  AP method: %s  frames: %zu\n", r.iou_threshold,
                ap_method_name(r.method), r.frames);
  std::string s = head;
  s += "level      AP        TP      FP      FN      GT\n";
  for (const auto& lr : r.levels) {
    char row[160];
    std::snprintf(row, sizeof row, "%-10s %-9s %-7zu %-7zu %-7zu %zu\n", difficulty_name(lr.level),
                  ap_text(lr.ap).c_str(), lr.tp, lr.fp, lr.fn, lr.gt_count);
    s += row;
  }
  return s;
}

std::string report_csv(const EvalReport& r) {
  std::string s = "level,ap,tp,fp,fn,gt_count\n";
  for (const auto& lr : r.levels) {
    s += std::string(difficulty_name(lr.level)) + "," + ap_text(lr.ap) + "," + std::to_string(lr.tp) + "," +
         std::to_string(lr.fp) + "," + std::to_string(lr.fn) + "," + std::to_string(lr.gt_count) + "\n";
  }
  return s;
}

}  // namespace matrixgt
