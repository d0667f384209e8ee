#include <cmath>

#include "doctest.h"
#include "matrixgt/dataset.hpp"
#include "matrixgt/error.hpp"
#include "matrixgt/stats.hpp"
#include "matrixgt/rng.hpp"
#include "support/testutil.hpp"

using namespace matrixgt;

namespace {
KittiLabel box_at(double cx, double cy, double h = 50.0, std::string type = "Car") {
  KittiLabel l;
  l.type = std::move(type);
  l.bbox = {cx - 10, cy - h / 2, cx + 10, cy + h / 2};
  return l;
}
}  // namespace

TEST_CASE("heatmap examples") {
  const LabelSet one{{"000000", {box_at(320, 240)}}};
  const auto g = centroid_heatmap(one, 640, 480, 3, 3);
  for (std::uint32_t r = 0; r < 3; ++r)
    for (std::uint32_t c = 0; c < 3; ++c) CHECK(g.at(c, r) == (r == 1 && c == 1 ? 1u : 0u));
  CHECK(g.total() == 1);

  const auto none = centroid_heatmap(LabelSet{}, 640, 480, 3, 3);
  CHECK(none.total() == 0);
  CHECK(none.counts.size() == 9);
}

TEST_CASE("heatmap binning rules") {
  auto g = make_heatmap(640, 480, 4, 4);
  add_centroid(g, 160, 120);  // on the boundary between cells 0 and 1
  CHECK(g.at(0, 0) == 1);
  add_centroid(g, 160.001, 120);
  CHECK(g.at(1, 0) == 1);
  add_centroid(g, 0, 0);
  add_centroid(g, 640, 480);
  CHECK(g.at(0, 0) == 2);
  CHECK(g.at(3, 3) == 1);
  CHECK(g.clamped == 0);
  add_centroid(g, -30, 500);
  CHECK(g.at(0, 3) == 1);
  CHECK(g.clamped == 1);
  CHECK(g.total() == 5);

  const LabelSet mixed{{"000000", {box_at(100, 100), box_at(100, 100, 50, "DontCare")}}};
  CHECK(centroid_heatmap(mixed, 640, 480, 4, 4).total() == 1);
}

TEST_CASE("uniform centroids stay within three sigma per cell") {
  const int n = 10000;
  const double p = 1.0 / 16.0;
  const double sigma = std::sqrt(n * p * (1 - p));
  auto g = make_heatmap(640, 480, 4, 4);
  Xorshift64Star rng(2718);
  for (int i = 0; i < n; ++i) add_centroid(g, rng.uniform(0, 640), rng.uniform(0, 480));
  CHECK(g.total() == static_cast<std::uint64_t>(n));
  for (auto c : g.counts) CHECK(std::abs(static_cast<double>(c) - n * p) <= 3 * sigma);
}

TEST_CASE("detections histogram") {
  const LabelSet set{{"000000", {box_at(1, 1), box_at(2, 2)}},
                     {"000001", {box_at(1, 1), box_at(2, 2)}},
                     {"000002", {box_at(1, 1), box_at(2, 2), box_at(3, 3), box_at(4, 4, 30, "DontCare")}}};
  CHECK(detections_histogram(set) == FrameHistogram{{2, 2}, {3, 1}});
  CHECK(detections_histogram(LabelSet{}).empty());
  const LabelSet with_empty{{"000000", {}}, {"000001", {box_at(1, 1)}}};
  CHECK(detections_histogram(with_empty) == FrameHistogram{{0, 1}, {1, 1}});
  CHECK(histogram_csv(FrameHistogram{{2, 2}, {3, 1}}) == "n,frames\n2,2\n3,1\n");
}

TEST_CASE("dataset summary") {
  const LabelSet set{{"000000", {box_at(100, 100, 50), box_at(200, 200, 30)}}, {"000001", {box_at(300, 300, 10)}}};
  const auto s = dataset_summary(set);
  CHECK(s.frames == 2);
  CHECK(s.boxes == 3);
  CHECK(s.per_difficulty == std::array<std::size_t, 4>{1, 1, 0, 1});
  CHECK(s.mean_boxes_per_frame == doctest::Approx(1.5));
  const auto z = dataset_summary(LabelSet{});
  CHECK(z.frames == 0);
  CHECK(z.boxes == 0);
  CHECK(z.mean_boxes_per_frame == 0.0);
}

TEST_CASE("heatmap image") {
  auto g = make_heatmap(640, 480, 2, 1);
  CHECK(heatmap_image(g).samples()[0] == 0);
  add_centroid(g, 10, 10);
  add_centroid(g, 10, 10);
  add_centroid(g, 400, 10);
  const auto img = heatmap_image(g);
  CHECK(img.same_shape(2, 1));
  CHECK(img[0] == 255);
  CHECK(img[1] == 128);
  CHECK(heatmap_csv(g) == "row,col,count\n0,0,2\n0,1,1\n");
}

TEST_CASE("write_stats on directories") {
  test::TempDir labels, out, out2, empty_labels, empty_out;
  write_labels({box_at(100, 100), box_at(500, 400)}, labels / "000000.txt");
  write_labels({box_at(100, 100)}, labels / "000001.txt");
  write_labels({}, labels / "000002.txt");
  write_stats(labels.path(), out.path());
  write_stats(labels.path(), out2.path());
  CHECK(test::snapshot(out.path()) == test::snapshot(out2.path()));
  CHECK(test::snapshot(out.path()).size() == 4);
  CHECK(test::slurp(out / "detections_hist.csv") == "n,frames\n0,1\n1,1\n2,1\n");
  CHECK(test::slurp(out / "summary.txt").find("frames=3\n") != std::string::npos);

  write_stats(empty_labels.path(), empty_out.path());
  CHECK(test::slurp(empty_out / "detections_hist.csv") == "n,frames\n");
  CHECK(test::slurp(empty_out / "summary.txt").find("boxes=0\n") != std::string::npos);
  const auto pgm = test::slurp(empty_out / "heatmap.pgm");
  CHECK(pgm.rfind("P5\n48 27\n255\n", 0) == 0);
  CHECK(pgm.size() == 13 + 48 * 27);

  write_text_file(labels / "000003.txt", "Car 0 0\n");
  CHECK_THROWS_AS(write_stats(labels.path(), empty_out.path()), FormatError);
}
