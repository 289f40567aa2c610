#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mhp/gating.hpp"
#include "mhp/geometry.hpp"
#include "mhp/rng.hpp"

using namespace mhp;

namespace {

TrackHistory history_from_centers(const std::vector<Vec2>& centers, double w, double h) {
  TrackHistory history;
  for (const auto& c : centers) history.push(box_from_center(c, {w, h}));
  return history;
}

}  // namespace

TEST_CASE("velocity is the mean of recent centre steps") {
  const auto history = history_from_centers({{0, 0}, {2, 0}, {4, 0}}, 4, 4);
  const Vec2 v = estimate_velocity(history, 3);
  CHECK(v.x == doctest::Approx(2.0));
  CHECK(v.y == doctest::Approx(0.0));
}

TEST_CASE("velocity window shrinks for young tracks") {
  // only one displacement available even though the window asks for three
  const auto two = history_from_centers({{0, 0}, {5, 1}}, 4, 4);
  const Vec2 v2 = estimate_velocity(two, 3);
  CHECK(v2.x == doctest::Approx(5.0));
  CHECK(v2.y == doctest::Approx(1.0));

  const auto one = history_from_centers({{7, 7}}, 4, 4);
  const Vec2 v1 = estimate_velocity(one, 3);
  CHECK(v1.x == 0.0);
  CHECK(v1.y == 0.0);
}

TEST_CASE("velocity uses only the last `window` steps") {
  // steps: (10,0), (2,0), (2,0); window 2 ignores the early jump
  const auto history = history_from_centers({{0, 0}, {10, 0}, {12, 0}, {14, 0}}, 4, 4);
  const Vec2 v = estimate_velocity(history, 2);
  CHECK(v.x == doctest::Approx(2.0));
}

TEST_CASE("estimate_velocity rejects bad input") {
  CHECK_THROWS_AS(estimate_velocity(TrackHistory{}, 3), std::invalid_argument);
  const auto h = history_from_centers({{0, 0}}, 4, 4);
  CHECK_THROWS_AS(estimate_velocity(h, 0), std::invalid_argument);
}

TEST_CASE("predicted box extrapolates the centre and averages sizes") {
  const auto history = history_from_centers({{0, 0}, {2, 0}, {4, 0}}, 4, 4);
  const BBox p = predict_candidate(history, 3);
  CHECK(p.center_x() == doctest::Approx(6.0));
  CHECK(p.center_y() == doctest::Approx(0.0));
  CHECK(p.width() == doctest::Approx(4.0));
  CHECK(p.height() == doctest::Approx(4.0));
}

TEST_CASE("predicted size averages the last window of sizes") {
  TrackHistory history;
  history.push(box_from_center({0, 0}, {4, 4}));
  history.push(box_from_center({1, 0}, {6, 6}));
  history.push(box_from_center({2, 0}, {8, 8}));
  const BBox p = predict_candidate(history, 2);  // mean of 6 and 8
  CHECK(p.width() == doctest::Approx(7.0));
  // velocity from the last two steps: both (1, 0)
  CHECK(p.center_x() == doctest::Approx(3.0));
}

TEST_CASE("gate splits strictly above the threshold") {
  const BBox prediction{0, 0, 10, 10};
  std::vector<Proposal> proposals = {
      {{0, 0, 10, 10}, 0.9, 1, 0},   // iou 1.0
      {{5, 0, 15, 10}, 0.9, 1, 1},   // iou 50/150 = 1/3
      {{20, 20, 30, 30}, 0.9, 1, 2}, // iou 0
  };
  const auto r = gate(prediction, proposals, 1.0 / 3.0);
  REQUIRE(r.inside.size() == 1);  // exactly 1/3 is not strictly above
  CHECK(r.inside[0].proposal_id == 0);
  REQUIRE(r.outside.size() == 2);
  CHECK(r.outside[0].proposal_id == 1);
  CHECK(r.outside[1].proposal_id == 2);
}

TEST_CASE("gate acceptance shrinks monotonically with the threshold") {
  rng::Stream stream(2024);
  const BBox prediction{20, 20, 40, 40};
  std::vector<Proposal> proposals;
  for (int i = 0; i < 40; ++i) {
    const double cx = stream.next_range(10, 50);
    const double cy = stream.next_range(10, 50);
    const double w = stream.next_range(5, 30);
    const double h = stream.next_range(5, 30);
    proposals.push_back({box_from_center({cx, cy}, {w, h}), 0.9, 1, i});
  }
  std::size_t previous = proposals.size() + 1;
  for (int step = 0; step <= 20; ++step) {
    const double threshold = step * 0.05;
    const auto r = gate(prediction, proposals, threshold);
    CHECK(r.inside.size() + r.outside.size() == proposals.size());
    CHECK(r.inside.size() <= previous);
    previous = r.inside.size();
    if (threshold >= 1.0) CHECK(r.inside.empty());
  }
}
