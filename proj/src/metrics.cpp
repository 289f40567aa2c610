#include "mhp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mhp/geometry.hpp"

namespace mhp {

double region_similarity(const MaskGrid& prediction, const MaskGrid& truth) {
  if (!prediction.same_shape(truth))
    throw std::invalid_argument("region_similarity: shape mismatch");
  if (prediction.empty_mask() && truth.empty_mask()) return 1.0;
  return mask_iou(prediction, truth);
}

namespace {

struct Pixel {
  int x, y;
};

std::vector<Pixel> boundary_pixels(const MaskGrid& mask) {
  std::vector<Pixel> out;
  const int w = mask.width, h = mask.height;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      const bool edge = x == 0 || y == 0 || x == w - 1 || y == h - 1;
      if (edge || !mask.at(x - 1, y) || !mask.at(x + 1, y) || !mask.at(x, y - 1) ||
          !mask.at(x, y + 1))
        out.push_back({x, y});
    }
  return out;
}

double matched_fraction(const std::vector<Pixel>& from, const std::vector<Pixel>& to,
                        double tolerance) {
  const double tol2 = tolerance * tolerance;
  std::size_t matched = 0;
  for (const auto& p : from) {
    for (const auto& q : to) {
      const double dx = p.x - q.x;
      const double dy = p.y - q.y;
      if (dx * dx + dy * dy <= tol2) {
        ++matched;
        break;
      }
    }
  }
  return static_cast<double>(matched) / static_cast<double>(from.size());
}

}  // namespace

double contour_accuracy(const MaskGrid& prediction, const MaskGrid& truth,
                        double tolerance) {
  if (!prediction.same_shape(truth))
    throw std::invalid_argument("contour_accuracy: shape mismatch");
  if (tolerance < 0.0)
    throw std::invalid_argument("contour_accuracy: negative tolerance");
  const bool pe = prediction.empty_mask(), te = truth.empty_mask();
  if (pe && te) return 1.0;
  if (pe || te) return 0.0;
  const auto pb = boundary_pixels(prediction);
  const auto tb = boundary_pixels(truth);
  const double precision = matched_fraction(pb, tb, tolerance);
  const double recall = matched_fraction(tb, pb, tolerance);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double default_contour_tolerance(int width, int height) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("default_contour_tolerance: empty frame");
  const double diag = std::sqrt(static_cast<double>(width) * width +
                                static_cast<double>(height) * height);
  return std::ceil(0.008 * diag);
}

SeriesStats aggregate_series(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("aggregate_series: empty series");
  const std::size_t n = values.size();
  SeriesStats stats;
  double sum = 0.0;
  std::size_t above = 0;
  for (double v : values) {
    sum += v;
    if (v > 0.5) ++above;
  }
  stats.mean = sum / static_cast<double>(n);
  stats.recall = static_cast<double>(above) / static_cast<double>(n);

  const std::size_t quarter = (n + 3) / 4;  // ceil(n/4)
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < quarter; ++i) head += values[i];
  for (std::size_t i = n - quarter; i < n; ++i) tail += values[i];
  stats.decay = head / static_cast<double>(quarter) - tail / static_cast<double>(quarter);
  return stats;
}

}  // namespace mhp
