#pragma once

#include <vector>

#include "mhp/types.hpp"

namespace mhp {

// Region similarity: plain mask IoU, except that an empty prediction
// against an empty target counts as a perfect 1.0.
double region_similarity(const MaskGrid& prediction, const MaskGrid& truth);

// Boundary precision/recall F-measure.  Boundary pixels are set pixels
// with a missing 4-neighbour (grid borders count as missing).  A boundary
// pixel matches when some pixel of the other boundary lies within
// `tolerance` (Euclidean).  Both masks empty -> 1.0; exactly one empty ->
// 0.0; zero precision and recall -> 0.0.
double contour_accuracy(const MaskGrid& prediction, const MaskGrid& truth,
                        double tolerance);

// Conventional tolerance for a frame: ceil(0.008 * diagonal).
double default_contour_tolerance(int width, int height);

struct SeriesStats {
  double mean = 0.0;
  double recall = 0.0;  // fraction of values strictly above 0.5
  double decay = 0.0;   // mean of the first quarter minus mean of the last
};

// Summary over a per-frame score series; quarters are ceil(n/4) long.
SeriesStats aggregate_series(const std::vector<double>& values);

}  // namespace mhp
