#include "mhp/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "mhp/geometry.hpp"

namespace mhp {

double motion_score(const BBox& current, const BBox& previous_same,
                    std::span<const BBox> rivals, double continuity_weight,
                    double competition_weight) {
  double best_rival = 0.0;
  bool any = false;
  for (const auto& r : rivals) {
    best_rival = std::max(best_rival, bbox_iou(current, r));
    any = true;
  }
  const double own = bbox_iou(current, previous_same);
  return continuity_weight * own + (any ? competition_weight * best_rival : 0.0);
}

double propagation_score(const MaskGrid& current, const MaskGrid& previous,
                         const FlowField& flow) {
  return mask_iou(current, warp_mask(previous, flow));
}

double step_score(bool is_root, double motion, double propagation, const Params& p) {
  if (is_root) return std::log(1.0 - p.detection_prob);
  return p.motion_weight * motion + p.propagation_weight * propagation;
}

}  // namespace mhp
