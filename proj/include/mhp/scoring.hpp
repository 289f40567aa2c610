#pragma once

#include <span>

#include "mhp/params.hpp"
#include "mhp/types.hpp"

namespace mhp {

// Box-level evidence for attaching `current` to a track whose previous box
// was `previous_same`: reward overlap with the own track, penalise overlap
// with the best-overlapping rival box (0 when there are no rivals).
//   score = w_f * iou(current, previous_same) + w_n * max_i iou(current, rival_i)
double motion_score(const BBox& current, const BBox& previous_same,
                    std::span<const BBox> rivals, double continuity_weight,
                    double competition_weight);

// Mask-level evidence: IoU between the candidate mask and the previous
// mask carried into this frame by the flow field.
double propagation_score(const MaskGrid& current, const MaskGrid& previous,
                         const FlowField& flow);

// One node's contribution to its path score.  Roots (track births and
// restarts after a missed detection) pay ln(1 - detection_prob) instead of
// blending the two evidence terms.
double step_score(bool is_root, double motion, double propagation, const Params& p);

// Path scores accumulate parent-to-child by plain addition.
inline double accumulate_score(double parent_cumulative, double step) {
  return parent_cumulative + step;
}

}  // namespace mhp
