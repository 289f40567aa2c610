#pragma once

#include <stdexcept>

namespace mhp {

enum class BranchCapMode {
  PerTreeLeaves,   // keep the best `branch_cap` leaves in each tree
  PerNodeChildren  // keep the best `branch_cap` children under each node
};

// Tuning knobs for the whole engine, with the defaults the rest of the
// code base (and the tests) assume.  See validate_params for the rules
// that keep them mutually consistent.
struct Params {
  // proposal filtering
  double proposal_conf_min = 0.05;  // discard detections at or below this confidence
  double nms_iou = 0.6;             // greedy suppression threshold

  // gating / motion model
  double gate_iou = 0.3;    // candidate vs. prediction overlap needed to attach
  int history_window = 3;   // boxes considered when estimating velocity / size

  // step scoring
  double motion_weight = 0.3;        // share of the step score taken from boxes
  double propagation_weight = 0.7;   // share taken from mask propagation (1 - motion_weight)
  double continuity_weight = 1.0;    // reward for overlapping the same track's previous box
  double competition_weight = -0.4;  // penalty for overlapping a rival's previous box
  double detection_prob = 0.9;       // detector reliability; sets the root / miss score
  bool cross_object_penalty = true;  // rivals include other objects' frontier boxes

  // segmentation
  double mask_threshold = 0.3;  // probability above which a pixel is foreground
  double crop_margin = 0.15;    // box expansion ratio before mask generation
  double merge_margin = 0.8;    // dominance factor required to win a disputed patch

  // tree maintenance
  int scan_depth = 3;                                  // N-scan decision delay
  int branch_cap = 50;                                 // survivors per tree (or per node)
  BranchCapMode cap_mode = BranchCapMode::PerTreeLeaves;

  // solver
  int pls_iterations = 10000;  // local-search budget per solve
};

// Returns its argument if every constraint holds, otherwise throws
// std::invalid_argument naming the first violated rule.
Params validate_params(const Params& p);

}  // namespace mhp
