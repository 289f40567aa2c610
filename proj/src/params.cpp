#include "mhp/params.hpp"

#include <cmath>
#include <string>

namespace mhp {

namespace {

void require(bool ok, const char* rule) {
  if (!ok) throw std::invalid_argument(std::string("invalid params: ") + rule);
}

bool unit_range(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

Params validate_params(const Params& p) {
  require(unit_range(p.proposal_conf_min), "proposal_conf_min must lie in [0,1]");
  require(unit_range(p.nms_iou), "nms_iou must lie in [0,1]");
  require(unit_range(p.gate_iou), "gate_iou must lie in [0,1]");
  require(p.history_window >= 1, "history_window must be at least 1");
  require(unit_range(p.motion_weight), "motion_weight must lie in [0,1]");
  require(std::abs(p.propagation_weight - (1.0 - p.motion_weight)) <= 1e-12,
          "w_p must equal 1-w_m");
  require(p.continuity_weight >= 0.0, "continuity_weight must be non-negative");
  require(p.competition_weight <= 0.0, "competition_weight must be non-positive");
  require(p.detection_prob > 0.0 && p.detection_prob < 1.0,
          "detection_prob must lie strictly inside (0,1)");
  require(unit_range(p.mask_threshold), "mask_threshold must lie in [0,1]");
  require(p.crop_margin >= 0.0, "crop_margin must be non-negative");
  require(p.merge_margin > 0.0, "merge_margin must be positive");
  require(p.scan_depth >= 1, "scan_depth must be at least 1");
  require(p.branch_cap >= 1, "branch_cap must be at least 1");
  require(p.pls_iterations >= 1, "pls_iterations must be at least 1");
  return p;
}

}  // namespace mhp
