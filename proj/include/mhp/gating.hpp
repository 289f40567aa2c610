#pragma once

#include <vector>

#include "mhp/types.hpp"

namespace mhp {

// Recent geometry of one track, oldest entry first.
struct TrackHistory {
  struct Entry {
    Vec2 center;
    Vec2 size;
  };
  std::vector<Entry> entries;

  void push(const BBox& box) { entries.push_back({box.center(), box.size()}); }
  bool empty() const { return entries.empty(); }
};

// Mean of the last `window` consecutive centre displacements (fewer when
// the track is younger).  A single-entry history has no displacement and
// yields (0, 0).
Vec2 estimate_velocity(const TrackHistory& history, int window);

// Constant-velocity prediction for the next frame: last centre plus the
// estimated velocity, sized by the mean of the last `window` box sizes.
BBox predict_candidate(const TrackHistory& history, int window);

struct GateResult {
  std::vector<Proposal> inside;
  std::vector<Proposal> outside;
};

// Splits proposals by overlap with the predicted box: a proposal passes
// the gate iff IoU(proposal, prediction) is strictly above gate_iou.
// Input order is preserved within each bucket.
GateResult gate(const BBox& prediction, const std::vector<Proposal>& proposals,
                double gate_iou);

}  // namespace mhp
