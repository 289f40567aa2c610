#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>


#include "mhp/gating.hpp"
#include "mhp/params.hpp"
#include "mhp/segmentation.hpp"
#include "mhp/types.hpp"

namespace mhp {

// proposal_id used for the annotated first-frame root, which no detector produced
inline constexpr int kAnnotationProposalId = -1;

struct HypothesisNode {
  Proposal proposal;
  MaskGrid mask;                 // thresholded mask this hypothesis carries
  double step_score = 0.0;       // this node's own contribution
  double cumulative_score = 0.0; // sum along the root path, ends here
  HypothesisNode* parent = nullptr;
  std::vector<std::unique_ptr<HypothesisNode>> children;

  int frame() const { return proposal.frame_index; }
  bool is_root() const { return parent == nullptr; }
  bool is_leaf() const { return children.empty(); }
};

// All hypothesis trees for a single object.  Tree 0 is rooted at the
// first-frame annotation; later trees are restarts seeded from proposals
// that no existing leaf could claim.
struct HypothesisForest {
  int object_id = 0;
  int width = 0;
  int height = 0;
  int current_frame = 0;  // latest frame the forest has been extended to
  std::vector<std::unique_ptr<HypothesisNode>> roots;
  const HypothesisNode* annotation_root = nullptr;  // null once that tree is gone

  void for_each_node(const std::function<void(const HypothesisNode&)>& fn) const;
  std::vector<HypothesisNode*> leaves();
  std::vector<HypothesisNode*> frontier_leaves(int frame);  // leaves at that frame
  std::size_t node_count() const;
  std::size_t leaf_count() const;
};

// Builds the forest for one object from its first-frame annotation.
HypothesisForest init_forest(int object_id, const BBox& annotation_box,
                             const MaskGrid& annotation_mask, const Params& params);

// Grows the forest by one frame.  For every frontier leaf: predict a box
// from the leaf's recent path, gate the frame's proposals against it, and
// attach one child per accepted proposal (mask generated from the leaf's
// mask warped by `flow`, which maps the previous frame onto this one).
// Proposals rejected by every leaf found a new tree with a blank prior.
// `rival_boxes` are other objects' frontier boxes for the competition
// term; the leaf's own siblings are collected internally.
void extend(HypothesisForest& forest, const std::vector<Proposal>& proposals,
            const FlowField& flow, const MaskGenerator& generator,
            const Params& params, std::span<const BBox> rival_boxes = {});

// Enforces the branch budget.  PerTreeLeaves keeps the `branch_cap` best
// leaves of each tree by cumulative score (ties broken toward older
// frames, then smaller proposal ids) and drops every node that no longer
// leads to a kept leaf.  PerNodeChildren instead keeps the best
// `branch_cap` children under every node.
void cap_branches(HypothesisForest& forest, const Params& params);

// Box history along the path ending at `node` (root .. node), at most
// `max_entries` most recent boxes, oldest first.
TrackHistory path_history(const HypothesisNode* node, int max_entries);

}  // namespace mhp
