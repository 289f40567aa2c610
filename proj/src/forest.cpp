#include "mhp/forest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mhp/geometry.hpp"
#include "mhp/scoring.hpp"

namespace mhp {

namespace {

void visit(const HypothesisNode& node,
           const std::function<void(const HypothesisNode&)>& fn) {
  fn(node);
  for (const auto& child : node.children) visit(*child, fn);
}

void collect_leaves(HypothesisNode* node, std::vector<HypothesisNode*>& out) {
  if (node->is_leaf()) {
    out.push_back(node);
    return;
  }
  for (auto& child : node->children) collect_leaves(child.get(), out);
}

}  // namespace

void HypothesisForest::for_each_node(
    const std::function<void(const HypothesisNode&)>& fn) const {
  for (const auto& root : roots) visit(*root, fn);
}

std::vector<HypothesisNode*> HypothesisForest::leaves() {
  std::vector<HypothesisNode*> out;
  for (auto& root : roots) collect_leaves(root.get(), out);
  return out;
}

std::vector<HypothesisNode*> HypothesisForest::frontier_leaves(int frame) {
  std::vector<HypothesisNode*> out;
  for (auto& root : roots) collect_leaves(root.get(), out);
  std::erase_if(out, [frame](HypothesisNode* n) { return n->frame() != frame; });
  return out;
}

std::size_t HypothesisForest::node_count() const {
  std::size_t n = 0;
  for_each_node([&n](const HypothesisNode&) { ++n; });
  return n;
}

std::size_t HypothesisForest::leaf_count() const {
  std::size_t n = 0;
  for_each_node([&n](const HypothesisNode& node) { n += node.is_leaf(); });
  return n;
}

HypothesisForest init_forest(int object_id, const BBox& annotation_box,
                             const MaskGrid& annotation_mask, const Params& params) {
  if (!annotation_box.valid())
    throw std::invalid_argument("init_forest: degenerate annotation box");
  if (annotation_mask.width <= 0 || annotation_mask.height <= 0)
    throw std::invalid_argument("init_forest: empty annotation grid");
  if (annotation_mask.empty_mask())
    throw std::invalid_argument("init_forest: annotation mask has no foreground");
  // the box must cover every annotated pixel
  for (int y = 0; y < annotation_mask.height; ++y)
    for (int x = 0; x < annotation_mask.width; ++x)
      if (annotation_mask.at(x, y) && !box_contains_pixel(annotation_box, x, y))
        throw std::invalid_argument(
            "init_forest: annotation box does not enclose the mask");

  HypothesisForest forest;
  forest.object_id = object_id;
  forest.width = annotation_mask.width;
  forest.height = annotation_mask.height;
  forest.current_frame = 0;

  auto root = std::make_unique<HypothesisNode>();
  root->proposal = Proposal{annotation_box, 1.0, 0, kAnnotationProposalId};
  root->mask = annotation_mask;
  root->step_score = step_score(true, 0.0, 0.0, params);
  root->cumulative_score = root->step_score;
  forest.annotation_root = root.get();
  forest.roots.push_back(std::move(root));
  return forest;
}

void extend(HypothesisForest& forest, const std::vector<Proposal>& proposals,
            const FlowField& flow, const MaskGenerator& generator,
            const Params& params, std::span<const BBox> rival_boxes) {
  const int t = forest.current_frame + 1;
  for (const auto& p : proposals) {
    if (p.frame_index != t)
      throw std::invalid_argument("extend: proposal frame does not follow the forest");
    if (!p.box.valid()) throw std::invalid_argument("extend: degenerate proposal box");
  }
  if (flow.width != forest.width || flow.height != forest.height)
    throw std::invalid_argument("extend: flow shape mismatch");

  const auto frontier = forest.frontier_leaves(forest.current_frame);
  const int leaf_count = static_cast<int>(frontier.size());

  // previous-frame boxes of sibling hypotheses; snapshot before growing
  std::vector<BBox> frontier_boxes(frontier.size());
  for (std::size_t i = 0; i < frontier.size(); ++i)
    frontier_boxes[i] = frontier[i]->proposal.box;

  std::vector<std::vector<std::unique_ptr<HypothesisNode>>> children(frontier.size());
  std::vector<std::vector<std::uint8_t>> claimed(frontier.size());

  MaskGenContext ctx;
  ctx.frame_index = t;
  ctx.object_id = forest.object_id;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int li = 0; li < leaf_count; ++li) {
    HypothesisNode* leaf = frontier[li];
    claimed[li].assign(proposals.size(), 0);

    const TrackHistory history = path_history(leaf, params.history_window + 1);
    const BBox predicted = predict_candidate(history, params.history_window);

    std::vector<BBox> rivals;
    rivals.reserve(frontier.size() - 1 + rival_boxes.size());
    for (std::size_t j = 0; j < frontier_boxes.size(); ++j)
      if (static_cast<int>(j) != li) rivals.push_back(frontier_boxes[j]);
    rivals.insert(rivals.end(), rival_boxes.begin(), rival_boxes.end());

    MaskGrid warped_prior;
    bool warped = false;
    for (std::size_t pi = 0; pi < proposals.size(); ++pi) {
      const Proposal& p = proposals[pi];
      if (bbox_iou(p.box, predicted) <= params.gate_iou) continue;
      claimed[li][pi] = 1;
      if (!warped) {
        warped_prior = warp_mask(leaf->mask, flow);
        warped = true;
      }
      const ProbGrid probs = generate_mask(generator, ctx, p.box, warped_prior, params);
      auto child = std::make_unique<HypothesisNode>();
      child->proposal = p;
      child->mask = threshold_mask(probs, params.mask_threshold);
      const double motion = motion_score(p.box, leaf->proposal.box, rivals,
                                         params.continuity_weight,
                                         params.competition_weight);
      const double propagation = mask_iou(child->mask, warped_prior);
      child->step_score = step_score(false, motion, propagation, params);
      child->cumulative_score = accumulate_score(leaf->cumulative_score,
                                                 child->step_score);
      child->parent = leaf;
      children[li].push_back(std::move(child));
    }
  }

  // attach in leaf order so sibling order stays reproducible
  for (std::size_t li = 0; li < frontier.size(); ++li)
    for (auto& child : children[li]) frontier[li]->children.push_back(std::move(child));

  // proposals no leaf claimed found new trees with an empty prior
  const MaskGrid blank(forest.width, forest.height);
  for (std::size_t pi = 0; pi < proposals.size(); ++pi) {
    bool taken = false;
    for (std::size_t li = 0; li < claimed.size() && !taken; ++li)
      taken = !claimed[li].empty() && claimed[li][pi];
    if (taken) continue;
    const ProbGrid probs =
        generate_mask(generator, ctx, proposals[pi].box, blank, params);
    auto root = std::make_unique<HypothesisNode>();
    root->proposal = proposals[pi];
    root->mask = threshold_mask(probs, params.mask_threshold);
    root->step_score = step_score(true, 0.0, 0.0, params);
    root->cumulative_score = root->step_score;
    forest.roots.push_back(std::move(root));
  }

  forest.current_frame = t;
}

namespace {

struct LeafRank {
  HypothesisNode* leaf;
  double score;
  int frame;
  int proposal_id;
};

bool better_leaf(const LeafRank& a, const LeafRank& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.frame != b.frame) return a.frame < b.frame;
  return a.proposal_id < b.proposal_id;
}

// drop every node that does not lead to a kept leaf; returns true if the
// subtree under `node` survives
bool retain_kept(HypothesisNode* node, const std::vector<HypothesisNode*>& kept) {
  std::erase_if(node->children, [&kept](const std::unique_ptr<HypothesisNode>& c) {
    return !retain_kept(c.get(), kept);
  });
  if (!node->children.empty()) return true;
  return std::find(kept.begin(), kept.end(), node) != kept.end();
}

void cap_children_rec(HypothesisNode* node, int cap) {
  if (static_cast<int>(node->children.size()) > cap) {
    std::vector<std::size_t> order(node->children.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& ca = *node->children[a];
      const auto& cb = *node->children[b];
      if (ca.cumulative_score != cb.cumulative_score)
        return ca.cumulative_score > cb.cumulative_score;
      if (ca.frame() != cb.frame()) return ca.frame() < cb.frame();
      return ca.proposal.proposal_id < cb.proposal.proposal_id;
    });
    std::vector<std::unique_ptr<HypothesisNode>> kept;
    kept.reserve(cap);
    std::vector<std::size_t> chosen(order.begin(), order.begin() + cap);
    std::sort(chosen.begin(), chosen.end());  // preserve original sibling order
    for (std::size_t idx : chosen) kept.push_back(std::move(node->children[idx]));
    node->children = std::move(kept);
  }
  for (auto& child : node->children) cap_children_rec(child.get(), cap);
}

}  // namespace

void cap_branches(HypothesisForest& forest, const Params& params) {
  if (params.cap_mode == BranchCapMode::PerNodeChildren) {
    for (auto& root : forest.roots) cap_children_rec(root.get(), params.branch_cap);
    return;
  }
  for (auto it = forest.roots.begin(); it != forest.roots.end();) {
    HypothesisNode* root = it->get();
    std::vector<HypothesisNode*> tree_leaves;
    collect_leaves(root, tree_leaves);
    if (static_cast<int>(tree_leaves.size()) > params.branch_cap) {
      std::vector<LeafRank> ranked;
      ranked.reserve(tree_leaves.size());
      for (auto* leaf : tree_leaves)
        ranked.push_back(
            {leaf, leaf->cumulative_score, leaf->frame(), leaf->proposal.proposal_id});
      std::sort(ranked.begin(), ranked.end(), better_leaf);
      std::vector<HypothesisNode*> kept;
      kept.reserve(params.branch_cap);
      for (int i = 0; i < params.branch_cap; ++i) kept.push_back(ranked[i].leaf);
      if (!retain_kept(root, kept)) {
        if (root == forest.annotation_root) forest.annotation_root = nullptr;
        it = forest.roots.erase(it);
        continue;
      }
    }
    ++it;
  }
}

TrackHistory path_history(const HypothesisNode* node, int max_entries) {
  if (node == nullptr) throw std::invalid_argument("path_history: null node");
  if (max_entries < 1) throw std::invalid_argument("path_history: need >= 1 entries");
  std::vector<const HypothesisNode*> chain;
  for (const HypothesisNode* cur = node; cur != nullptr &&
       static_cast<int>(chain.size()) < max_entries; cur = cur->parent)
    chain.push_back(cur);
  TrackHistory history;
  for (auto rit = chain.rbegin(); rit != chain.rend(); ++rit)
    history.push((*rit)->proposal.box);
  return history;
}

}  // namespace mhp
