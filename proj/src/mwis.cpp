#include "mhp/mwis.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_set>

#include "mhp/rng.hpp"

namespace mhp {

namespace {

void walk_paths(const HypothesisForest& forest, const HypothesisNode* node,
                std::vector<const HypothesisNode*>& stack,
                std::vector<TrackPath>& out) {
  stack.push_back(node);
  if (node->is_leaf()) {
    TrackPath path;
    path.nodes = stack;
    path.total_weight = node->cumulative_score;
    path.annotation_rooted = stack.front() == forest.annotation_root;
    out.push_back(std::move(path));
  } else {
    for (const auto& child : node->children)
      walk_paths(forest, child.get(), stack, out);
  }
  stack.pop_back();
}

}  // namespace

std::vector<TrackPath> enumerate_paths(const HypothesisForest& forest) {
  std::vector<TrackPath> out;
  std::vector<const HypothesisNode*> stack;
  for (const auto& root : forest.roots) walk_paths(forest, root.get(), stack, out);
  return out;
}

bool ConflictGraph::has_edge(int a, int b) const {
  const auto& nbrs = adjacency[a];
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

ConflictGraph build_conflict_graph(const std::vector<TrackPath>& paths) {
  ConflictGraph g;
  const int n = static_cast<int>(paths.size());
  g.weights.resize(n);
  g.adjacency.resize(n);

  // per-path detection keys; frames grow along a path so these are sorted
  std::vector<std::vector<std::pair<int, int>>> keys(n);
  for (int i = 0; i < n; ++i) {
    g.weights[i] = paths[i].total_weight;
    keys[i].reserve(paths[i].nodes.size());
    for (const auto* node : paths[i].nodes)
      keys[i].emplace_back(node->frame(), node->proposal.proposal_id);
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const auto& ka = keys[a];
      const auto& kb = keys[b];
      std::size_t ia = 0, ib = 0;
      bool conflict = false;
      while (ia < ka.size() && ib < kb.size()) {
        if (ka[ia] == kb[ib]) {
          conflict = true;
          break;
        }
        if (ka[ia] < kb[ib])
          ++ia;
        else
          ++ib;
      }
      if (conflict) {
        g.adjacency[a].push_back(b);
        g.adjacency[b].push_back(a);
      }
    }
  }
  // built in increasing order already, but keep the invariant explicit
  for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

double set_weight(const ConflictGraph& graph, const std::vector<int>& vertices) {
  std::vector<int> sorted(vertices);
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (int v : sorted) sum += graph.weights[v];
  return sum;
}

// ------------------------------------------------------------------ exact

namespace {

struct ExactState {
  const ConflictGraph* graph;
  std::vector<std::uint32_t> conflict_mask;  // per vertex: self + neighbours
  std::vector<int> best;
  double best_weight = 0.0;

  void consider(std::uint32_t set_mask, double weight) {
    if (weight < best_weight) return;
    std::vector<int> vertices;
    for (int v = 0; v < static_cast<int>(graph->size()); ++v)
      if (set_mask & (1u << v)) vertices.push_back(v);
    if (weight > best_weight ||
        std::lexicographical_compare(vertices.begin(), vertices.end(), best.begin(),
                                     best.end())) {
      best_weight = weight;
      best = std::move(vertices);
    }
  }

  void search(std::uint32_t candidates, std::uint32_t chosen, double weight) {
    // optimistic bound: take every remaining candidate with positive weight
    double bound = weight;
    for (std::uint32_t rest = candidates; rest;) {
      const int v = std::countr_zero(rest);
      rest &= rest - 1;
      if (graph->weights[v] > 0.0) bound += graph->weights[v];
    }
    if (bound < best_weight) return;  // equal bounds stay: a lex-smaller set may hide here
    if (candidates == 0) {
      consider(chosen, weight);
      return;
    }
    const int v = std::countr_zero(candidates);
    search(candidates & ~conflict_mask[v], chosen | (1u << v),
           weight + graph->weights[v]);
    search(candidates & ~(1u << v), chosen, weight);
  }
};

}  // namespace

std::vector<int> solve_exact(const ConflictGraph& graph) {
  const int n = static_cast<int>(graph.size());
  if (n > 24)
    throw std::invalid_argument("solve_exact: instance too large (over 24 vertices)");
  ExactState state;
  state.graph = &graph;
  state.conflict_mask.resize(n);
  for (int v = 0; v < n; ++v) {
    std::uint32_t m = 1u << v;
    for (int u : graph.adjacency[v]) m |= 1u << u;
    state.conflict_mask[v] = m;
  }
  state.best = {};  // the empty set is independent with weight 0
  state.best_weight = 0.0;
  state.search(n == 0 ? 0u : ((1u << n) - 1u), 0u, 0.0);
  return state.best;
}

// ------------------------------------------------------------------ PLS

namespace {

class PlsState {
 public:
  PlsState(const ConflictGraph& graph, std::uint64_t seed)
      : graph_(graph),
        n_(static_cast<int>(graph.size())),
        in_set_(n_, 0),
        blocked_(n_, 0),
        penalty_(n_, 0),
        stream_(seed) {
    for (int v = 0; v < n_; ++v)
      if (graph_.weights[v] > 0.0) eligible_.push_back(v);
  }

  // greedy-by-weight maximal set; the floor every run is guaranteed to meet
  std::vector<int> greedy() const {
    std::vector<int> order(eligible_);
    std::sort(order.begin(), order.end(), [this](int a, int b) {
      if (graph_.weights[a] != graph_.weights[b])
        return graph_.weights[a] > graph_.weights[b];
      return a < b;
    });
    std::vector<char> taken(n_, 0), shut(n_, 0);
    std::vector<int> set;
    for (int v : order) {
      if (shut[v]) continue;
      taken[v] = 1;
      set.push_back(v);
      shut[v] = 1;
      for (int u : graph_.adjacency[v]) shut[u] = 1;
    }
    std::sort(set.begin(), set.end());
    return set;
  }

  void load(const std::vector<int>& set) {
    std::fill(in_set_.begin(), in_set_.end(), 0);
    std::fill(blocked_.begin(), blocked_.end(), 0);
    current_.clear();
    for (int v : set) add(v);
  }

  void add(int v) {
    in_set_[v] = 1;
    current_.push_back(v);
    ++blocked_[v];
    for (int u : graph_.adjacency[v]) ++blocked_[u];
  }

  void remove(int v) {
    in_set_[v] = 0;
    current_.erase(std::find(current_.begin(), current_.end(), v));
    --blocked_[v];
    for (int u : graph_.adjacency[v]) --blocked_[u];
  }

  enum class Phase { Random, Greedy, Penalty };

  // grow to a maximal set, picking additions by the phase's taste
  void expand(Phase phase) {
    for (;;) {
      scratch_.clear();
      for (int v : eligible_)
        if (!in_set_[v] && blocked_[v] == 0) scratch_.push_back(v);
      if (scratch_.empty()) return;
      add(pick(phase, scratch_));
    }
  }

  // diversify: force one outside vertex into the set, evicting whichever
  // members conflict with it
  void force_move(Phase phase) {
    scratch_.clear();
    for (int v : eligible_)
      if (!in_set_[v]) scratch_.push_back(v);
    if (scratch_.empty()) return;
    int v;
    switch (phase) {
      case Phase::Random:
        v = scratch_[stream_.next_below(scratch_.size())];
        break;
      case Phase::Greedy: {  // best net gain after the evictions
        v = scratch_.front();
        double best_gain = net_gain(v);
        for (int c : scratch_) {
          const double g = net_gain(c);
          if (g > best_gain || (g == best_gain && c < v)) {
            best_gain = g;
            v = c;
          }
        }
        break;
      }
      case Phase::Penalty:
      default:
        v = pick(Phase::Penalty, scratch_);
        break;
    }
    for (int u : graph_.adjacency[v])
      if (in_set_[u]) remove(u);
    add(v);
    ++penalty_[v];
  }

  void reset_penalties() { std::fill(penalty_.begin(), penalty_.end(), 0); }

  double current_weight() const { return set_weight(graph_, current_); }
  const std::vector<int>& current() const { return current_; }
  std::size_t eligible_count() const { return eligible_.size(); }

 private:
  double net_gain(int v) const {
    double gain = graph_.weights[v];
    for (int u : graph_.adjacency[v])
      if (in_set_[u]) gain -= graph_.weights[u];
    return gain;
  }

  int pick(Phase phase, const std::vector<int>& candidates) {
    switch (phase) {
      case Phase::Random:
        return candidates[stream_.next_below(candidates.size())];
      case Phase::Greedy: {
        int best = candidates.front();
        for (int v : candidates)
          if (graph_.weights[v] > graph_.weights[best] ||
              (graph_.weights[v] == graph_.weights[best] && v < best))
            best = v;
        return best;
      }
      case Phase::Penalty:
      default: {
        int best = candidates.front();
        for (int v : candidates) {
          if (penalty_[v] != penalty_[best]) {
            if (penalty_[v] < penalty_[best]) best = v;
          } else if (graph_.weights[v] > graph_.weights[best] ||
                     (graph_.weights[v] == graph_.weights[best] && v < best)) {
            best = v;
          }
        }
        return best;
      }
    }
  }

  const ConflictGraph& graph_;
  int n_;
  std::vector<int> eligible_;  // positive-weight vertices only
  std::vector<char> in_set_;
  std::vector<int> blocked_;  // for v: |{v} ∩ S| + |N(v) ∩ S|
  std::vector<int> penalty_;
  std::vector<int> current_;
  std::vector<int> scratch_;
  rng::Stream stream_;
};

}  // namespace

std::vector<int> solve_pls(const ConflictGraph& graph, std::uint64_t seed,
                           int max_iterations, std::optional<double> target_weight) {
  if (max_iterations < 1)
    throw std::invalid_argument("solve_pls: max_iterations must be >= 1");
  if (graph.size() == 0) return {};

  PlsState state(graph, seed);
  std::vector<int> best = state.greedy();
  double best_weight = set_weight(graph, best);
  state.load(best);

  constexpr int kPhaseLength = 30;
  constexpr int kPenaltyResetPeriod = 100;

  for (int iter = 0; iter < max_iterations; ++iter) {
    if (best.size() == state.eligible_count()) break;  // nothing left to gain
    if (target_weight && best_weight >= *target_weight) break;
    if (iter % kPenaltyResetPeriod == 0) state.reset_penalties();
    const auto phase = static_cast<PlsState::Phase>((iter / kPhaseLength) % 3);

    state.expand(phase);
    const double w = state.current_weight();
    if (w > best_weight) {
      best = state.current();
      std::sort(best.begin(), best.end());
      best_weight = w;
    }
    state.force_move(phase);
  }
  return best;
}

// ------------------------------------------------------------------ prune

void n_scan_prune(HypothesisForest& forest, const std::vector<TrackPath>& selected,
                  int scan_depth) {
  if (scan_depth < 1) throw std::invalid_argument("n_scan_prune: scan_depth must be >= 1");
  const int cutoff = forest.current_frame - scan_depth;
  if (cutoff < 0) return;

  std::unordered_set<const HypothesisNode*> keep;
  for (const auto& path : selected)
    for (const auto* node : path.nodes) keep.insert(node);

  // an unmarked node can never have a marked descendant (marks cover whole
  // root-to-leaf chains), so unmarked-and-old prunes the entire subtree
  auto doomed = [&](const std::unique_ptr<HypothesisNode>& node) {
    return node->frame() <= cutoff && !keep.count(node.get());
  };
  std::function<void(HypothesisNode*)> sweep = [&](HypothesisNode* node) {
    std::erase_if(node->children, doomed);
    for (auto& child : node->children) sweep(child.get());
  };
  for (auto it = forest.roots.begin(); it != forest.roots.end();) {
    if (doomed(*it)) {
      if (it->get() == forest.annotation_root) forest.annotation_root = nullptr;
      it = forest.roots.erase(it);
    } else {
      sweep(it->get());
      ++it;
    }
  }
}

}  // namespace mhp
