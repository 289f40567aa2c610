#include "mhp/gating.hpp"

#include <stdexcept>

#include "mhp/geometry.hpp"

namespace mhp {

Vec2 estimate_velocity(const TrackHistory& history, int window) {
  if (history.empty()) throw std::invalid_argument("estimate_velocity: empty history");
  if (window < 1) throw std::invalid_argument("estimate_velocity: window must be >= 1");
  const auto& e = history.entries;
  const int len = static_cast<int>(e.size());
  const int steps = std::min(window, len - 1);
  if (steps == 0) return {0.0, 0.0};
  Vec2 v{0.0, 0.0};
  for (int i = len - steps; i < len; ++i) {
    v.x += e[i].center.x - e[i - 1].center.x;
    v.y += e[i].center.y - e[i - 1].center.y;
  }
  v.x /= steps;
  v.y /= steps;
  return v;
}

BBox predict_candidate(const TrackHistory& history, int window) {
  const Vec2 v = estimate_velocity(history, window);
  const auto& e = history.entries;
  const int len = static_cast<int>(e.size());
  const int span = std::min(window, len);
  Vec2 size{0.0, 0.0};
  for (int i = len - span; i < len; ++i) {
    size.x += e[i].size.x;
    size.y += e[i].size.y;
  }
  size.x /= span;
  size.y /= span;
  const Vec2 center{e.back().center.x + v.x, e.back().center.y + v.y};
  return box_from_center(center, size);
}

GateResult gate(const BBox& prediction, const std::vector<Proposal>& proposals,
                double gate_iou) {
  GateResult result;
  for (const auto& p : proposals) {
    if (bbox_iou(p.box, prediction) > gate_iou)
      result.inside.push_back(p);
    else
      result.outside.push_back(p);
  }
  return result;
}

}  // namespace mhp
