#include "mhp/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "mhp/geometry.hpp"
#include "mhp/kernels.hpp"
#include "mhp/rng.hpp"

namespace mhp {

namespace {

struct CropRect {
  int x0, y0, x1, y1;  // inclusive pixel bounds, already clipped to the grid
  bool empty;
};

CropRect pixel_crop(const BBox& box, double margin, int width, int height) {
  const BBox c = crop_with_margin(box, margin, width, height);
  CropRect r{};
  r.x0 = std::max(0, static_cast<int>(std::ceil(c.x_min)));
  r.y0 = std::max(0, static_cast<int>(std::ceil(c.y_min)));
  r.x1 = std::min(width - 1, static_cast<int>(std::floor(c.x_max)));
  r.y1 = std::min(height - 1, static_cast<int>(std::floor(c.y_max)));
  r.empty = r.x0 > r.x1 || r.y0 > r.y1;
  return r;
}

}  // namespace

ProbGrid FlowPropGenerator::generate(const MaskGenContext&, const BBox& box,
                                     const MaskGrid& prior, const Params& params) const {
  if (prior.width <= 0 || prior.height <= 0)
    throw std::invalid_argument("flowprop: prior must be frame-sized");
  const int w = prior.width, h = prior.height;
  const CropRect crop = pixel_crop(box, params.crop_margin, w, h);
  ProbGrid out(w, h);
  if (crop.empty) return out;

  std::vector<float> masked(static_cast<std::size_t>(w) * h, 0.f);
  for (int y = crop.y0; y <= crop.y1; ++y)
    for (int x = crop.x0; x <= crop.x1; ++x)
      if (prior.at(x, y)) masked[static_cast<std::size_t>(y) * w + x] = 1.f;

  std::vector<float> blurred(masked.size());
  kernels::box_blur_auto(masked.data(), blurred.data(), w, h, smoothing_radius_);

  // the blur bleeds past the crop; re-impose the support
  for (int y = crop.y0; y <= crop.y1; ++y)
    for (int x = crop.x0; x <= crop.x1; ++x)
      out.set(x, y, blurred[static_cast<std::size_t>(y) * w + x]);
  return out;
}

void OracleGenerator::add_truth(int object_id, int frame_index, MaskGrid mask) {
  truth_[{object_id, frame_index}] = std::move(mask);
}

ProbGrid OracleGenerator::generate(const MaskGenContext& ctx, const BBox& box,
                                   const MaskGrid& prior, const Params& params) const {
  const auto it = truth_.find({ctx.object_id, ctx.frame_index});
  if (it == truth_.end())
    throw std::runtime_error("oracle: no truth mask for object " +
                             std::to_string(ctx.object_id) + " at frame " +
                             std::to_string(ctx.frame_index));
  const MaskGrid& gt = it->second;
  if (!gt.same_shape(prior))
    throw std::invalid_argument("oracle: truth/prior shape mismatch");
  const int w = gt.width, h = gt.height;
  const CropRect crop = pixel_crop(box, params.crop_margin, w, h);
  ProbGrid out(w, h);
  if (crop.empty) return out;

  for (int y = crop.y0; y <= crop.y1; ++y)
    for (int x = crop.x0; x <= crop.x1; ++x)
      if (gt.at(x, y)) out.set(x, y, 1.f);

  if (boundary_noise_ > 0.0) {
    // flip pixels near the cropped region's boundary, nothing deeper
    MaskGrid region(w, h);
    for (int y = crop.y0; y <= crop.y1; ++y)
      for (int x = crop.x0; x <= crop.x1; ++x) region.set(x, y, gt.at(x, y));
    auto is_boundary = [&](int x, int y) {
      if (!region.at(x, y)) return false;
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) return true;
      return !region.at(x - 1, y) || !region.at(x + 1, y) || !region.at(x, y - 1) ||
             !region.at(x, y + 1);
    };
    MaskGrid near(w, h);
    for (int y = crop.y0; y <= crop.y1; ++y)
      for (int x = crop.x0; x <= crop.x1; ++x) {
        if (!is_boundary(x, y)) continue;
        for (int ny = std::max(crop.y0, y - 1); ny <= std::min(crop.y1, y + 1); ++ny)
          for (int nx = std::max(crop.x0, x - 1); nx <= std::min(crop.x1, x + 1); ++nx)
            near.set(nx, ny, true);
      }
    rng::Stream stream(rng::derive(seed_, static_cast<std::uint64_t>(ctx.frame_index),
                                   static_cast<std::uint64_t>(ctx.object_id)));
    for (int y = crop.y0; y <= crop.y1; ++y)
      for (int x = crop.x0; x <= crop.x1; ++x) {
        if (!near.at(x, y)) continue;
        if (stream.next_bool(boundary_noise_)) out.set(x, y, 1.f - out.at(x, y));
      }
  }
  return out;
}

ProbGrid generate_mask(const MaskGenerator& gen, const MaskGenContext& ctx,
                       const BBox& box, const MaskGrid& prior, const Params& params) {
  if (!box.valid()) throw std::invalid_argument("generate_mask: degenerate box");
  return gen.generate(ctx, box, prior, params);
}

MaskGrid threshold_mask(const ProbGrid& probabilities, double threshold) {
  MaskGrid out(probabilities.width, probabilities.height);
  const std::size_t n = probabilities.values.size();
  for (std::size_t i = 0; i < n; ++i)
    out.bits[i] = probabilities.values[i] > threshold ? 1 : 0;
  return out;
}

namespace {

double patch_sum(const ProbGrid& grid, const std::vector<int>& pixels) {
  double s = 0.0;
  for (int idx : pixels) s += grid.values[idx];
  return s;
}

double patch_weighted_sum(const ProbGrid& weights, const ProbGrid& values,
                          const std::vector<int>& pixels) {
  double s = 0.0;
  for (int idx : pixels)
    s += static_cast<double>(weights.values[idx]) * values.values[idx];
  return s;
}

double patch_weighted_mask_sum(const ProbGrid& weights, const MaskGrid& mask,
                               const std::vector<int>& pixels) {
  double s = 0.0;
  for (int idx : pixels)
    if (mask.bits[idx]) s += weights.values[idx];
  return s;
}

}  // namespace

LabelGrid merge_masks(const std::vector<MaskGrid>& masks,
                      const std::vector<ProbGrid>& probabilities,
                      const std::vector<ProbGrid>& location_weights,
                      const std::vector<MaskGrid>& previous_masks,
                      const FlowField& flow, double merge_margin) {
  const std::size_t count = masks.size();
  if (count == 0) throw std::invalid_argument("merge_masks: no instances");
  if (count > 255) throw std::invalid_argument("merge_masks: more than 255 instances");
  if (probabilities.size() != count || location_weights.size() != count ||
      previous_masks.size() != count)
    throw std::invalid_argument("merge_masks: per-object input sizes differ");
  const int w = masks[0].width, h = masks[0].height;
  if (w <= 0 || h <= 0) throw std::invalid_argument("merge_masks: empty grid");
  for (std::size_t i = 0; i < count; ++i) {
    if (masks[i].width != w || masks[i].height != h ||
        probabilities[i].width != w || probabilities[i].height != h ||
        location_weights[i].width != w || location_weights[i].height != h ||
        previous_masks[i].width != w || previous_masks[i].height != h)
      throw std::invalid_argument("merge_masks: shape mismatch");
  }
  if (flow.width != w || flow.height != h)
    throw std::invalid_argument("merge_masks: flow shape mismatch");
  if (merge_margin <= 0.0)
    throw std::invalid_argument("merge_masks: merge_margin must be positive");

  const std::size_t n = static_cast<std::size_t>(w) * h;
  LabelGrid out(w, h);
  std::vector<std::uint8_t> claim_count(n, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& bits = masks[i].bits;
    for (std::size_t p = 0; p < n; ++p) {
      if (!bits[p]) continue;
      ++claim_count[p];
      out.labels[p] = static_cast<std::uint8_t>(i + 1);  // holds iff uncontested
    }
  }

  // carve the contested area into 4-connected patches, row-major discovery
  std::vector<std::uint8_t> visited(n, 0);
  std::vector<std::optional<MaskGrid>> warped(count);
  auto warped_prev = [&](std::size_t i) -> const MaskGrid& {
    if (!warped[i]) warped[i] = warp_mask(previous_masks[i], flow);
    return *warped[i];
  };

  std::vector<int> patch;
  std::deque<int> queue;
  for (std::size_t start = 0; start < n; ++start) {
    if (claim_count[start] < 2 || visited[start]) continue;
    patch.clear();
    queue.clear();
    queue.push_back(static_cast<int>(start));
    visited[start] = 1;
    while (!queue.empty()) {
      const int idx = queue.front();
      queue.pop_front();
      patch.push_back(idx);
      const int x = idx % w, y = idx / w;
      const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& nb : nbr) {
        if (nb[0] < 0 || nb[1] < 0 || nb[0] >= w || nb[1] >= h) continue;
        const std::size_t ni = static_cast<std::size_t>(nb[1]) * w + nb[0];
        if (visited[ni] || claim_count[ni] < 2) continue;
        visited[ni] = 1;
        queue.push_back(static_cast<int>(ni));
      }
    }
    std::sort(patch.begin(), patch.end());  // canonical order for the sums

    std::vector<std::size_t> claimants;
    for (std::size_t i = 0; i < count; ++i) {
      for (int idx : patch)
        if (masks[i].bits[idx]) {
          claimants.push_back(i);
          break;
        }
    }
    // every patch pixel carries >= 2 claims, so there are >= 2 claimants
    std::vector<double> plain(claimants.size());
    for (std::size_t c = 0; c < claimants.size(); ++c)
      plain[c] = patch_sum(probabilities[claimants[c]], patch);
    std::vector<std::size_t> order(claimants.size());
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (plain[a] != plain[b]) return plain[a] > plain[b];
      return claimants[a] < claimants[b];
    });
    const std::size_t top = claimants[order[0]];
    const std::size_t second = claimants[order[1]];

    const double top_weighted =
        patch_weighted_sum(location_weights[top], probabilities[top], patch);
    const double second_weighted =
        patch_weighted_sum(location_weights[second], probabilities[second], patch);

    std::size_t winner;
    if (top_weighted * merge_margin > second_weighted) {
      winner = top;
    } else {
      // probabilities disagree too mildly; let temporal continuity decide
      const double top_prev =
          patch_weighted_mask_sum(location_weights[top], warped_prev(top), patch);
      const double second_prev = patch_weighted_mask_sum(location_weights[second],
                                                         warped_prev(second), patch);
      winner = top_prev > second_prev ? top : second;
    }
    const std::uint8_t label = static_cast<std::uint8_t>(winner + 1);
    for (int idx : patch) out.labels[idx] = label;
  }
  return out;
}

LabelGrid merge_masks_boxed(const std::vector<MaskGrid>& masks,
                            const std::vector<ProbGrid>& probabilities,
                            const std::vector<std::optional<BBox>>& boxes,
                            const std::vector<MaskGrid>& previous_masks,
                            const FlowField& flow, double merge_margin) {
  if (boxes.size() != masks.size())
    throw std::invalid_argument("merge_masks: one box slot per instance required");
  const int w = flow.width, h = flow.height;
  std::vector<ProbGrid> weights(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (boxes[i]) {
      weights[i] = gaussian_map(*boxes[i], w, h);
    } else {
      if (!masks[i].empty_mask())
        throw std::invalid_argument(
            "merge_masks: instance without a box must have an empty mask");
      weights[i] = ProbGrid(w, h);
    }
  }
  return merge_masks(masks, probabilities, weights, previous_masks, flow, merge_margin);
}

}  // namespace mhp
