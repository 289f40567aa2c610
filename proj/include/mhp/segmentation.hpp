#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mhp/params.hpp"
#include "mhp/types.hpp"

namespace mhp {

struct MaskGenContext {
  int frame_index = 0;
  int object_id = 0;
  const std::string* image = nullptr;  // opaque reference, unused by built-ins
};

// Produces per-pixel foreground probabilities for one box hypothesis.
// Implementations must be pure functions of their arguments (plus their
// own construction-time state): the pipeline regenerates probabilities on
// demand and relies on getting the same answer every time.
class MaskGenerator {
 public:
  virtual ~MaskGenerator() = default;
  virtual std::string name() const = 0;

  // `prior` is the track's previous mask already warped into this frame
  // (empty for a track born this frame).  The result is frame-sized with
  // zero probability outside the margin-expanded crop of `box`.
  virtual ProbGrid generate(const MaskGenContext& ctx, const BBox& box,
                            const MaskGrid& prior, const Params& params) const = 0;
};

// Appearance-free generator: trusts the warped prior inside the crop and
// feathers it with a box blur, so masks survive on motion evidence alone.
// A blank prior stays blank -- this generator cannot invent foreground.
class FlowPropGenerator : public MaskGenerator {
 public:
  explicit FlowPropGenerator(int smoothing_radius = 2)
      : smoothing_radius_(smoothing_radius) {}
  std::string name() const override { return "flowprop"; }
  ProbGrid generate(const MaskGenContext& ctx, const BBox& box, const MaskGrid& prior,
                    const Params& params) const override;

 private:
  int smoothing_radius_;
};

// Test/synthetic generator backed by ground-truth masks, with optional
// boundary flip noise.  Draws are derived from (seed, frame, object), so
// repeated calls with the same arguments agree exactly.
class OracleGenerator : public MaskGenerator {
 public:
  OracleGenerator(double boundary_noise, std::uint64_t seed)
      : boundary_noise_(boundary_noise), seed_(seed) {}

  void add_truth(int object_id, int frame_index, MaskGrid mask);
  std::string name() const override { return "oracle"; }
  ProbGrid generate(const MaskGenContext& ctx, const BBox& box, const MaskGrid& prior,
                    const Params& params) const override;

 private:
  std::map<std::pair<int, int>, MaskGrid> truth_;  // (object, frame) -> mask
  double boundary_noise_;
  std::uint64_t seed_;
};

// Convenience wrapper matching the call shape used by the tree code.
ProbGrid generate_mask(const MaskGenerator& gen, const MaskGenContext& ctx,
                       const BBox& box, const MaskGrid& prior, const Params& params);

// Foreground iff probability strictly above `threshold`.
MaskGrid threshold_mask(const ProbGrid& probabilities, double threshold);

// Resolves overlapping instance masks into a single label grid (Ids 1..C,
// 0 background).  Disputed regions are split into 4-connected patches and
// each patch is awarded as a whole:
//   1. rank claimants by their plain probability sum over the patch;
//   2. the leader takes the patch if its location-weighted sum, discounted
//      by merge_margin, still beats the runner-up's;
//   3. otherwise the patch goes to whichever of the two has the larger
//      location-weighted overlap with its own previous mask warped forward.
// `location_weights` holds one spatial prior per object (anything >= 0;
// the pipeline passes a Gaussian bump over the object's box).
LabelGrid merge_masks(const std::vector<MaskGrid>& masks,
                      const std::vector<ProbGrid>& probabilities,
                      const std::vector<ProbGrid>& location_weights,
                      const std::vector<MaskGrid>& previous_masks,
                      const FlowField& flow, double merge_margin);

// Same resolution rule, with the location weights derived from per-object
// boxes (Gaussian bump per box; objects absent this frame pass nullopt and
// must have an empty mask).
LabelGrid merge_masks_boxed(const std::vector<MaskGrid>& masks,
                            const std::vector<ProbGrid>& probabilities,
                            const std::vector<std::optional<BBox>>& boxes,
                            const std::vector<MaskGrid>& previous_masks,
                            const FlowField& flow, double merge_margin);

}  // namespace mhp
