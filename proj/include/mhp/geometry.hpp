#pragma once

#include "mhp/types.hpp"

namespace mhp {

// Intersection over union of two boxes; 0 when either is degenerate or
// they do not overlap.
double bbox_iou(const BBox& a, const BBox& b);

// Pixelwise IoU of two same-shape masks.  Both empty yields 0 (an empty
// prediction against an empty target carries no overlap evidence; the
// metrics layer handles the both-empty case separately).
double mask_iou(const MaskGrid& a, const MaskGrid& b);

// Push every set pixel along the flow field into a new mask of the same
// shape.  Landings are rounded to the nearest pixel, out-of-frame landings
// vanish, collisions merge.
MaskGrid warp_mask(const MaskGrid& mask, const FlowField& flow);

// Frame-sized map with a Gaussian bump over the box: peak 1.0 at the box
// centre, sigma_x = width/2, sigma_y = height/2.
ProbGrid gaussian_map(const BBox& box, int width, int height);

// Expand the box by margin_ratio * size on every side, then clip to the
// frame rectangle [0, width] x [0, height].
BBox crop_with_margin(const BBox& box, double margin_ratio, int width, int height);

// The single rasterisation rule used everywhere a continuous box selects
// pixels: pixel (x, y) belongs to the box iff
//   x_min <= x <= x_max  and  y_min <= y <= y_max.
inline bool box_contains_pixel(const BBox& box, int x, int y) {
  return x >= box.x_min && x <= box.x_max && y >= box.y_min && y <= box.y_max;
}

}  // namespace mhp
