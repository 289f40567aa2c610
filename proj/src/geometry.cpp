#include "mhp/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "mhp/kernels.hpp"

namespace mhp {

double bbox_iou(const BBox& a, const BBox& b) {
  if (!a.valid() || !b.valid()) return 0.0;
  const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double mask_iou(const MaskGrid& a, const MaskGrid& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mask_iou: shape mismatch");
  const auto counts =
      kernels::mask_overlap_auto(a.bits.data(), b.bits.data(), a.bits.size());
  if (counts.unioned == 0) return 0.0;
  return static_cast<double>(counts.intersection) / static_cast<double>(counts.unioned);
}

MaskGrid warp_mask(const MaskGrid& mask, const FlowField& flow) {
  if (mask.width != flow.width || mask.height != flow.height)
    throw std::invalid_argument("warp_mask: flow shape mismatch");
  MaskGrid out(mask.width, mask.height);
  kernels::forward_warp_auto(mask.bits.data(), flow.data.data(), mask.width,
                             mask.height, out.bits.data());
  return out;
}

ProbGrid gaussian_map(const BBox& box, int width, int height) {
  if (!box.valid()) throw std::invalid_argument("gaussian_map: degenerate box");
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("gaussian_map: empty frame");
  ProbGrid out(width, height);
  kernels::gaussian_fill_auto(out.values.data(), width, height, box.center_x(),
                              box.center_y(), 0.5 * box.width(), 0.5 * box.height());
  return out;
}

BBox crop_with_margin(const BBox& box, double margin_ratio, int width, int height) {
  if (!box.valid()) throw std::invalid_argument("crop_with_margin: degenerate box");
  const double mx = margin_ratio * box.width();
  const double my = margin_ratio * box.height();
  BBox out{box.x_min - mx, box.y_min - my, box.x_max + mx, box.y_max + my};
  out.x_min = std::max(0.0, out.x_min);
  out.y_min = std::max(0.0, out.y_min);
  out.x_max = std::min(static_cast<double>(width), out.x_max);
  out.y_max = std::min(static_cast<double>(height), out.y_max);
  return out;
}

}  // namespace mhp
