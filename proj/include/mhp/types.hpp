#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mhp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Axis-aligned box in continuous frame coordinates.
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }
  Vec2 center() const { return {center_x(), center_y()}; }
  Vec2 size() const { return {width(), height()}; }

  bool valid() const {
    return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
           std::isfinite(y_max) && x_min < x_max && y_min < y_max;
  }
};

inline BBox box_from_center(const Vec2& center, const Vec2& size) {
  return {center.x - 0.5 * size.x, center.y - 0.5 * size.y,
          center.x + 0.5 * size.x, center.y + 0.5 * size.y};
}

// A detected box hypothesis; the atom the trees are grown from.
struct Proposal {
  BBox box;
  double confidence = 0.0;
  int frame_index = 0;
  int proposal_id = 0;  // unique within its frame
};

// Binary raster mask, row-major, one byte per pixel (0 or 1).
struct MaskGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  MaskGrid() = default;
  MaskGrid(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(
        std::accumulate(bits.begin(), bits.end(), std::int64_t{0}));
  }
  bool empty_mask() const {
    for (auto b : bits)
      if (b) return false;
    return true;
  }
  bool same_shape(const MaskGrid& o) const { return width == o.width && height == o.height; }
};

// Real-valued raster in [0,1]; the soft counterpart of MaskGrid.
struct ProbGrid {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  ProbGrid() = default;
  ProbGrid(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.f) {}

  float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  void set(int x, int y, float v) { values[static_cast<std::size_t>(y) * width + x] = v; }
  bool same_shape(const ProbGrid& o) const { return width == o.width && height == o.height; }
};

// Dense per-pixel displacement field, units of pixels, interleaved (dx, dy).
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // 2 * width * height floats, row-major

  FlowField() = default;
  FlowField(int w, int h)
      : width(w), height(h), data(2 * static_cast<std::size_t>(w) * h, 0.f) {}

  float dx(int x, int y) const { return data[2 * (static_cast<std::size_t>(y) * width + x)]; }
  float dy(int x, int y) const {
    return data[2 * (static_cast<std::size_t>(y) * width + x) + 1];
  }
  void set(int x, int y, float fx, float fy) {
    data[2 * (static_cast<std::size_t>(y) * width + x)] = fx;
    data[2 * (static_cast<std::size_t>(y) * width + x) + 1] = fy;
  }
};

// Per-pixel object ids; 0 is background.
struct LabelGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> labels;

  LabelGrid() = default;
  LabelGrid(int w, int h) : width(w), height(h), labels(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
  void set(int x, int y, std::uint8_t v) {
    labels[static_cast<std::size_t>(y) * width + x] = v;
  }
};

}  // namespace mhp
