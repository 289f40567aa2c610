#pragma once

#include <string>
#include <vector>

#include "mhp/types.hpp"

// tiny builders shared by the test binaries

inline mhp::MaskGrid mask_from_art(const std::vector<std::string>& rows) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows.front().size());
  mhp::MaskGrid mask(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (rows[y][x] == '#') mask.set(x, y, true);
  return mask;
}

inline mhp::MaskGrid filled_rect(int w, int h, int x0, int y0, int x1, int y1) {
  mhp::MaskGrid mask(w, h);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) mask.set(x, y, true);
  return mask;
}

inline mhp::FlowField const_flow(int w, int h, float dx, float dy) {
  mhp::FlowField flow(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) flow.set(x, y, dx, dy);
  return flow;
}
