#include "mhp/kernels.hpp"

#include <atomic>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mhp::kernels {

namespace {

std::atomic<Backend> g_backend{Backend::Auto};

// below this many pixels the fork/join overhead is not worth it
constexpr std::size_t kAutoParallelMin = 1 << 14;

bool use_parallel(std::size_t n) {
  switch (g_backend.load(std::memory_order_relaxed)) {
    case Backend::Serial:
      return false;
    case Backend::Parallel:
      return openmp_compiled();
    case Backend::Auto:
    default:
      return openmp_compiled() && n >= kAutoParallelMin;
  }
}

}  // namespace

void set_backend(Backend b) { g_backend.store(b, std::memory_order_relaxed); }

Backend backend() { return g_backend.load(std::memory_order_relaxed); }

bool openmp_compiled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

// ---------------------------------------------------------------- overlap

OverlapCounts mask_overlap_serial(const std::uint8_t* a, const std::uint8_t* b,
                                  std::size_t n) {
  std::int64_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pa = a[i] != 0, pb = b[i] != 0;
    inter += pa && pb;
    uni += pa || pb;
  }
  return {inter, uni};
}

OverlapCounts mask_overlap_parallel(const std::uint8_t* a, const std::uint8_t* b,
                                    std::size_t n) {
#ifdef _OPENMP
  std::int64_t inter = 0, uni = 0;
  const std::int64_t sn = static_cast<std::int64_t>(n);
#pragma omp parallel for reduction(+ : inter, uni) schedule(static)
  for (std::int64_t i = 0; i < sn; ++i) {
    const bool pa = a[i] != 0, pb = b[i] != 0;
    inter += pa && pb;
    uni += pa || pb;
  }
  return {inter, uni};
#else
  return mask_overlap_serial(a, b, n);
#endif
}

OverlapCounts mask_overlap_auto(const std::uint8_t* a, const std::uint8_t* b,
                                std::size_t n) {
  return use_parallel(n) ? mask_overlap_parallel(a, b, n) : mask_overlap_serial(a, b, n);
}

// ---------------------------------------------------------------- warp

namespace {

inline void warp_pixel(const std::uint8_t* src, const float* flow, int width,
                       int height, int x, int y, std::uint8_t* dst, bool atomic) {
  const std::size_t idx = static_cast<std::size_t>(y) * width + x;
  if (!src[idx]) return;
  // nearest integer landing, ties away from zero
  const long tx = std::lround(static_cast<double>(x) + static_cast<double>(flow[2 * idx]));
  const long ty =
      std::lround(static_cast<double>(y) + static_cast<double>(flow[2 * idx + 1]));
  if (tx < 0 || ty < 0 || tx >= width || ty >= height) return;
  std::uint8_t* cell = dst + (static_cast<std::size_t>(ty) * width + tx);
  if (atomic) {
#ifdef _OPENMP
#pragma omp atomic write
    *cell = 1;
#else
    *cell = 1;
#endif
  } else {
    *cell = 1;
  }
}

}  // namespace

void forward_warp_serial(const std::uint8_t* src, const float* flow, int width,
                         int height, std::uint8_t* dst) {
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) warp_pixel(src, flow, width, height, x, y, dst, false);
}

void forward_warp_parallel(const std::uint8_t* src, const float* flow, int width,
                           int height, std::uint8_t* dst) {
#ifdef _OPENMP
  // collisions only ever write 1, so the scatter commutes
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) warp_pixel(src, flow, width, height, x, y, dst, true);
#else
  forward_warp_serial(src, flow, width, height, dst);
#endif
}

void forward_warp_auto(const std::uint8_t* src, const float* flow, int width,
                       int height, std::uint8_t* dst) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (use_parallel(n))
    forward_warp_parallel(src, flow, width, height, dst);
  else
    forward_warp_serial(src, flow, width, height, dst);
}

// ---------------------------------------------------------------- gaussian

namespace {

inline float gaussian_at(int x, int y, double cx, double cy, double inv_2sx2,
                         double inv_2sy2) {
  const double dx = x - cx;
  const double dy = y - cy;
  return static_cast<float>(std::exp(-(dx * dx * inv_2sx2 + dy * dy * inv_2sy2)));
}

}  // namespace

void gaussian_fill_serial(float* out, int width, int height, double cx, double cy,
                          double sigma_x, double sigma_y) {
  const double ix = 1.0 / (2.0 * sigma_x * sigma_x);
  const double iy = 1.0 / (2.0 * sigma_y * sigma_y);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out[static_cast<std::size_t>(y) * width + x] = gaussian_at(x, y, cx, cy, ix, iy);
}

void gaussian_fill_parallel(float* out, int width, int height, double cx, double cy,
                            double sigma_x, double sigma_y) {
#ifdef _OPENMP
  const double ix = 1.0 / (2.0 * sigma_x * sigma_x);
  const double iy = 1.0 / (2.0 * sigma_y * sigma_y);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out[static_cast<std::size_t>(y) * width + x] = gaussian_at(x, y, cx, cy, ix, iy);
#else
  gaussian_fill_serial(out, width, height, cx, cy, sigma_x, sigma_y);
#endif
}

void gaussian_fill_auto(float* out, int width, int height, double cx, double cy,
                        double sigma_x, double sigma_y) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (use_parallel(n))
    gaussian_fill_parallel(out, width, height, cx, cy, sigma_x, sigma_y);
  else
    gaussian_fill_serial(out, width, height, cx, cy, sigma_x, sigma_y);
}

// ---------------------------------------------------------------- box blur

namespace {

// One row (or column) of clipped-window running means.  Shared verbatim by
// the serial and parallel variants so their rounding is identical.
inline void blur_line(const float* src, float* dst, int n, std::ptrdiff_t stride,
                      int radius) {
  double sum = 0.0;
  const int warm = radius < n ? radius : n - 1;
  for (int i = 0; i <= warm; ++i) sum += src[i * stride];
  for (int i = 0; i < n; ++i) {
    const int lo = i - radius > 0 ? i - radius : 0;
    const int hi = i + radius < n - 1 ? i + radius : n - 1;
    dst[i * stride] = static_cast<float>(sum / (hi - lo + 1));
    const int incoming = i + 1 + radius;
    if (incoming <= n - 1) sum += src[incoming * stride];
    const int outgoing = i - radius;
    if (outgoing >= 0) sum -= src[outgoing * stride];
  }
}

template <bool Parallel>
void box_blur_impl(const float* src, float* dst, int width, int height, int radius) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (radius <= 0) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = src[i];
    return;
  }
  std::vector<float> tmp(n);
// horizontal pass
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (Parallel)
#endif
  for (int y = 0; y < height; ++y)
    blur_line(src + static_cast<std::size_t>(y) * width,
              tmp.data() + static_cast<std::size_t>(y) * width, width, 1, radius);
// vertical pass
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (Parallel)
#endif
  for (int x = 0; x < width; ++x)
    blur_line(tmp.data() + x, dst + x, height, width, radius);
}

}  // namespace

void box_blur_serial(const float* src, float* dst, int width, int height, int radius) {
  box_blur_impl<false>(src, dst, width, height, radius);
}

void box_blur_parallel(const float* src, float* dst, int width, int height,
                       int radius) {
  box_blur_impl<true>(src, dst, width, height, radius);
}

void box_blur_auto(const float* src, float* dst, int width, int height, int radius) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (use_parallel(n))
    box_blur_parallel(src, dst, width, height, radius);
  else
    box_blur_serial(src, dst, width, height, radius);
}

}  // namespace mhp::kernels
