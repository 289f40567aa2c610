#pragma once

#include <cstddef>
#include <cstdint>

// Raster kernels that dominate the per-frame cost.  Every kernel ships in
// two variants: a plain serial loop that acts as the reference
// implementation, and an OpenMP one.  The two must produce byte-identical
// output -- the tests compare them directly, and run results must not
// depend on the thread count.  The *_auto wrappers pick a variant based on
// the configured backend.

namespace mhp::kernels {

enum class Backend {
  Auto,      // parallel when compiled with OpenMP and the buffer is large
  Serial,    // always the reference loops
  Parallel,  // always OpenMP (falls back to serial when not compiled in)
};

void set_backend(Backend b);
Backend backend();
bool openmp_compiled();

struct OverlapCounts {
  std::int64_t intersection = 0;
  std::int64_t unioned = 0;
};

// --- mask overlap (intersection / union pixel counts) ---
OverlapCounts mask_overlap_serial(const std::uint8_t* a, const std::uint8_t* b,
                                  std::size_t n);
OverlapCounts mask_overlap_parallel(const std::uint8_t* a, const std::uint8_t* b,
                                    std::size_t n);
OverlapCounts mask_overlap_auto(const std::uint8_t* a, const std::uint8_t* b,
                                std::size_t n);

// --- forward warp of a binary mask along a flow field ---
// Each set source pixel lands at round(x + dx), round(y + dy); landings
// outside the grid are dropped and collisions union to 1, so the scatter
// is order-independent and safe to parallelise.  dst must be zeroed by the
// caller (or simply freshly allocated).
void forward_warp_serial(const std::uint8_t* src, const float* flow, int width,
                         int height, std::uint8_t* dst);
void forward_warp_parallel(const std::uint8_t* src, const float* flow, int width,
                           int height, std::uint8_t* dst);
void forward_warp_auto(const std::uint8_t* src, const float* flow, int width,
                       int height, std::uint8_t* dst);

// --- separable anisotropic Gaussian, peak 1.0 at the box centre ---
void gaussian_fill_serial(float* out, int width, int height, double cx, double cy,
                          double sigma_x, double sigma_y);
void gaussian_fill_parallel(float* out, int width, int height, double cx, double cy,
                            double sigma_x, double sigma_y);
void gaussian_fill_auto(float* out, int width, int height, double cx, double cy,
                        double sigma_x, double sigma_y);

// --- separable box blur with clipped windows (mean over in-grid samples) ---
// radius 0 copies the input.  src and dst may not alias.
void box_blur_serial(const float* src, float* dst, int width, int height, int radius);
void box_blur_parallel(const float* src, float* dst, int width, int height,
                       int radius);
void box_blur_auto(const float* src, float* dst, int width, int height, int radius);

}  // namespace mhp::kernels
