#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "mhp/kernels.hpp"
#include "mhp/rng.hpp"

// Times the serial reference kernels against their OpenMP counterparts on
// square grids and verifies that both produce identical bytes.

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double best_ms(Fn&& fn, int repeats) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = Clock::now();
    fn();
    const auto t1 = Clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (ms < best) best = ms;
  }
  return best;
}

void report(const char* name, int size, double serial_ms, double parallel_ms,
            bool identical) {
  std::printf("%-14s %5dx%-5d serial %9.3f ms   parallel %9.3f ms   x%.2f   %s\n",
              name, size, size, serial_ms, parallel_ms,
              parallel_ms > 0 ? serial_ms / parallel_ms : 0.0,
              identical ? "outputs identical" : "OUTPUTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  int repeats = 5;
  std::vector<int> sizes = {256, 1024, 2048};
  if (argc > 1) sizes = {std::atoi(argv[1])};
  if (argc > 2) repeats = std::atoi(argv[2]);
  if ((argc > 1 && sizes[0] <= 0) || repeats <= 0) {
    std::fprintf(stderr, "usage: %s [grid_size] [repeats]\n", argv[0]);
    return 2;
  }

  std::printf("OpenMP compiled in: %s\n",
              mhp::kernels::openmp_compiled() ? "yes" : "no");
  bool all_ok = true;

  for (int size : sizes) {
    const std::size_t n = static_cast<std::size_t>(size) * size;
    mhp::rng::Stream stream(12345);

    std::vector<std::uint8_t> mask_a(n), mask_b(n);
    for (auto& v : mask_a) v = stream.next_unit() < 0.4 ? 1 : 0;
    for (auto& v : mask_b) v = stream.next_unit() < 0.4 ? 1 : 0;
    std::vector<float> flow(2 * n);
    for (auto& v : flow) v = static_cast<float>(stream.next_range(-6.0, 6.0));
    std::vector<float> field(n);
    for (auto& v : field) v = static_cast<float>(stream.next_unit());

    {
      mhp::kernels::OverlapCounts rs{}, rp{};
      const double s = best_ms(
          [&] { rs = mhp::kernels::mask_overlap_serial(mask_a.data(), mask_b.data(), n); },
          repeats);
      const double p = best_ms(
          [&] { rp = mhp::kernels::mask_overlap_parallel(mask_a.data(), mask_b.data(), n); },
          repeats);
      const bool ok = rs.intersection == rp.intersection && rs.unioned == rp.unioned;
      report("mask_overlap", size, s, p, ok);
      all_ok = all_ok && ok;
    }
    {
      std::vector<std::uint8_t> out_s(n), out_p(n);
      const double s = best_ms(
          [&] {
            std::memset(out_s.data(), 0, n);
            mhp::kernels::forward_warp_serial(mask_a.data(), flow.data(), size, size,
                                              out_s.data());
          },
          repeats);
      const double p = best_ms(
          [&] {
            std::memset(out_p.data(), 0, n);
            mhp::kernels::forward_warp_parallel(mask_a.data(), flow.data(), size, size,
                                                out_p.data());
          },
          repeats);
      const bool ok = out_s == out_p;
      report("forward_warp", size, s, p, ok);
      all_ok = all_ok && ok;
    }
    {
      std::vector<float> out_s(n), out_p(n);
      const double s = best_ms(
          [&] {
            mhp::kernels::gaussian_fill_serial(out_s.data(), size, size, size * 0.5,
                                               size * 0.5, size * 0.25, size * 0.25);
          },
          repeats);
      const double p = best_ms(
          [&] {
            mhp::kernels::gaussian_fill_parallel(out_p.data(), size, size, size * 0.5,
                                                 size * 0.5, size * 0.25, size * 0.25);
          },
          repeats);
      const bool ok = std::memcmp(out_s.data(), out_p.data(), n * sizeof(float)) == 0;
      report("gaussian_fill", size, s, p, ok);
      all_ok = all_ok && ok;
    }
    {
      std::vector<float> out_s(n), out_p(n);
      const double s = best_ms(
          [&] { mhp::kernels::box_blur_serial(field.data(), out_s.data(), size, size, 3); },
          repeats);
      const double p = best_ms(
          [&] { mhp::kernels::box_blur_parallel(field.data(), out_p.data(), size, size, 3); },
          repeats);
      const bool ok = std::memcmp(out_s.data(), out_p.data(), n * sizeof(float)) == 0;
      report("box_blur", size, s, p, ok);
      all_ok = all_ok && ok;
    }
  }
  return all_ok ? 0 : 1;
}
