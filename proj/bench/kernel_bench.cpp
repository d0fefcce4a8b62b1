// Times the OpenMP unfolding kernels against the serial reference loops and
// reports the largest difference between the two.
//
//   kernel_bench [n] [cols] [reps]      (defaults 80 20 3)

#include "tucker/kernels.hpp"
#include "tucker/sketch.hpp"
#include "tucker/tensor.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

using namespace tucker;

namespace {

double best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

double max_diff(const DenseTensor& a, const DenseTensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 80;
  const std::size_t c = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 20;
  const int reps = argc > 3 ? std::atoi(argv[3]) : 3;
  const int threads = configure_threads_from_env();

  const Matrix raw = gaussian_matrix(n * n * n, 1, 1);
  const DenseTensor t({n, n, n}, std::vector<double>(raw.data(), raw.data() + raw.size()));
  const Matrix x = gaussian_matrix(n * n, c, 2);
  const Matrix y = gaussian_matrix(n, c, 3);
  const Matrix b = gaussian_matrix(c, n, 4);

  std::printf("tensor %zux%zux%zu, %zu columns, best of %d, threads %s\n", n, n, n, c, reps,
              threads ? std::to_string(threads).c_str() : "default");
  std::printf("%-26s %4s %12s %12s %9s %10s\n", "kernel", "mode", "omp_s", "serial_s", "speedup", "max_diff");
  for (std::size_t mode = 0; mode < 3; ++mode) {
    auto row = [&](const char* name, auto fast, auto slow) {
      decltype(fast()) a, r;
      const double tf = best_of(reps, [&] { a = fast(); });
      const double ts = best_of(reps, [&] { r = slow(); });
      std::printf("%-26s %4zu %12.6f %12.6f %9.2f %10.2e\n", name, mode, tf, ts, ts / tf, max_diff(a, r));
    };
    row("unfolding_times", [&] { return kernels::unfolding_times(t, mode, x); },
        [&] { return reference::unfolding_times(t, mode, x); });
    row("unfolding_transpose_times", [&] { return kernels::unfolding_transpose_times(t, mode, y); },
        [&] { return reference::unfolding_transpose_times(t, mode, y); });
    row("unfolding_gram", [&] { return kernels::unfolding_gram(t, mode); },
        [&] { return reference::unfolding_gram(t, mode); });
    row("mode_product", [&] { return kernels::mode_product(t, b, mode); },
        [&] { return reference::mode_product(t, b, mode); });
  }
  return 0;
}
