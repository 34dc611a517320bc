// Times the OpenMP matrix kernels against their serial reference twins and
// verifies that both produce bit-identical output.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "jcce/kernels.hpp"
#include "jcce/rng.hpp"

namespace {

using Kernel = void (*)(const double*, const double*, double*, size_t, size_t,
                        size_t);

double time_ms(Kernel kernel, const double* a, const double* b, double* c,
               size_t m, size_t k, size_t n, int reps) {
  kernel(a, b, c, m, k, n);  // warm-up
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) kernel(a, b, c, m, k, n);
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

struct Case {
  const char* name;
  Kernel parallel;
  Kernel serial;
};

}  // namespace

int main() {
  const size_t sizes[][3] = {{64, 512, 50}, {256, 1024, 250}, {512, 512, 512},
                             {1024, 2048, 250}};
  const Case cases[] = {
      {"mm_nn", jcce::kernels::mm_nn, jcce::kernels::mm_nn_serial},
      {"mm_nt", jcce::kernels::mm_nt, jcce::kernels::mm_nt_serial},
      {"mm_tn", jcce::kernels::mm_tn, jcce::kernels::mm_tn_serial},
  };

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif
  std::printf("%-8s %6s %6s %6s  %12s %12s %8s  %s\n", "kernel", "m", "k", "n",
              "serial ms", "parallel ms", "speedup", "identical");

  jcce::Rng rng(7);
  bool all_identical = true;
  for (const auto& size : sizes) {
    const size_t m = size[0], k = size[1], n = size[2];
    std::vector<double> a(m * k), b(k * n), cs(m * n), cp(m * n);
    for (auto& v : a) v = rng.uniform(-1.0, 1.0);
    for (auto& v : b) v = rng.uniform(-1.0, 1.0);
    const int reps = m * k * n > (size_t)1 << 27 ? 3 : 10;
    for (const auto& c : cases) {
      const double ser = time_ms(c.serial, a.data(), b.data(), cs.data(), m, k,
                                 n, reps);
      const double par = time_ms(c.parallel, a.data(), b.data(), cp.data(), m,
                                 k, n, reps);
      const bool same =
          std::memcmp(cs.data(), cp.data(), m * n * sizeof(double)) == 0;
      all_identical = all_identical && same;
      std::printf("%-8s %6zu %6zu %6zu  %12.3f %12.3f %7.2fx  %s\n", c.name, m,
                  k, n, ser, par, ser / par, same ? "yes" : "NO");
    }
  }
  return all_identical ? 0 : 1;
}
