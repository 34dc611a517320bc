#include <cmath>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "doctest.h"
#include "jcce/kernels.hpp"
#include "jcce/rng.hpp"
#include "jcce/tensor.hpp"

using namespace jcce;

namespace {

Tensor random_tensor(size_t r, size_t c, Rng& rng) {
  Tensor t(r, c);
  for (size_t i = 0; i < t.size(); ++i) t.at(i) = rng.uniform(-1.0, 1.0);
  return t;
}

}  // namespace

TEST_CASE("tensor basics") {
  Tensor t(2, 3, 1.5);
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  CHECK(t.size() == 6);
  CHECK(t(1, 2) == 1.5);
  t(1, 2) = -4.0;
  CHECK(t.at(5) == -4.0);
  CHECK(t.shape_str() == "(2x3)");
  CHECK(t.all_finite());
  t.at(0) = NAN;
  CHECK(!t.all_finite());
  t.at(0) = INFINITY;
  CHECK(!t.all_finite());
  t.fill(0.0);
  CHECK(t == Tensor(2, 3));
  CHECK(!(t == Tensor(3, 2)));
}

TEST_CASE("identity and from_rows") {
  const Tensor eye = Tensor::identity(3);
  for (size_t i = 0; i < 3; ++i)
    for (size_t j = 0; j < 3; ++j) CHECK(eye(i, j) == (i == j ? 1.0 : 0.0));
  const Tensor t = Tensor::from_rows({{1, 2}, {3, 4}, {5, 6}});
  CHECK(t.rows() == 3);
  CHECK(t.cols() == 2);
  CHECK(t(2, 1) == 6.0);
}

TEST_CASE("mm_nn matches a hand example") {
  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  const Tensor b = Tensor::from_rows({{5, 6}, {7, 8}});
  Tensor c(2, 2);
  kernels::mm_nn(a.data(), b.data(), c.data(), 2, 2, 2);
  CHECK(c(0, 0) == 19.0);
  CHECK(c(0, 1) == 22.0);
  CHECK(c(1, 0) == 43.0);
  CHECK(c(1, 1) == 50.0);
}

TEST_CASE("transposed kernels agree with explicit transposes") {
  Rng rng(21);
  const size_t m = 5, k = 7, n = 4;
  const Tensor a = random_tensor(m, k, rng);
  const Tensor b = random_tensor(k, n, rng);
  Tensor bt(n, k), at(k, m);
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < n; ++j) bt(j, i) = b(i, j);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < k; ++j) at(j, i) = a(i, j);

  Tensor c_ref(m, n), c_nt(m, n), c_tn(m, n);
  kernels::mm_nn(a.data(), b.data(), c_ref.data(), m, k, n);
  kernels::mm_nt(a.data(), bt.data(), c_nt.data(), m, k, n);
  kernels::mm_tn(at.data(), b.data(), c_tn.data(), m, k, n);
  for (size_t i = 0; i < m * n; ++i) {
    CHECK(c_nt.at(i) == doctest::Approx(c_ref.at(i)).epsilon(1e-12));
    CHECK(c_tn.at(i) == doctest::Approx(c_ref.at(i)).epsilon(1e-12));
  }
}

TEST_CASE("parallel kernels are bit-identical to the serial references") {
  Rng rng(22);
  const size_t shapes[][3] = {{1, 1, 1}, {3, 7, 5}, {16, 33, 9}, {64, 128, 50}};
  for (const auto& s : shapes) {
    const size_t m = s[0], k = s[1], n = s[2];
    const Tensor a = random_tensor(m, k, rng);
    const Tensor b = random_tensor(k, n, rng);
    Tensor cp(m, n), cs(m, n);

    kernels::mm_nn(a.data(), b.data(), cp.data(), m, k, n);
    kernels::mm_nn_serial(a.data(), b.data(), cs.data(), m, k, n);
    CHECK(cp == cs);

    const Tensor bt = random_tensor(n, k, rng);
    kernels::mm_nt(a.data(), bt.data(), cp.data(), m, k, n);
    kernels::mm_nt_serial(a.data(), bt.data(), cs.data(), m, k, n);
    CHECK(cp == cs);

    const Tensor at = random_tensor(k, m, rng);
    kernels::mm_tn(at.data(), b.data(), cp.data(), m, k, n);
    kernels::mm_tn_serial(at.data(), b.data(), cs.data(), m, k, n);
    CHECK(cp == cs);
  }
}

#ifdef _OPENMP
TEST_CASE("results do not depend on the thread count") {
  Rng rng(23);
  const size_t m = 40, k = 70, n = 30;
  const Tensor a = random_tensor(m, k, rng);
  const Tensor b = random_tensor(k, n, rng);
  Tensor c1(m, n), c4(m, n);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  kernels::mm_nn(a.data(), b.data(), c1.data(), m, k, n);
  omp_set_num_threads(4);
  kernels::mm_nn(a.data(), b.data(), c4.data(), m, k, n);
  omp_set_num_threads(saved);
  CHECK(c1 == c4);
}
#endif

TEST_CASE("relu clamps negatives") {
  const double in[5] = {-2.0, -0.0, 0.5, 3.0, -1e-9};
  double out[5];
  kernels::relu(in, out, 5);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.5);
  CHECK(out[3] == 3.0);
  CHECK(out[4] == 0.0);
}

TEST_CASE("add_bias_rows broadcasts over rows") {
  const Tensor in = Tensor::from_rows({{1, 2}, {3, 4}, {5, 6}});
  const double bias[2] = {10.0, 20.0};
  Tensor out(3, 2);
  kernels::add_bias_rows(in.data(), bias, out.data(), 3, 2);
  CHECK(out == Tensor::from_rows({{11, 22}, {13, 24}, {15, 26}}));
}

TEST_CASE("col_sums accumulates per column") {
  const Tensor g = Tensor::from_rows({{1, 2, 3}, {4, 5, 6}});
  double out[3];
  kernels::col_sums(g.data(), out, 2, 3);
  CHECK(out[0] == 5.0);
  CHECK(out[1] == 7.0);
  CHECK(out[2] == 9.0);
}
