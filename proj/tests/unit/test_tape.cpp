#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "jcce/finite_diff.hpp"
#include "jcce/rng.hpp"
#include "jcce/tape.hpp"

using namespace jcce;

namespace {

Tensor random_tensor(size_t r, size_t c, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
  Tensor t(r, c);
  for (size_t i = 0; i < t.size(); ++i) t.at(i) = rng.uniform(lo, hi);
  return t;
}

// Runs finite_diff_check on a scalar-producing graph builder. The builder is
// re-invoked per probe so the tape always reflects the current parameters.
double check_builder(std::vector<Parameter*> params,
                     const std::function<double()>& forward) {
  forward();  // populate gradients once
  return finite_diff_check(forward, params);
}

}  // namespace

TEST_CASE("matmul forward and gradient") {
  Rng rng(31);
  Parameter a(random_tensor(3, 4, rng), 0);
  Parameter b(random_tensor(4, 2, rng), 1);
  auto forward = [&]() {
    Tape tape;
    const auto loss = tape.mean_all(tape.matmul(tape.param(a), tape.param(b)));
    tape.backward(loss);
    return tape.scalar(loss);
  };
  CHECK(check_builder({&a, &b}, forward) < 1e-7);
}

TEST_CASE("matmul_nt gradient") {
  Rng rng(32);
  Parameter a(random_tensor(3, 5, rng), 0);
  Parameter b(random_tensor(4, 5, rng), 1);
  auto forward = [&]() {
    Tape tape;
    const auto loss =
        tape.mean_all(tape.matmul_nt(tape.param(a), tape.param(b)));
    tape.backward(loss);
    return tape.scalar(loss);
  };
  CHECK(check_builder({&a, &b}, forward) < 1e-7);
}

TEST_CASE("matmul rejects mismatched shapes") {
  Tape tape;
  Parameter a(Tensor(2, 3), 0);
  Parameter b(Tensor(4, 2), 1);
  CHECK_THROWS_AS(tape.matmul(tape.param(a), tape.param(b)), DimensionError);
}

TEST_CASE("sparse_linear matches dense gather and its gradient checks out") {
  Rng rng(33);
  Parameter w(random_tensor(6, 3, rng), 0);
  Parameter bias(random_tensor(1, 3, rng), 1);
  std::vector<SparseVec> batch(2);
  batch[0].dim = 6;
  batch[0].push(1, 1.0);
  batch[0].push(4, 1.0);
  batch[1].dim = 6;
  batch[1].push(0, 2.0);

  Tape tape;
  const auto out = tape.sparse_linear(tape.param(w), tape.param(bias), batch);
  const Tensor& v = tape.value(out);
  REQUIRE(v.rows() == 2);
  REQUIRE(v.cols() == 3);
  for (size_t j = 0; j < 3; ++j) {
    CHECK(v(0, j) ==
          doctest::Approx(w.value(1, j) + w.value(4, j) + bias.value(0, j)));
    CHECK(v(1, j) == doctest::Approx(2.0 * w.value(0, j) + bias.value(0, j)));
  }

  auto forward = [&]() {
    Tape t2;
    const auto loss = t2.mean_all(
        t2.sparse_linear(t2.param(w), t2.param(bias), batch));
    t2.backward(loss);
    return t2.scalar(loss);
  };
  CHECK(check_builder({&w, &bias}, forward) < 1e-7);
}

TEST_CASE("add_bias relu add sub add_scaled scale gradients") {
  Rng rng(34);
  Parameter x(random_tensor(4, 3, rng), 0);
  Parameter y(random_tensor(4, 3, rng), 1);
  Parameter bias(random_tensor(1, 3, rng), 2);
  // Keep entries away from the ReLU kink so the central difference is clean.
  for (size_t i = 0; i < x.value.size(); ++i)
    if (std::fabs(x.value.at(i)) < 0.05) x.value.at(i) += 0.1;

  auto forward = [&]() {
    Tape tape;
    const auto xb = tape.add_bias(tape.param(x), tape.param(bias));
    const auto r = tape.relu(xb);
    const auto s = tape.add_scaled(tape.add(r, tape.param(y)),
                                   tape.sub(r, tape.param(y)), 0.7, -1.3);
    const auto loss = tape.mean_all(tape.scale(s, 2.5));
    tape.backward(loss);
    return tape.scalar(loss);
  };
  CHECK(check_builder({&x, &y, &bias}, forward) < 1e-6);
}

TEST_CASE("row_logsumexp diag mean_all sq_frobenius gradients") {
  Rng rng(35);
  Parameter x(random_tensor(5, 5, rng, -3.0, 3.0), 0);
  auto forward = [&]() {
    Tape tape;
    const auto id = tape.param(x);
    const auto lse = tape.row_logsumexp(id);
    const auto d = tape.diag(id);
    const auto loss = tape.add(tape.mean_all(tape.sub(lse, d)),
                               tape.scale(tape.sq_frobenius(id), 0.01));
    tape.backward(loss);
    return tape.scalar(loss);
  };
  CHECK(check_builder({&x}, forward) < 1e-4);
}

TEST_CASE("row_logsumexp is stable for large magnitudes") {
  Tape tape;
  const auto s = tape.constant(Tensor::from_rows({{1000.0, 1000.0}}));
  const auto lse = tape.row_logsumexp(s);
  CHECK(tape.value(lse)(0, 0) == doctest::Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("bce_with_logits matches the closed form and its gradient") {
  Rng rng(36);
  Parameter z(random_tensor(6, 1, rng, -2.0, 2.0), 0);
  Tensor targets(6, 1);
  for (size_t i = 0; i < 6; ++i) targets.at(i) = i % 2;

  Tape tape;
  const auto loss = tape.bce_with_logits_mean(tape.param(z), targets);
  double expect = 0.0;
  for (size_t i = 0; i < 6; ++i) {
    const double zi = z.value.at(i);
    expect += std::log1p(std::exp(-std::fabs(zi))) + std::max(zi, 0.0) -
              targets.at(i) * zi;
  }
  expect /= 6.0;
  CHECK(tape.scalar(loss) == doctest::Approx(expect).epsilon(1e-12));

  auto forward = [&]() {
    Tape t2;
    const auto l = t2.bce_with_logits_mean(t2.param(z), targets);
    t2.backward(l);
    return t2.scalar(l);
  };
  CHECK(check_builder({&z}, forward) < 1e-4);
}

TEST_CASE("dropout semantics") {
  Rng rng(37);
  Parameter x(random_tensor(8, 8, rng), 0);

  SUBCASE("inference and rate zero are identities") {
    Tape tape;
    Rng drop(1);
    const auto id = tape.param(x);
    CHECK(tape.value(tape.dropout(id, 0.5, false, drop)) == x.value);
    CHECK(tape.value(tape.dropout(id, 0.0, true, drop)) == x.value);
  }

  SUBCASE("training keeps or scales entries") {
    Tape tape;
    Rng drop(2);
    const auto out = tape.dropout(tape.param(x), 0.5, true, drop);
    const Tensor& v = tape.value(out);
    size_t zeros = 0;
    for (size_t i = 0; i < v.size(); ++i) {
      const bool dropped = v.at(i) == 0.0;
      const bool scaled =
          std::fabs(v.at(i) - 2.0 * x.value.at(i)) < 1e-12;
      CHECK((dropped || scaled));
      zeros += dropped;
    }
    CHECK(zeros > 10);
    CHECK(zeros < 54);
  }

  SUBCASE("gradient flows only through survivors") {
    auto forward = [&]() {
      Tape tape;
      Rng drop(3);  // same mask on every probe
      const auto loss =
          tape.mean_all(tape.dropout(tape.param(x), 0.3, true, drop));
      tape.backward(loss);
      return tape.scalar(loss);
    };
    CHECK(check_builder({&x}, forward) < 1e-7);
  }

  SUBCASE("invalid rate") {
    Tape tape;
    Rng drop(4);
    CHECK_THROWS_AS(tape.dropout(tape.param(x), 1.0, true, drop), ConfigError);
  }
}

TEST_CASE("multi-consumer nodes accumulate gradients") {
  Parameter x(Tensor::from_rows({{2.0, -1.0}}), 0);
  Tape tape;
  const auto id = tape.param(x);
  const auto loss = tape.mean_all(tape.add(id, id));
  tape.backward(loss);
  // d/dx mean(2x) = 2/len
  CHECK(x.grad(0, 0) == doctest::Approx(1.0));
  CHECK(x.grad(0, 1) == doctest::Approx(1.0));
  CHECK(x.has_grad);
}

TEST_CASE("backward is single-shot and scalar-only") {
  Parameter x(Tensor::from_rows({{1.0, 2.0}}), 0);
  Tape tape;
  const auto id = tape.param(x);
  const auto loss = tape.mean_all(id);
  CHECK_THROWS_AS(tape.backward(id), ContractError);  // not a scalar
  tape.backward(loss);
  CHECK_THROWS_AS(tape.backward(loss), ContractError);
}
