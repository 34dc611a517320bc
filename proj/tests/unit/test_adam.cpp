#include <cmath>
#include <vector>

#include "doctest.h"
#include "jcce/adam.hpp"
#include "jcce/rng.hpp"
#include "jcce/tape.hpp"

using namespace jcce;

namespace {

double sq_loss(Parameter& p) {
  Tape tape;
  const auto loss = tape.sq_frobenius(tape.param(p));
  tape.backward(loss);
  return tape.scalar(loss);
}

}  // namespace

TEST_CASE("first step moves by lr * g / (|g| + eps) after bias correction") {
  Parameter theta(Tensor::from_rows({{1.0, -2.0, 0.5}}), 0);
  const Tensor start = theta.value;
  AdamConfig cfg;  // lr 1e-3
  AdamState adam({&theta}, cfg);
  sq_loss(theta);  // g = 2 * theta
  adam.step();
  for (size_t i = 0; i < 3; ++i) {
    const double g = 2.0 * start.at(i);
    const double expect =
        start.at(i) - cfg.lr * g / (std::fabs(g) + cfg.epsilon);
    CHECK(theta.value.at(i) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(adam.t() == 1);
}

TEST_CASE("many steps match an independent reference implementation") {
  Rng rng(41);
  Parameter theta(Tensor(2, 3), 0);
  for (size_t i = 0; i < theta.value.size(); ++i)
    theta.value.at(i) = rng.uniform(-2.0, 2.0);
  Tensor ref = theta.value;

  AdamConfig cfg;
  cfg.lr = 0.05;
  AdamState adam({&theta}, cfg);
  std::vector<double> m(ref.size(), 0.0), v(ref.size(), 0.0);
  for (int t = 1; t <= 25; ++t) {
    sq_loss(theta);
    adam.step();
    for (size_t i = 0; i < ref.size(); ++i) {
      const double g = 2.0 * ref.at(i);
      m[i] = cfg.beta1 * m[i] + (1 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1 - cfg.beta2) * g * g;
      const double mhat = m[i] / (1 - std::pow(cfg.beta1, t));
      const double vhat = v[i] / (1 - std::pow(cfg.beta2, t));
      ref.at(i) -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
    for (size_t i = 0; i < ref.size(); ++i)
      REQUIRE(theta.value.at(i) == doctest::Approx(ref.at(i)).epsilon(1e-12));
  }
  // Optimizing sum of squares should have shrunk every coordinate.
  for (size_t i = 0; i < ref.size(); ++i)
    CHECK(std::fabs(theta.value.at(i)) < 2.0);
}

TEST_CASE("step without a fresh gradient is a contract error") {
  Parameter theta(Tensor::from_rows({{1.0}}), 0);
  AdamState adam({&theta}, AdamConfig{});
  CHECK_THROWS_AS(adam.step(), ContractError);
  sq_loss(theta);
  adam.step();
  CHECK_THROWS_AS(adam.step(), ContractError);  // gradient already consumed
}
