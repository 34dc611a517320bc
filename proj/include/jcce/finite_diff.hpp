#pragma once

#include <functional>
#include <vector>

#include "jcce/tape.hpp"

namespace jcce {

// Central-difference gradient check. `forward` must recompute the loss from
// the current parameter values, deterministically (dropout off). Compares
// (f(t+h)-f(t-h))/2h against the gradients already stored in each parameter
// and returns the maximum relative error, with relative defined as
// |fd - bp| / max(1, |fd|, |bp|). Entries sitting exactly on a ReLU kink are
// the caller's responsibility to avoid; random inputs make them measure-zero.
double finite_diff_check(const std::function<double()>& forward,
                         const std::vector<Parameter*>& params,
                         double h = 1e-5);

}  // namespace jcce
