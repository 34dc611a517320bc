#include "jcce/finite_diff.hpp"

#include <cmath>

namespace jcce {

double finite_diff_check(const std::function<double()>& forward,
                         const std::vector<Parameter*>& params, double h) {
  double max_rel = 0.0;
  for (Parameter* p : params) {
    for (size_t j = 0; j < p->value.size(); ++j) {
      const double saved = p->value.at(j);
      p->value.at(j) = saved + h;
      const double fp = forward();
      p->value.at(j) = saved - h;
      const double fm = forward();
      p->value.at(j) = saved;
      const double fd = (fp - fm) / (2.0 * h);
      const double bp = p->grad.at(j);
      const double denom = std::max({1.0, std::abs(fd), std::abs(bp)});
      max_rel = std::max(max_rel, std::abs(fd - bp) / denom);
    }
  }
  return max_rel;
}

}  // namespace jcce
