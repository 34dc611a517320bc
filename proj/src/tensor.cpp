#include "jcce/tensor.hpp"

namespace jcce {

Tensor Tensor::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Tensor();
  Tensor t(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != t.cols())
      throw DataError("ragged rows in tensor literal");
    for (size_t j = 0; j < t.cols(); ++j) t(i, j) = rows[i][j];
  }
  return t;
}

}  // namespace jcce
