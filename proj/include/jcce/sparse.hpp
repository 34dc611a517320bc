#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "jcce/error.hpp"

namespace jcce {

// Sparse vector with strictly increasing indices and finite nonzero values.
// The encoders emit one/multi-hot vectors, so values are 1.0 in practice.
struct SparseVec {
  size_t dim = 0;
  std::vector<size_t> indices;
  std::vector<double> values;

  void push(size_t index, double value) {
    if (index >= dim)
      throw DataError("sparse index " + std::to_string(index) +
                      " out of range for dim " + std::to_string(dim));
    if (!indices.empty() && index <= indices.back())
      throw DataError("sparse indices must be strictly increasing");
    indices.push_back(index);
    values.push_back(value);
  }

  size_t nnz() const { return indices.size(); }
};

}  // namespace jcce
