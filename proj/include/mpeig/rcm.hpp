#pragma once

#include <cstddef>
#include <vector>

#include "mpeig/csr_matrix.hpp"

namespace mpeig {

// Reverse Cuthill-McKee over a symmetric pattern.  BFS starts at the
// minimum-degree vertex of each component (ties to the lowest index),
// neighbors are visited by ascending (degree, index), and each component's
// order is reversed.  Fully deterministic; isolated vertices keep their
// positions, so a diagonal matrix maps to the identity permutation.
std::vector<index_t> rcm_ordering_pattern(std::size_t n,
                                          const std::vector<index_t>& row_ptr,
                                          const std::vector<index_t>& col_idx);

template <class T>
std::vector<index_t> rcm_ordering(const CsrMatrix<T>& A) {
  return rcm_ordering_pattern(A.n(), A.row_ptr(), A.col_idx());
}

}  // namespace mpeig
