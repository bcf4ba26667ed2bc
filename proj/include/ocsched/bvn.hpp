// Doubly-balanced stuffing and Birkhoff decomposition: augment a matrix so
// every row/column sums to its max port load, then peel perfect matchings
// off the positive support until the residual is numerically zero.
#pragma once

#include <vector>

#include "ocsched/model.hpp"

namespace ocsched {

struct BvnTerm {
  std::vector<int> permutation;  // permutation[i] = matched egress of ingress i
  double weight = 0.0;           // volume carried per port pair in this term
};

struct BvnDecomposition {
  std::vector<BvnTerm> terms;
  DemandMatrix stuffing;
};

struct StuffResult {
  DemandMatrix stuffed;
  DemandMatrix stuffing;
};

/// Greedy deficit pairing in ascending (row, column) order; target row and
/// column sum equals the max port load. Throws on the all-zero matrix.
StuffResult stuff_matrix(const DemandMatrix& demand);

/// Requires equal row/column sums (within 1e-9 relative). Entries below
/// 1e-12 * rho are flushed before each matching so the loop terminates.
/// Throws if the positive support loses its perfect matching.
std::vector<BvnTerm> birkhoff_decompose(const DemandMatrix& balanced);

/// stuff + decompose in one call.
BvnDecomposition bvn_decompose(const DemandMatrix& demand);

}  // namespace ocsched
