#include "ocsched/bvn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ocsched {

namespace {

// Kuhn augmenting-path search on the positive support, ascending vertex
// order for reproducibility.
bool augment(const DemandMatrix& b, int i, std::vector<int>& match_of_col,
             std::vector<char>& visited) {
  for (int j = 0; j < b.n; ++j) {
    if (b.at(i, j) > 0.0 && !visited[j]) {
      visited[j] = 1;
      if (match_of_col[j] < 0 || augment(b, match_of_col[j], match_of_col, visited)) {
        match_of_col[j] = i;
        return true;
      }
    }
  }
  return false;
}

bool perfect_matching(const DemandMatrix& b, std::vector<int>& perm) {
  const int n = b.n;
  std::vector<int> match_of_col(n, -1);
  for (int i = 0; i < n; ++i) {
    std::vector<char> visited(n, 0);
    if (!augment(b, i, match_of_col, visited)) return false;
  }
  perm.assign(n, -1);
  for (int j = 0; j < n; ++j) perm[match_of_col[j]] = j;
  return true;
}

}  // namespace

StuffResult stuff_matrix(const DemandMatrix& demand) {
  if (demand.is_zero()) throw std::invalid_argument("stuff_matrix: all-zero matrix");
  const int n = demand.n;
  std::vector<double> row_sum(n, 0.0), col_sum(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      row_sum[i] += demand.at(i, j);
      col_sum[j] += demand.at(i, j);
    }
  }
  double rho = 0.0;
  for (int i = 0; i < n; ++i) rho = std::max({rho, row_sum[i], col_sum[i]});

  StuffResult out;
  out.stuffed = demand;
  out.stuffing = DemandMatrix(n);
  int i = 0, j = 0;
  while (i < n && j < n) {
    const double rd = rho - row_sum[i];
    const double cd = rho - col_sum[j];
    if (rd <= 0.0) {
      ++i;
      continue;
    }
    if (cd <= 0.0) {
      ++j;
      continue;
    }
    const double add = std::min(rd, cd);
    out.stuffing.at(i, j) += add;
    out.stuffed.at(i, j) += add;
    row_sum[i] += add;
    col_sum[j] += add;
  }
  return out;
}

std::vector<BvnTerm> birkhoff_decompose(const DemandMatrix& balanced) {
  const int n = balanced.n;
  std::vector<double> row_sum(n, 0.0), col_sum(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      row_sum[i] += balanced.at(i, j);
      col_sum[j] += balanced.at(i, j);
    }
  }
  double rho = 0.0;
  for (int i = 0; i < n; ++i) rho = std::max(rho, row_sum[i]);
  for (int i = 0; i < n; ++i) {
    const double tol = 1e-9 * std::max(1.0, rho);
    if (std::abs(row_sum[i] - rho) > tol || std::abs(col_sum[i] - rho) > tol) {
      throw std::invalid_argument("birkhoff_decompose: row/column sums are not balanced");
    }
  }
  std::vector<BvnTerm> terms;
  if (rho <= 0.0) return terms;

  DemandMatrix residual = balanced;
  const double flush = 1e-12 * rho;
  const double done = 1e-9 * rho;
  const int max_terms = n * n - 2 * n + 2;
  while (true) {
    double max_entry = 0.0;
    for (double& e : residual.entries) {
      if (e < flush) e = 0.0;
      max_entry = std::max(max_entry, e);
    }
    if (max_entry == 0.0) break;

    std::vector<int> perm;
    if (!perfect_matching(residual, perm)) {
      if (max_entry <= done) break;  // numerically zero residual
      throw std::runtime_error("birkhoff_decompose: no perfect matching on positive support");
    }
    double w = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) w = std::min(w, residual.at(i, perm[i]));
    for (int i = 0; i < n; ++i) residual.at(i, perm[i]) -= w;
    terms.push_back({std::move(perm), w});
    if (static_cast<int>(terms.size()) > max_terms) {
      throw std::runtime_error("birkhoff_decompose: term count exceeded the Birkhoff bound");
    }
  }
  return terms;
}

BvnDecomposition bvn_decompose(const DemandMatrix& demand) {
  StuffResult stuffed = stuff_matrix(demand);
  BvnDecomposition out;
  out.stuffing = std::move(stuffed.stuffing);
  out.terms = birkhoff_decompose(stuffed.stuffed);
  return out;
}

}  // namespace ocsched
