// Dense bounded-variable simplex over rows of the form  A x >= b  with box
// bounds on x. Built for the ordering relaxation's shape: every row carries
// exactly one unbounded "completion" column with a positive coefficient,
// which yields a feasible starting basis without a phase 1. Rows appended
// after a solve are absorbed with dual pivots, so the lazy-row driver pays
// a handful of iterations per round instead of a fresh solve.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ocsched {

enum class SimplexStatus { kOptimal, kIterationLimit, kUnbounded, kSingular };

struct SimplexOptions {
  double opt_tol = 1e-9;     // reduced-cost threshold
  double pivot_tol = 1e-10;  // smallest acceptable pivot element
  std::int64_t max_iterations = 0;  // 0 = 5000 + 200 * rows
  bool parallel_pivot = true;       // OpenMP row elimination
};

struct SimplexResult {
  SimplexStatus status = SimplexStatus::kSingular;
  std::vector<double> x;  // structural variable values
  double objective = 0.0;
  std::int64_t iterations = 0;
  std::int64_t bound_flips = 0;
};

enum class VarStatus : unsigned char { kAtLower, kAtUpper, kBasic };

class DenseSimplex {
 public:
  /// rows[r] is a dense coefficient vector over the structural columns.
  /// lift_var[r] names the column that can absorb any initial violation of
  /// row r (positive coefficient, upper bound +inf). initial_status gives
  /// the starting bound for each structural column (kAtLower/kAtUpper;
  /// entries for unbounded-above columns are ignored and treated as lower).
  DenseSimplex(std::vector<std::vector<double>> rows, std::vector<double> rhs,
               std::vector<double> cost, std::vector<double> lower, std::vector<double> upper,
               std::vector<int> lift_var, std::vector<VarStatus> initial_status,
               SimplexOptions options);

  /// First call builds the initial basis and optimizes; later calls
  /// re-optimize after append_rows (dual repair, then a primal sweep).
  SimplexResult solve();

  /// Adds constraint rows (same structural width) to a solved tableau,
  /// keeping the current basis. Call solve() afterwards.
  void append_rows(const std::vector<std::vector<double>>& rows, const std::vector<double>& rhs);

  /// Removes strictly slack rows (own surplus basic, beta > tol) whose
  /// droppable flag is set. Their surplus columns become all-zero and
  /// inert. Returns the removed row indices in the pre-removal numbering,
  /// ascending.
  std::vector<std::size_t> drop_slack_rows(double tol, const std::vector<char>& droppable);

  std::size_t num_rows() const { return nrows_; }

 private:
  double& tab(std::size_t r, std::size_t c) { return tableau_[r * stride_ + c]; }
  double tab(std::size_t r, std::size_t c) const { return tableau_[r * stride_ + c]; }

  void build_initial_basis();
  void pivot(std::size_t pivot_row, std::size_t entering);
  void refresh_from_scratch();
  void eliminate(std::size_t pivot_row, std::size_t entering);
  SimplexResult primal_loop();
  bool dual_repair(std::int64_t* iterations);
  SimplexResult extract(SimplexStatus status, std::int64_t iterations,
                        std::int64_t bound_flips);
  double bound_value(std::size_t col) const {
    return status_[col] == VarStatus::kAtUpper ? upper_[col] : lower_[col];
  }

  std::size_t nstruct_ = 0;
  std::size_t nrows_ = 0;
  std::size_t ncols_ = 0;   // structural + surplus
  std::size_t stride_ = 0;  // ncols + rhs column
  std::vector<double> tableau_;
  std::vector<double> cost_;
  std::vector<double> lower_, upper_;
  std::vector<double> reduced_;
  std::vector<double> beta_;  // values of basic variables, one per row
  std::vector<int> basic_;
  std::vector<int> surplus_col_;  // each row's own surplus column id
  std::vector<VarStatus> status_;
  std::vector<int> lift_var_;
  std::vector<double> rhs0_;
  std::vector<double> devex_;      // primal pricing weights, per column
  std::vector<double> dual_devex_;  // dual row-selection weights, per row
  SimplexOptions options_;
  bool built_ = false;
  bool bland_ = false;
  std::int64_t degenerate_streak_ = 0;
};

namespace simplex_detail {

/// Subtracts multiplier[r] * tableau[pivot_row] from every other row.
/// The parallel variant partitions rows across OpenMP threads; each row's
/// arithmetic is identical to the serial variant, so results are
/// bit-for-bit equal for any thread count.
void eliminate_rows_serial(double* tableau, std::size_t nrows, std::size_t stride,
                           std::size_t pivot_row, std::size_t entering_col);
void eliminate_rows_parallel(double* tableau, std::size_t nrows, std::size_t stride,
                             std::size_t pivot_row, std::size_t entering_col);

}  // namespace simplex_detail

}  // namespace ocsched
