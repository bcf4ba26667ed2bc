#include "ocsched/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace ocsched {

namespace simplex_detail {

static inline void eliminate_one_row(double* row, const double* prow, std::size_t stride,
                                     std::size_t entering_col) {
  const double f = row[entering_col];
  if (f == 0.0) return;
  for (std::size_t c = 0; c < stride; ++c) row[c] -= f * prow[c];
  row[entering_col] = 0.0;
}

void eliminate_rows_serial(double* tableau, std::size_t nrows, std::size_t stride,
                           std::size_t pivot_row, std::size_t entering_col) {
  const double* prow = tableau + pivot_row * stride;
  for (std::size_t r = 0; r < nrows; ++r) {
    if (r == pivot_row) continue;
    eliminate_one_row(tableau + r * stride, prow, stride, entering_col);
  }
}

void eliminate_rows_parallel(double* tableau, std::size_t nrows, std::size_t stride,
                             std::size_t pivot_row, std::size_t entering_col) {
  const double* prow = tableau + pivot_row * stride;
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < nrows; ++r) {
    if (r == pivot_row) continue;
    eliminate_one_row(tableau + r * stride, prow, stride, entering_col);
  }
}

}  // namespace simplex_detail

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DenseSimplex::DenseSimplex(std::vector<std::vector<double>> rows, std::vector<double> rhs,
                           std::vector<double> cost, std::vector<double> lower,
                           std::vector<double> upper, std::vector<int> lift_var,
                           std::vector<VarStatus> initial_status, SimplexOptions options)
    : cost_(std::move(cost)),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      lift_var_(std::move(lift_var)),
      rhs0_(std::move(rhs)),
      options_(options) {
  nstruct_ = cost_.size();
  nrows_ = rows.size();
  ncols_ = nstruct_ + nrows_;
  stride_ = ncols_ + 1;  // trailing right-hand-side column

  // Surplus columns: A x - s = b, s in [0, inf).
  cost_.resize(ncols_, 0.0);
  lower_.resize(ncols_, 0.0);
  upper_.resize(ncols_, kInf);

  tableau_.assign(nrows_ * stride_, 0.0);
  surplus_col_.resize(nrows_);
  for (std::size_t r = 0; r < nrows_; ++r) {
    if (rows[r].size() != nstruct_) throw std::invalid_argument("simplex: ragged row");
    for (std::size_t c = 0; c < nstruct_; ++c) tab(r, c) = rows[r][c];
    surplus_col_[r] = static_cast<int>(nstruct_ + r);
    tab(r, nstruct_ + r) = -1.0;
    tab(r, ncols_) = rhs0_[r];
  }

  status_.assign(ncols_, VarStatus::kAtLower);
  for (std::size_t c = 0; c < nstruct_ && c < initial_status.size(); ++c) {
    if (initial_status[c] == VarStatus::kAtUpper && std::isfinite(upper_[c])) {
      status_[c] = VarStatus::kAtUpper;
    }
  }
  basic_.assign(nrows_, -1);
}

void DenseSimplex::eliminate(std::size_t pivot_row, std::size_t entering) {
  if (options_.parallel_pivot) {
    simplex_detail::eliminate_rows_parallel(tableau_.data(), nrows_, stride_, pivot_row,
                                            entering);
  } else {
    simplex_detail::eliminate_rows_serial(tableau_.data(), nrows_, stride_, pivot_row, entering);
  }
}

void DenseSimplex::build_initial_basis() {
  // Nonbasic activity of each row at the starting point decides whether the
  // row's lift column must be raised above its lower bound.
  std::vector<double> lift_value(nstruct_, -kInf);
  std::vector<std::size_t> lift_row(nstruct_, 0);
  for (std::size_t c = 0; c < nstruct_; ++c) {
    if (lower_[c] > -kInf) lift_value[c] = lower_[c];
  }
  for (std::size_t r = 0; r < nrows_; ++r) {
    const int lift = lift_var_[r];
    if (lift < 0) continue;
    double other = 0.0;
    for (std::size_t c = 0; c < nstruct_; ++c) {
      if (c == static_cast<std::size_t>(lift)) continue;
      const double a = tab(r, c);
      if (a != 0.0) other += a * bound_value(c);
    }
    const double coef = tab(r, static_cast<std::size_t>(lift));
    if (!(coef > 0.0)) throw std::invalid_argument("simplex: lift column must be positive");
    const double needed = (rhs0_[r] - other) / coef;
    if (needed > lift_value[lift]) {
      lift_value[lift] = needed;
      lift_row[lift] = r;
    }
  }

  for (std::size_t r = 0; r < nrows_; ++r) basic_[r] = surplus_col_[r];
  for (std::size_t c = 0; c < nstruct_; ++c) {
    if (lift_value[c] > lower_[c]) {
      basic_[lift_row[c]] = static_cast<int>(c);
      status_[c] = VarStatus::kBasic;
    }
  }

  // Bring the tableau to B^{-1}[A | -I | b]. Surplus-basic rows only need a
  // sign flip (their column has a single entry); lift pivots eliminate the
  // lift column from sibling rows. Lift columns never appear in each
  // other's pivot rows, so the order below is safe.
  for (std::size_t r = 0; r < nrows_; ++r) {
    if (basic_[r] == surplus_col_[r]) {
      for (std::size_t c = 0; c < stride_; ++c) tab(r, c) = -tab(r, c);
    }
  }
  for (std::size_t r = 0; r < nrows_; ++r) {
    const std::size_t col = static_cast<std::size_t>(basic_[r]);
    if (col < nstruct_) {
      const double piv = tab(r, col);
      const double inv = 1.0 / piv;
      for (std::size_t c = 0; c < stride_; ++c) tab(r, c) *= inv;
      tab(r, col) = 1.0;
      eliminate(r, col);
    }
  }
  refresh_from_scratch();
}

void DenseSimplex::refresh_from_scratch() {
  beta_.assign(nrows_, 0.0);
  for (std::size_t r = 0; r < nrows_; ++r) {
    double v = tab(r, ncols_);
    for (std::size_t c = 0; c < ncols_; ++c) {
      if (status_[c] == VarStatus::kBasic) continue;
      const double a = tab(r, c);
      if (a != 0.0) v -= a * bound_value(c);
    }
    beta_[r] = v;
  }
  reduced_ = cost_;
  reduced_.resize(stride_, 0.0);
  for (std::size_t r = 0; r < nrows_; ++r) {
    const double cb = cost_[static_cast<std::size_t>(basic_[r])];
    if (cb != 0.0) {
      for (std::size_t c = 0; c < ncols_; ++c) reduced_[c] -= cb * tab(r, c);
    }
  }
  for (std::size_t r = 0; r < nrows_; ++r) reduced_[static_cast<std::size_t>(basic_[r])] = 0.0;
  devex_.assign(ncols_, 1.0);  // start a fresh reference framework
  dual_devex_.assign(nrows_, 1.0);
}

void DenseSimplex::pivot(std::size_t pivot_row, std::size_t entering) {
  const double piv = tab(pivot_row, entering);
  const double inv = 1.0 / piv;
  double* prow = tableau_.data() + pivot_row * stride_;
  for (std::size_t c = 0; c < stride_; ++c) prow[c] *= inv;
  prow[entering] = 1.0;
  eliminate(pivot_row, entering);
  const double dq = reduced_[entering];
  if (dq != 0.0) {
    for (std::size_t c = 0; c < ncols_; ++c) reduced_[c] -= dq * prow[c];
  }
  reduced_[entering] = 0.0;

  // Devex reference-framework update from the normalized pivot row.
  const double wq = devex_[entering];
  double wmax = 1.0;
  for (std::size_t c = 0; c < ncols_; ++c) {
    const double a = prow[c];
    if (a != 0.0) {
      const double candidate = a * a * wq;
      if (candidate > devex_[c]) devex_[c] = candidate;
      if (devex_[c] > wmax) wmax = devex_[c];
    }
  }
  devex_[static_cast<std::size_t>(basic_[pivot_row])] = std::max(wq * inv * inv, 1.0);
  if (wmax > 1e12) devex_.assign(ncols_, 1.0);
}

void DenseSimplex::append_rows(const std::vector<std::vector<double>>& rows,
                               const std::vector<double>& rhs) {
  if (!built_) throw std::logic_error("append_rows requires a prior solve");
  const std::size_t added = rows.size();
  if (added == 0) return;

  // Snapshot current structural values before the layout changes.
  std::vector<double> x(nstruct_);
  for (std::size_t c = 0; c < nstruct_; ++c) x[c] = bound_value(c);
  for (std::size_t r = 0; r < nrows_; ++r) {
    if (static_cast<std::size_t>(basic_[r]) < nstruct_) {
      x[static_cast<std::size_t>(basic_[r])] = beta_[r];
    }
  }

  const std::size_t old_rows = nrows_;
  const std::size_t old_ncols = ncols_;
  const std::size_t old_stride = stride_;
  nrows_ += added;
  ncols_ = old_ncols + added;  // fresh surplus columns at the end
  stride_ = ncols_ + 1;

  // Widen the tableau: surplus block grows, the rhs column moves right.
  std::vector<double> wide(nrows_ * stride_, 0.0);
  for (std::size_t r = 0; r < old_rows; ++r) {
    const double* src = tableau_.data() + r * old_stride;
    double* dst = wide.data() + r * stride_;
    std::copy(src, src + old_ncols, dst);
    dst[ncols_] = src[old_ncols];
  }
  tableau_ = std::move(wide);

  cost_.resize(ncols_, 0.0);
  lower_.resize(ncols_, 0.0);
  upper_.resize(ncols_, kInf);
  status_.resize(ncols_, VarStatus::kAtLower);
  devex_.resize(ncols_, 1.0);
  {
    std::vector<double> d(stride_, 0.0);
    std::copy(reduced_.begin(), reduced_.begin() + old_ncols, d.begin());
    reduced_ = std::move(d);
  }

  for (std::size_t a = 0; a < added; ++a) {
    const std::size_t r = old_rows + a;
    const std::size_t surplus = old_ncols + a;
    if (rows[a].size() != nstruct_) throw std::invalid_argument("append_rows: ragged row");
    double* dst = tableau_.data() + r * stride_;
    for (std::size_t c = 0; c < nstruct_; ++c) dst[c] = rows[a][c];
    dst[surplus] = -1.0;
    dst[ncols_] = rhs[a];

    // Express the new row in the current basis: clear the structural basic
    // columns (old surplus columns cannot appear in a fresh constraint).
    for (std::size_t rr = 0; rr < old_rows; ++rr) {
      const std::size_t bcol = static_cast<std::size_t>(basic_[rr]);
      if (bcol >= nstruct_) continue;
      const double f = dst[bcol];
      if (f == 0.0) continue;
      const double* prow = tableau_.data() + rr * stride_;
      for (std::size_t c = 0; c < stride_; ++c) dst[c] -= f * prow[c];
      dst[bcol] = 0.0;
    }
    // Flip so the row's own surplus is +1 basic.
    for (std::size_t c = 0; c < stride_; ++c) dst[c] = -dst[c];

    double activity = 0.0;
    for (std::size_t c = 0; c < nstruct_; ++c) {
      if (rows[a][c] != 0.0) activity += rows[a][c] * x[c];
    }
    basic_.push_back(static_cast<int>(surplus));
    surplus_col_.push_back(static_cast<int>(surplus));
    status_[surplus] = VarStatus::kBasic;
    beta_.push_back(activity - rhs[a]);  // negative = violated, dual repairs it
    rhs0_.push_back(rhs[a]);
    lift_var_.push_back(-1);
    dual_devex_.push_back(1.0);
  }
}

std::vector<std::size_t> DenseSimplex::drop_slack_rows(double tol,
                                                       const std::vector<char>& droppable) {
  std::vector<std::size_t> dropped;
  if (!built_) return dropped;
  std::vector<char> keep(nrows_, 1);
  for (std::size_t r = 0; r < nrows_; ++r) {
    const std::size_t own_surplus = static_cast<std::size_t>(surplus_col_[r]);
    if (r < droppable.size() && droppable[r] && basic_[r] == surplus_col_[r] &&
        beta_[r] > tol * std::max(1.0, std::abs(beta_[r]))) {
      keep[r] = 0;
      dropped.push_back(r);
      // The surplus column of a dropped row is a unit vector, so after the
      // row goes it is all-zero: cost 0, reduced cost 0, never re-enters.
      status_[own_surplus] = VarStatus::kAtLower;
    }
  }
  if (dropped.empty()) return dropped;

  std::size_t w = 0;
  for (std::size_t r = 0; r < nrows_; ++r) {
    if (!keep[r]) continue;
    if (w != r) {
      std::copy(tableau_.begin() + r * stride_, tableau_.begin() + (r + 1) * stride_,
                tableau_.begin() + w * stride_);
      basic_[w] = basic_[r];
      surplus_col_[w] = surplus_col_[r];
      beta_[w] = beta_[r];
      rhs0_[w] = rhs0_[r];
      lift_var_[w] = lift_var_[r];
      dual_devex_[w] = dual_devex_[r];
    }
    ++w;
  }
  nrows_ = w;
  tableau_.resize(nrows_ * stride_);
  basic_.resize(nrows_);
  surplus_col_.resize(nrows_);
  beta_.resize(nrows_);
  rhs0_.resize(nrows_);
  lift_var_.resize(nrows_);
  dual_devex_.resize(nrows_);
  // Column layout (ncols_, stride_) is kept; dropped surplus columns stay
  // as inert zero columns until the next append widens the tableau anyway.
  return dropped;
}

bool DenseSimplex::dual_repair(std::int64_t* iterations) {
  const double feas_tol = 1e-9;
  const std::int64_t cap = 4000 + 40 * static_cast<std::int64_t>(nrows_);
  std::int64_t steps = 0;
  const bool debug = std::getenv("OCSCHED_LP_DEBUG") != nullptr;
  while (true) {
    if (debug && steps % 100 == 0) {
      double total_infeas = 0.0;
      for (std::size_t r = 0; r < nrows_; ++r) {
        const std::size_t b = static_cast<std::size_t>(basic_[r]);
        total_infeas += std::max(0.0, lower_[b] - beta_[r]);
        if (upper_[b] < kInf) total_infeas += std::max(0.0, beta_[r] - upper_[b]);
      }
      std::fprintf(stderr, "    dual step %lld: total infeasibility %.6g\n",
                   static_cast<long long>(steps), total_infeas);
    }
    // Leaving row: devex-weighted worst bound violation.
    std::ptrdiff_t leave = -1;
    bool to_lower = true;
    double best_score = 0.0;
    for (std::size_t r = 0; r < nrows_; ++r) {
      const std::size_t b = static_cast<std::size_t>(basic_[r]);
      const double scale = std::max(1.0, std::abs(beta_[r]));
      double gap = lower_[b] - beta_[r];
      bool lowered = true;
      if (upper_[b] < kInf && beta_[r] - upper_[b] > gap) {
        gap = beta_[r] - upper_[b];
        lowered = false;
      }
      if (gap <= feas_tol * scale) continue;
      const double score = gap * gap / dual_devex_[r];
      if (score > best_score) {
        best_score = score;
        leave = static_cast<std::ptrdiff_t>(r);
        to_lower = lowered;
      }
    }
    if (leave < 0) {
      *iterations = steps;
      return true;
    }
    if (++steps > cap) {
      *iterations = steps;
      return false;
    }

    const std::size_t r = static_cast<std::size_t>(leave);
    const double* prow = tableau_.data() + r * stride_;

    // Long-step ratio test: walk candidates in dual-ratio order; a boxed
    // candidate that cannot absorb the remaining gap within its own range
    // is bound-flipped and the walk continues with the next one.
    struct Candidate {
      double theta;
      double alpha;
      std::size_t col;
    };
    std::vector<Candidate> candidates;
    for (std::size_t c = 0; c < ncols_; ++c) {
      if (status_[c] == VarStatus::kBasic) continue;
      const double alpha = prow[c];
      if (std::abs(alpha) <= options_.pivot_tol) continue;
      const bool at_lower = status_[c] == VarStatus::kAtLower;
      // Legality: the entering move must push beta_r toward its target.
      const bool legal = to_lower ? (at_lower ? alpha < 0.0 : alpha > 0.0)
                                  : (at_lower ? alpha > 0.0 : alpha < 0.0);
      if (!legal) continue;
      candidates.push_back({std::abs(reduced_[c] / alpha), alpha, c});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.theta != b.theta) return a.theta < b.theta;
      if (std::abs(a.alpha) != std::abs(b.alpha)) return std::abs(a.alpha) > std::abs(b.alpha);
      return a.col < b.col;
    });

    const std::size_t leaving = static_cast<std::size_t>(basic_[r]);
    const double target = to_lower ? lower_[leaving] : upper_[leaving];
    double remaining = target - beta_[r];  // signed gap still to close
    std::size_t entering = ncols_;
    for (const Candidate& cand : candidates) {
      const double range = upper_[cand.col] - lower_[cand.col];
      // Moving the candidate across its whole range changes beta_r by
      // -alpha * (signed range step); the sign is legal by construction.
      const double full_effect = std::isfinite(range) ? std::abs(cand.alpha) * range : kInf;
      if (full_effect >= std::abs(remaining) - 1e-12) {
        entering = cand.col;
        break;
      }
      // Bound flip, then keep walking.
      const int dir = status_[cand.col] == VarStatus::kAtLower ? +1 : -1;
      const double step = range * dir;
      for (std::size_t rr = 0; rr < nrows_; ++rr) {
        const double a = tab(rr, cand.col);
        if (a != 0.0) beta_[rr] -= a * step;
      }
      status_[cand.col] =
          status_[cand.col] == VarStatus::kAtLower ? VarStatus::kAtUpper : VarStatus::kAtLower;
      remaining = target - beta_[r];
    }
    if (entering == ncols_) {
      *iterations = steps;
      return false;  // gap cannot be closed; caller restarts cold
    }

    const double delta = remaining / (-tab(r, entering));
    // Dual devex update needs the transformed entering column pre-pivot.
    const double pivot_element = tab(r, entering);
    const double wr = dual_devex_[r];
    for (std::size_t rr = 0; rr < nrows_; ++rr) {
      if (rr == r) continue;
      const double h = tab(rr, entering);
      if (h != 0.0) {
        beta_[rr] -= h * delta;
        const double ratio = h / pivot_element;
        const double candidate = ratio * ratio * wr;
        if (candidate > dual_devex_[rr]) dual_devex_[rr] = candidate;
      }
    }
    dual_devex_[r] = std::max(wr / (pivot_element * pivot_element), 1.0);
    if (dual_devex_[r] > 1e12) dual_devex_.assign(nrows_, 1.0);
    const double entering_value = bound_value(entering) + delta;
    status_[leaving] = to_lower ? VarStatus::kAtLower : VarStatus::kAtUpper;
    pivot(r, entering);
    basic_[r] = static_cast<int>(entering);
    status_[entering] = VarStatus::kBasic;
    beta_[r] = entering_value;
  }
}

SimplexResult DenseSimplex::extract(SimplexStatus status, std::int64_t iterations,
                                    std::int64_t bound_flips) {
  SimplexResult result;
  result.status = status;
  result.iterations = iterations;
  result.bound_flips = bound_flips;
  result.x.assign(nstruct_, 0.0);
  for (std::size_t c = 0; c < nstruct_; ++c) result.x[c] = bound_value(c);
  for (std::size_t r = 0; r < nrows_; ++r) {
    const std::size_t col = static_cast<std::size_t>(basic_[r]);
    if (col < nstruct_) result.x[col] = beta_[r];
  }
  double obj = 0.0;
  for (std::size_t c = 0; c < nstruct_; ++c) obj += cost_[c] * result.x[c];
  result.objective = obj;
  return result;
}

SimplexResult DenseSimplex::primal_loop() {
  const std::int64_t max_iter =
      options_.max_iterations > 0 ? options_.max_iterations
                                  : 5000 + 200 * static_cast<std::int64_t>(nrows_);
  const double opt_tol = options_.opt_tol;
  std::int64_t iter = 0;
  std::int64_t flips = 0;

  while (true) {
    if (iter >= max_iter) return extract(SimplexStatus::kIterationLimit, iter, flips);

    // Pricing: devex by default, Bland once degeneracy stalls progress.
    std::size_t entering = ncols_;
    int dir = +1;
    double best_score = 0.0;
    for (std::size_t c = 0; c < ncols_; ++c) {
      const VarStatus st = status_[c];
      if (st == VarStatus::kBasic) continue;
      const double d = reduced_[c];
      int cand_dir;
      if (st == VarStatus::kAtLower && d < -opt_tol) {
        cand_dir = +1;
      } else if (st == VarStatus::kAtUpper && d > opt_tol) {
        cand_dir = -1;
      } else {
        continue;
      }
      if (bland_) {
        entering = c;
        dir = cand_dir;
        break;
      }
      const double score = d * d / devex_[c];
      if (score > best_score) {
        best_score = score;
        entering = c;
        dir = cand_dir;
      }
    }
    if (entering == ncols_) return extract(SimplexStatus::kOptimal, iter, flips);

    // Ratio test over basic variables plus the entering variable's own range.
    const double range = upper_[entering] - lower_[entering];
    double best_t = range;  // may be +inf
    std::ptrdiff_t leave_row = -1;
    double leave_piv = 0.0;
    for (std::size_t r = 0; r < nrows_; ++r) {
      const double y = tab(r, entering) * dir;
      double t;
      if (y > options_.pivot_tol) {
        t = (beta_[r] - lower_[static_cast<std::size_t>(basic_[r])]) / y;
      } else if (y < -options_.pivot_tol) {
        const double ub = upper_[static_cast<std::size_t>(basic_[r])];
        if (ub == kInf) continue;
        t = (beta_[r] - ub) / y;
      } else {
        continue;
      }
      if (t < 0.0) t = 0.0;  // degenerate beyond tolerance
      const bool better =
          t < best_t - 1e-12 ||
          (t < best_t + 1e-12 && leave_row >= 0 &&
           (bland_ ? basic_[r] < basic_[static_cast<std::size_t>(leave_row)]
                   : std::abs(tab(r, entering)) > std::abs(leave_piv)));
      if (leave_row < 0 ? t < best_t : better) {
        best_t = t;
        leave_row = static_cast<std::ptrdiff_t>(r);
        leave_piv = tab(r, entering);
      }
    }

    if (best_t == kInf) return extract(SimplexStatus::kUnbounded, iter, flips);

    ++iter;
    if (best_t <= 1e-12) {
      if (++degenerate_streak_ > 200 + static_cast<std::int64_t>(nrows_)) bland_ = true;
    } else {
      degenerate_streak_ = 0;
    }

    if (leave_row < 0 || (std::isfinite(range) && range <= best_t)) {
      // Bound flip: the entering variable crosses to its other bound.
      const double step = range * dir;
      for (std::size_t r = 0; r < nrows_; ++r) {
        const double a = tab(r, entering);
        if (a != 0.0) beta_[r] -= a * step;
      }
      status_[entering] =
          status_[entering] == VarStatus::kAtLower ? VarStatus::kAtUpper : VarStatus::kAtLower;
      ++flips;
      continue;
    }

    const std::size_t lr = static_cast<std::size_t>(leave_row);
    const std::size_t leaving = static_cast<std::size_t>(basic_[lr]);
    const double entering_start = bound_value(entering);
    const double step = best_t * dir;
    for (std::size_t r = 0; r < nrows_; ++r) {
      if (r == lr) continue;
      const double a = tab(r, entering);
      if (a != 0.0) beta_[r] -= a * step;
    }
    // The leaving variable lands on the bound it ran into.
    const double y = tab(lr, entering) * dir;
    status_[leaving] = y > 0.0 ? VarStatus::kAtLower : VarStatus::kAtUpper;
    pivot(lr, entering);
    basic_[lr] = static_cast<int>(entering);
    status_[entering] = VarStatus::kBasic;
    beta_[lr] = entering_start + step;

    if (iter % 4096 == 0) refresh_from_scratch();
  }
}

SimplexResult DenseSimplex::solve() {
  if (nrows_ == 0) {
    built_ = true;
    return extract(SimplexStatus::kOptimal, 0, 0);
  }
  if (!built_) {
    build_initial_basis();
    built_ = true;
    return primal_loop();
  }
  // Re-optimization after append_rows: absorb infeasible rows with dual
  // pivots, then finish with the primal loop. The ordering polytope is
  // massively dual-degenerate (whole faces of zero reduced costs), so the
  // repair runs against one-shot perturbed reduced costs; the refresh at
  // the end restores the true values and the primal loop cleans up.
  double dscale = 0.0;
  for (std::size_t c = 0; c < nstruct_; ++c) dscale = std::max(dscale, std::abs(cost_[c]));
  const double eps = 1e-8 * std::max(1.0, dscale);
  for (std::size_t c = 0; c < ncols_; ++c) {
    if (status_[c] == VarStatus::kBasic) continue;
    const double jitter = eps * (1.0 + static_cast<double>((c * 2654435761u) % 97) / 97.0);
    reduced_[c] += status_[c] == VarStatus::kAtLower ? jitter : -jitter;
  }
  std::int64_t dual_iters = 0;
  const bool repaired = dual_repair(&dual_iters);
  refresh_from_scratch();  // true reduced costs back
  if (!repaired) {
    return extract(SimplexStatus::kSingular, dual_iters, 0);
  }
  SimplexResult result = primal_loop();
  result.iterations += dual_iters;
  return result;
}

}  // namespace ocsched
