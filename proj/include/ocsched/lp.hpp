// Ordering LP relaxation: pairwise precedence variables x_{m,m'} plus
// per-(coflow, port) transmission and reconfiguration capacity rows. The
// optimum lower-bounds every feasible schedule's weighted completion time
// and its completion values drive the global coflow order.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ocsched/model.hpp"

namespace ocsched {

enum class LpConstraintKind { kPairing, kTransmission, kReconfiguration, kRelease, kBox };

struct LpTerm {
  int var = 0;  // unified variable id, see OrderingLp::var_completion / var_ordering
  double coef = 0.0;
};

/// sense '>' means lhs >= rhs, '=' equality, 'b' a box 0 <= var <= 1 (terms
/// holds the single variable, rhs unused).
struct LpConstraint {
  LpConstraintKind kind = LpConstraintKind::kTransmission;
  std::vector<LpTerm> terms;
  char sense = '>';
  double rhs = 0.0;
  int coflow = -1;  // m for transmission/reconfiguration/release rows
  int port = -1;    // p for transmission/reconfiguration rows
};

struct OrderingLp {
  int num_coflows = 0;
  int num_ports = 0;  // N
  SwitchMode mode = SwitchMode::kOcs;
  double aggregate_rate = 0.0;  // R
  double delay = 0.0;           // delta
  int num_cores = 0;            // K

  std::vector<double> weights;
  std::vector<double> releases;
  // Per-coflow port statistics, 2N entries each (0..N-1 ingress, N.. egress).
  std::vector<std::vector<double>> load;  // rho_{m,p}
  std::vector<std::vector<int>> count;    // tau_{m,p}

  std::vector<LpConstraint> constraints;

  // Variable ids: completions first, then the M*M ordering grid (diagonal
  // slots are allocated but never referenced).
  int var_completion(int m) const { return m; }
  int var_ordering(int m, int mp) const { return num_coflows + m * num_coflows + mp; }
  int num_vars() const { return num_coflows + num_coflows * num_coflows; }

  std::size_t count_kind(LpConstraintKind kind) const;
};

enum class LpStatus { kOptimal, kInfeasible, kNumericalFailure };

struct LpSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  std::vector<double> completion_values;  // T~_m
  std::vector<double> ordering_values;    // x~ row-major M*M, diagonal unused
  double objective = 0.0;
  std::int64_t simplex_iterations = 0;
  int generation_rounds = 0;

  double ordering(int m, int mp) const;
};

OrderingLp build_lp(const Instance& instance);

struct LpSolveOptions {
  double feasibility_tol = 1e-7;  // declared contract, audited downstream
  double add_row_tol = 1e-9;      // violation threshold for row generation
  std::int64_t max_iterations = 0;
  int max_rounds = 64;
  bool parallel_pivot = true;
  bool warm_start_heuristic = true;  // seed ordering vars from the size-based order
  bool eager_rows = false;           // activate every capacity row up front
};

/// Bundled solver: analytic elimination of the pairing equalities, then a
/// bounded-variable dense simplex with lazy generation of the capacity rows.
/// Completion values are re-derived from the final ordering values against
/// the full row set, so the returned point is feasible to roundoff and its
/// objective equals the LP optimum.
LpSolution solve_lp(const OrderingLp& lp, const LpSolveOptions& options = {});

/// The LP objective of an optimal solution; valid lower bound on the
/// weighted CCT of any feasible schedule. Throws unless status is optimal.
double certified_lower_bound(const LpSolution& solution);

/// Largest absolute violation of `solution` over the materialized
/// constraint list (the audit used by tests and the acceptance suite).
double max_constraint_violation(const OrderingLp& lp, const LpSolution& solution);

/// CPLEX LP interchange text (format tag: ordering-lp v1), full variable
/// space including both x_{m,m'} and x_{m',m} plus pairing equalities.
void write_lp_format(const OrderingLp& lp, std::ostream& out);

}  // namespace ocsched
