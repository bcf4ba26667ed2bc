#include "ocsched/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <tuple>
#include <stdexcept>

#include "ocsched/bounds.hpp"
#include "ocsched/simplex.hpp"

namespace ocsched {

std::size_t OrderingLp::count_kind(LpConstraintKind kind) const {
  std::size_t n = 0;
  for (const auto& c : constraints) {
    if (c.kind == kind) ++n;
  }
  return n;
}

double LpSolution::ordering(int m, int mp) const {
  const int M = static_cast<int>(completion_values.size());
  return ordering_values[static_cast<std::size_t>(m) * M + mp];
}

OrderingLp build_lp(const Instance& instance) {
  require_valid(instance);
  const auto& cfg = instance.config;
  const int M = instance.num_coflows();
  const int N = cfg.num_ports;
  const int ports = 2 * N;

  OrderingLp lp;
  lp.num_coflows = M;
  lp.num_ports = N;
  lp.mode = cfg.mode;
  lp.aggregate_rate = cfg.aggregate_rate();
  lp.delay = cfg.reconfig_delay;
  lp.num_cores = cfg.num_cores();
  lp.weights.resize(M);
  lp.releases.resize(M);
  lp.load.assign(M, {});
  lp.count.assign(M, {});
  for (int m = 0; m < M; ++m) {
    lp.weights[m] = instance.coflows[m].weight;
    lp.releases[m] = instance.coflows[m].release;
    PortStats s = port_stats(instance.coflows[m].demand);
    lp.load[m] = std::move(s.load);
    lp.count[m] = std::move(s.count);
  }

  // Pairing equalities and box rows over the ordering grid.
  for (int m = 0; m < M; ++m) {
    for (int mp = m + 1; mp < M; ++mp) {
      LpConstraint c;
      c.kind = LpConstraintKind::kPairing;
      c.sense = '=';
      c.rhs = 1.0;
      c.terms = {{lp.var_ordering(m, mp), 1.0}, {lp.var_ordering(mp, m), 1.0}};
      lp.constraints.push_back(std::move(c));
    }
  }
  for (int m = 0; m < M; ++m) {
    for (int mp = 0; mp < M; ++mp) {
      if (m == mp) continue;
      LpConstraint c;
      c.kind = LpConstraintKind::kBox;
      c.sense = 'b';
      c.terms = {{lp.var_ordering(m, mp), 1.0}};
      lp.constraints.push_back(std::move(c));
    }
  }

  // Transmission rows: T_m >= (1/R)(rho_{m,p} + sum_{m'!=m} rho_{m',p} x_{m',m}).
  const double R = lp.aggregate_rate;
  for (int m = 0; m < M; ++m) {
    for (int p = 0; p < ports; ++p) {
      LpConstraint c;
      c.kind = LpConstraintKind::kTransmission;
      c.coflow = m;
      c.port = p;
      c.rhs = lp.load[m][p] / R;
      c.terms.push_back({lp.var_completion(m), 1.0});
      for (int mp = 0; mp < M; ++mp) {
        if (mp == m || lp.load[mp][p] == 0.0) continue;
        c.terms.push_back({lp.var_ordering(mp, m), -lp.load[mp][p] / R});
      }
      lp.constraints.push_back(std::move(c));
    }
  }

  // Reconfiguration rows (OCS only): T_m >= (delta/K)(tau_{m,p} + sum tau x).
  if (cfg.mode == SwitchMode::kOcs) {
    const double dk = lp.delay / lp.num_cores;
    for (int m = 0; m < M; ++m) {
      for (int p = 0; p < ports; ++p) {
        LpConstraint c;
        c.kind = LpConstraintKind::kReconfiguration;
        c.coflow = m;
        c.port = p;
        c.rhs = dk * lp.count[m][p];
        c.terms.push_back({lp.var_completion(m), 1.0});
        for (int mp = 0; mp < M; ++mp) {
          if (mp == m || lp.count[mp][p] == 0) continue;
          c.terms.push_back({lp.var_ordering(mp, m), -dk * lp.count[mp][p]});
        }
        lp.constraints.push_back(std::move(c));
      }
    }
  }

  for (int m = 0; m < M; ++m) {
    LpConstraint c;
    c.kind = LpConstraintKind::kRelease;
    c.coflow = m;
    c.rhs = lp.releases[m];
    c.terms = {{lp.var_completion(m), 1.0}};
    lp.constraints.push_back(std::move(c));
  }
  return lp;
}

namespace {

// Internal reduced variable space: completions T_0..T_{M-1}, then one
// ordering variable y_{a,b} per unordered pair a < b, meaning x_{a,b};
// x_{b,a} is 1 - y_{a,b}.
struct ReducedSpace {
  int M = 0;
  int y_base = 0;

  explicit ReducedSpace(int m) : M(m), y_base(m) {}
  int pair_index(int a, int b) const {  // requires a < b
    return a * M - a * (a + 1) / 2 + (b - a - 1);
  }
  int var_y(int a, int b) const { return y_base + pair_index(a, b); }
  int num_vars() const { return M + M * (M - 1) / 2; }
};

struct RowKey {
  bool reconfig = false;
  int coflow = 0;
  int port = 0;
};

// needed[m][p] for transmission: (rho_{m,p} + sum rho_{m',p} x_{m',m}) / R,
// given y. Shared by row generation and the exact completion derivation.
class NeedEvaluator {
 public:
  NeedEvaluator(const OrderingLp& lp, const ReducedSpace& space, const std::vector<double>& x)
      : lp_(lp), space_(space), x_(x) {}

  double x_before(int mp, int m) const {  // value of x_{mp,m}
    if (mp < m) return x_[space_.var_y(mp, m)];
    return 1.0 - x_[space_.var_y(m, mp)];
  }

  double transmission_need(int m, int p) const {
    double acc = lp_.load[m][p];
    for (int mp = 0; mp < lp_.num_coflows; ++mp) {
      if (mp == m) continue;
      const double rho = lp_.load[mp][p];
      if (rho != 0.0) acc += rho * x_before(mp, m);
    }
    return acc / lp_.aggregate_rate;
  }

  double reconfiguration_need(int m, int p) const {
    double acc = lp_.count[m][p];
    for (int mp = 0; mp < lp_.num_coflows; ++mp) {
      if (mp == m) continue;
      const int tau = lp_.count[mp][p];
      if (tau != 0) acc += tau * x_before(mp, m);
    }
    return acc * lp_.delay / lp_.num_cores;
  }

  double need(const RowKey& key) const {
    return key.reconfig ? reconfiguration_need(key.coflow, key.port)
                        : transmission_need(key.coflow, key.port);
  }

 private:
  const OrderingLp& lp_;
  const ReducedSpace& space_;
  const std::vector<double>& x_;
};

std::vector<double> build_row(const OrderingLp& lp, const ReducedSpace& space,
                              const RowKey& key, double* rhs) {
  // T_m - sum_{mp<m} c_mp y_{mp,m} + sum_{mp>m} c_mp y_{m,mp} >= c_m + sum_{mp>m} c_mp
  // where c_mp is rho_{mp,p}/R (transmission) or (delta/K) tau_{mp,p}.
  const int m = key.coflow;
  const int p = key.port;
  std::vector<double> row(space.num_vars(), 0.0);
  row[m] = 1.0;
  double b = 0.0;
  const double scale = key.reconfig ? lp.delay / lp.num_cores : 1.0 / lp.aggregate_rate;
  auto coef = [&](int mp) -> double {
    return key.reconfig ? scale * lp.count[mp][p] : scale * lp.load[mp][p];
  };
  b += coef(m);
  for (int mp = 0; mp < lp.num_coflows; ++mp) {
    if (mp == m) continue;
    const double c = coef(mp);
    if (c == 0.0) continue;
    if (mp < m) {
      row[space.var_y(mp, m)] -= c;
    } else {
      row[space.var_y(m, mp)] += c;
      b += c;
    }
  }
  *rhs = b;
  return row;
}

}  // namespace

namespace {
LpSolution solve_lp_impl(const OrderingLp& lp, const LpSolveOptions& options);
}

LpSolution solve_lp(const OrderingLp& lp, const LpSolveOptions& options) {
  LpSolution sol = solve_lp_impl(lp, options);
  if (sol.status != LpStatus::kOptimal && !options.eager_rows) {
    // Lazy row generation gave up (dense adversarial instances); the eager
    // whole-row solve is slower but dependable.
    LpSolveOptions fallback = options;
    fallback.eager_rows = true;
    LpSolution retry = solve_lp_impl(lp, fallback);
    retry.simplex_iterations += sol.simplex_iterations;
    retry.generation_rounds += sol.generation_rounds;
    return retry;
  }
  return sol;
}

namespace {

LpSolution solve_lp_impl(const OrderingLp& lp, const LpSolveOptions& options) {
  const int M = lp.num_coflows;
  LpSolution sol;
  sol.completion_values.assign(M, 0.0);
  sol.ordering_values.assign(static_cast<std::size_t>(M) * M, 0.0);

  if (M == 0) {
    sol.status = LpStatus::kOptimal;
    sol.objective = 0.0;
    return sol;
  }

  const ReducedSpace space(M);
  const int ports = 2 * lp.num_ports;
  const bool reconfig_rows = lp.mode == SwitchMode::kOcs && lp.delay > 0.0;

  // The solver works on magnitude-normalized data: time quantities divided
  // by the largest single term. Besides conditioning, this makes the solve
  // bitwise identical across uniform scalings of (demands, releases, delay),
  // which the covariance property relies on. Completion values are derived
  // against the original data afterwards.
  double scale = 0.0;
  for (int m = 0; m < M; ++m) {
    for (int p = 0; p < ports; ++p) {
      scale = std::max(scale, lp.load[m][p] / lp.aggregate_rate);
      scale = std::max(scale, lp.delay / lp.num_cores * lp.count[m][p]);
    }
    scale = std::max(scale, lp.releases[m]);
  }
  if (!(scale > 0.0)) scale = 1.0;
  OrderingLp slp;  // solver view; the constraint list stays with the caller
  slp.num_coflows = lp.num_coflows;
  slp.num_ports = lp.num_ports;
  slp.mode = lp.mode;
  slp.aggregate_rate = lp.aggregate_rate;
  slp.delay = lp.delay / scale;
  slp.num_cores = lp.num_cores;
  slp.weights = lp.weights;
  slp.count = lp.count;
  slp.load.assign(M, {});
  slp.releases.assign(M, 0.0);
  for (int m = 0; m < M; ++m) {
    slp.releases[m] = lp.releases[m] / scale;
    slp.load[m].resize(ports);
    for (int p = 0; p < ports; ++p) slp.load[m][p] = lp.load[m][p] / scale;
  }

  // Warm start: order coflows by the allocation-independent size bound and
  // point every ordering variable the corresponding way.
  std::vector<VarStatus> init(space.num_vars(), VarStatus::kAtLower);
  if (options.warm_start_heuristic && M > 1) {
    std::vector<double> score(M, 0.0);
    for (int m = 0; m < M; ++m) {
      double rho = 0.0;
      for (int p = 0; p < ports; ++p) rho = std::max(rho, slp.load[m][p]);
      score[m] = rho / slp.aggregate_rate + slp.releases[m];
    }
    std::vector<int> rank_of(M);
    std::vector<int> idx(M);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return score[a] < score[b]; });
    for (int r = 0; r < M; ++r) rank_of[idx[r]] = r;
    for (int a = 0; a < M; ++a) {
      for (int b = a + 1; b < M; ++b) {
        // y_{a,b} = 1 means a before b.
        init[space.var_y(a, b)] =
            rank_of[a] < rank_of[b] ? VarStatus::kAtUpper : VarStatus::kAtLower;
      }
    }
  }

  std::vector<double> lower(space.num_vars(), 0.0);
  std::vector<double> upper(space.num_vars(), std::numeric_limits<double>::infinity());
  std::vector<double> cost(space.num_vars(), 0.0);
  for (int m = 0; m < M; ++m) {
    lower[m] = slp.releases[m];
    cost[m] = lp.weights[m];
  }
  for (int v = space.y_base; v < space.num_vars(); ++v) upper[v] = 1.0;

  // Active row set, seeded with each coflow's heaviest port per row kind.
  std::vector<RowKey> active;
  std::vector<char> in_active(static_cast<std::size_t>(2) * M * ports, 0);
  std::vector<char> dropped_once(static_cast<std::size_t>(2) * M * ports, 0);
  auto key_slot = [&](const RowKey& k) {
    return (static_cast<std::size_t>(k.reconfig) * M + k.coflow) * ports + k.port;
  };
  auto activate = [&](const RowKey& k) {
    if (!in_active[key_slot(k)]) {
      in_active[key_slot(k)] = 1;
      active.push_back(k);
    }
  };
  if (options.eager_rows) {
    for (int m = 0; m < M; ++m) {
      for (int p = 0; p < ports; ++p) {
        activate({false, m, p});
        if (reconfig_rows) activate({true, m, p});
      }
    }
  } else {
    for (int m = 0; m < M; ++m) {
      // Seed with the two heaviest ports per row kind.
      std::vector<int> by_load(ports), by_count(ports);
      std::iota(by_load.begin(), by_load.end(), 0);
      by_count = by_load;
      std::stable_sort(by_load.begin(), by_load.end(),
                       [&](int a, int b) { return slp.load[m][a] > slp.load[m][b]; });
      activate({false, m, by_load[0]});
      if (ports > 1) activate({false, m, by_load[1]});
      if (reconfig_rows) {
        std::stable_sort(by_count.begin(), by_count.end(),
                         [&](int a, int b) { return lp.count[m][a] > lp.count[m][b]; });
        activate({true, m, by_count[0]});
        if (ports > 1) activate({true, m, by_count[1]});
      }
    }
    // Plus the rows predicted to bind at the warm-start ordering point:
    // with a near-optimal seed order these are usually the true binders,
    // which keeps later row generation to a trickle.
    std::vector<double> x0(space.num_vars(), 0.0);
    for (int v = space.y_base; v < space.num_vars(); ++v) {
      x0[v] = init[v] == VarStatus::kAtUpper ? 1.0 : 0.0;
    }
    NeedEvaluator eval0(slp, space, x0);
    for (int m = 0; m < M; ++m) {
      int best_p = 0;
      double best_need = -1.0;
      for (int p = 0; p < ports; ++p) {
        const double need = eval0.transmission_need(m, p);
        if (need > best_need) {
          best_need = need;
          best_p = p;
        }
      }
      activate({false, m, best_p});
      if (reconfig_rows) {
        int best_c = 0;
        double best_cn = -1.0;
        for (int p = 0; p < ports; ++p) {
          const double need = eval0.reconfiguration_need(m, p);
          if (need > best_cn) {
            best_cn = need;
            best_c = p;
          }
        }
        activate({true, m, best_c});
      }
    }
  }

  auto materialize = [&](const std::vector<RowKey>& keys) {
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<int> lift;
    rows.reserve(keys.size());
    for (const RowKey& k : keys) {
      double b = 0.0;
      rows.push_back(build_row(slp, space, k, &b));
      rhs.push_back(b);
      lift.push_back(k.coflow);
    }
    return std::tuple(std::move(rows), std::move(rhs), std::move(lift));
  };

  SimplexOptions sopt;
  sopt.max_iterations = options.max_iterations;
  sopt.parallel_pivot = options.parallel_pivot;

  auto fresh_solver = [&]() {
    auto [rows, rhs, lift] = materialize(active);
    return DenseSimplex(std::move(rows), std::move(rhs), cost, lower, upper, std::move(lift),
                        init, sopt);
  };

  std::vector<double> x;
  std::int64_t total_iterations = 0;
  int round = 0;
  std::unique_ptr<DenseSimplex> simplex;
  std::vector<RowKey> pending_keys;  // rows activated but not yet in the solver
  int cold_restarts_left = 2;
  for (; round < options.max_rounds; ++round) {
    if (!simplex) {
      simplex = std::make_unique<DenseSimplex>(fresh_solver());
    } else if (!pending_keys.empty()) {
      auto [rows, rhs, lift] = materialize(pending_keys);
      (void)lift;
      simplex->append_rows(rows, rhs);
      pending_keys.clear();
    }
    SimplexResult res = simplex->solve();
    total_iterations += res.iterations;
    if (std::getenv("OCSCHED_LP_DEBUG")) {
      std::fprintf(stderr, "  lp round %d: rows=%zu iters=%lld flips=%lld obj=%.6f status=%d\n",
                   round, active.size(), static_cast<long long>(res.iterations),
                   static_cast<long long>(res.bound_flips), res.objective,
                   static_cast<int>(res.status));
    }
    if (res.status == SimplexStatus::kSingular && cold_restarts_left > 0) {
      // Dual repair gave up; rebuild from the clamped warm start.
      --cold_restarts_left;
      simplex.reset();
      continue;
    }
    if (res.status != SimplexStatus::kOptimal) {
      sol.status = LpStatus::kNumericalFailure;
      sol.simplex_iterations = total_iterations;
      sol.generation_rounds = round + 1;
      return sol;
    }
    x = std::move(res.x);

    // Re-seed a potential cold restart from this round's ordering values.
    for (int v = space.y_base; v < space.num_vars(); ++v) {
      init[v] = x[v] >= 0.5 ? VarStatus::kAtUpper : VarStatus::kAtLower;
    }

    // Purge strictly slack rows so the working set tracks the binding set.
    // Each key is dropped at most once; a re-added row stays for good.
    std::vector<char> droppable(active.size(), 1);
    for (std::size_t r = 0; r < active.size(); ++r) {
      droppable[r] = !dropped_once[key_slot(active[r])];
    }
    std::vector<std::size_t> removed = simplex->drop_slack_rows(1e-6, droppable);
    for (auto it = removed.rbegin(); it != removed.rend(); ++it) {
      const RowKey gone = active[*it];
      dropped_once[key_slot(gone)] = 1;
      in_active[key_slot(gone)] = 0;
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(*it));
    }

    // Violated inactive rows against the simplex completion values; cap the
    // additions per (coflow, kind) to the worst three ports per round.
    NeedEvaluator eval(slp, space, x);
    bool added = false;
    for (int m = 0; m < M; ++m) {
      const double tm = x[m];
      const double tol = options.add_row_tol * std::max(1.0, std::abs(tm));
      for (int kind = 0; kind < (reconfig_rows ? 2 : 1); ++kind) {
        int taken = 0;
        std::vector<std::pair<double, int>> viols;
        for (int p = 0; p < ports; ++p) {
          RowKey k{kind == 1, m, p};
          if (in_active[key_slot(k)]) continue;
          const double need = eval.need(k);
          if (need > tm + tol) viols.emplace_back(need - tm, p);
        }
        std::sort(viols.begin(), viols.end(), [](const auto& a, const auto& b) {
          if (a.first != b.first) return a.first > b.first;
          return a.second < b.second;
        });
        for (const auto& [gap, p] : viols) {
          (void)gap;
          activate({kind == 1, m, p});
          pending_keys.push_back({kind == 1, m, p});
          added = true;
          if (++taken == 3) break;
        }
      }
    }
    if (!added) break;
  }
  if (round == options.max_rounds) {
    sol.status = LpStatus::kNumericalFailure;
    sol.simplex_iterations = total_iterations;
    sol.generation_rounds = round;
    return sol;
  }

  // Exact completion values for the final ordering point: the tightest of
  // the full row set and the release bound. This keeps feasibility at
  // roundoff and cannot move the objective off the LP optimum.
  NeedEvaluator eval(lp, space, x);
  double objective = 0.0;
  for (int m = 0; m < M; ++m) {
    double t = lp.releases[m];
    for (int p = 0; p < ports; ++p) {
      t = std::max(t, eval.transmission_need(m, p));
      if (reconfig_rows) t = std::max(t, eval.reconfiguration_need(m, p));
    }
    sol.completion_values[m] = t;
    objective += lp.weights[m] * t;
  }
  for (int a = 0; a < M; ++a) {
    for (int b = a + 1; b < M; ++b) {
      double y = std::clamp(x[space.var_y(a, b)], 0.0, 1.0);
      sol.ordering_values[static_cast<std::size_t>(a) * M + b] = y;
      sol.ordering_values[static_cast<std::size_t>(b) * M + a] = 1.0 - y;
    }
  }
  sol.objective = objective;
  sol.status = LpStatus::kOptimal;
  sol.simplex_iterations = total_iterations;
  sol.generation_rounds = round + 1;
  return sol;
}

}  // namespace

double certified_lower_bound(const LpSolution& solution) {
  if (solution.status != LpStatus::kOptimal) {
    throw std::runtime_error("certified_lower_bound: solution is not optimal");
  }
  return solution.objective;
}

double max_constraint_violation(const OrderingLp& lp, const LpSolution& solution) {
  const int M = lp.num_coflows;
  auto value_of = [&](int var) -> double {
    if (var < M) return solution.completion_values[var];
    const int idx = var - M;
    return solution.ordering_values[idx];
  };
  double worst = 0.0;
  for (const auto& c : lp.constraints) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * value_of(t.var);
    double v = 0.0;
    switch (c.sense) {
      case '>':
        v = c.rhs - lhs;
        break;
      case '=':
        v = std::abs(lhs - c.rhs);
        break;
      case 'b':
        v = std::max(-lhs, lhs - 1.0);
        break;
      default:
        throw std::logic_error("unknown constraint sense");
    }
    worst = std::max(worst, v);
  }
  return worst;
}

void write_lp_format(const OrderingLp& lp, std::ostream& out) {
  const int M = lp.num_coflows;
  out << std::setprecision(17);
  out << "\\ ordering-lp v1 (CPLEX LP format)\n";
  out << "\\ coflows=" << M << " ports=" << lp.num_ports << " mode=" << to_string(lp.mode)
      << " R=" << lp.aggregate_rate << " delta=" << lp.delay << " K=" << lp.num_cores << "\n";
  out << "Minimize\n obj:";
  for (int m = 0; m < M; ++m) {
    out << (m == 0 ? " " : " + ") << lp.weights[m] << " T" << m;
  }
  if (M == 0) out << " 0 T0";
  out << "\nSubject To\n";
  auto var_name = [&](int var) {
    if (var < M) return "T" + std::to_string(var);
    const int idx = var - M;
    return "x_" + std::to_string(idx / M) + "_" + std::to_string(idx % M);
  };
  int row_id = 0;
  for (const auto& c : lp.constraints) {
    if (c.sense == 'b') continue;  // boxes go to the Bounds section
    out << " c" << row_id++ << ":";
    bool first = true;
    for (const auto& t : c.terms) {
      double coef = t.coef;
      if (first) {
        out << " " << coef << " " << var_name(t.var);
        first = false;
      } else {
        out << (coef < 0 ? " - " : " + ") << std::abs(coef) << " " << var_name(t.var);
      }
    }
    out << (c.sense == '=' ? " = " : " >= ") << c.rhs << "\n";
  }
  out << "Bounds\n";
  for (int m = 0; m < M; ++m) {
    out << " T" << m << " >= " << lp.releases[m] << "\n";
  }
  for (int a = 0; a < M; ++a) {
    for (int b = 0; b < M; ++b) {
      if (a != b) out << " 0 <= x_" << a << "_" << b << " <= 1\n";
    }
  }
  out << "End\n";
}

}  // namespace ocsched
