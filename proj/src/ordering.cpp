#include "ocsched/ordering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ocsched/bounds.hpp"

namespace ocsched {

CoflowOrder lp_guided_order(const Instance& instance, const LpSolution& solution) {
  require_valid(instance);
  const int M = instance.num_coflows();
  if (solution.status != LpStatus::kOptimal ||
      static_cast<int>(solution.completion_values.size()) != M) {
    throw std::invalid_argument("lp_guided_order: solution does not match instance");
  }
  CoflowOrder order;
  order.by_rank.resize(M);
  std::iota(order.by_rank.begin(), order.by_rank.end(), 0);
  std::stable_sort(order.by_rank.begin(), order.by_rank.end(), [&](int a, int b) {
    return solution.completion_values[a] < solution.completion_values[b];
  });
  return order;
}

CoflowOrder wspt_order(const Instance& instance) {
  require_valid(instance);
  const int M = instance.num_coflows();
  std::vector<double> score(M);
  for (int m = 0; m < M; ++m) {
    const double lb = global_single_coflow_lb(instance.coflows[m].demand, instance.config);
    score[m] = lb > 0.0 ? instance.coflows[m].weight / lb
                        : std::numeric_limits<double>::infinity();
  }
  CoflowOrder order;
  order.by_rank.resize(M);
  std::iota(order.by_rank.begin(), order.by_rank.end(), 0);
  std::stable_sort(order.by_rank.begin(), order.by_rank.end(),
                   [&](int a, int b) { return score[a] > score[b]; });
  return order;
}

}  // namespace ocsched
