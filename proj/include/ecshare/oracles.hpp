#ifndef ECSHARE_ORACLES_HPP
#define ECSHARE_ORACLES_HPP

// Brute-force reference implementations for the test suite. Nothing here calls
// the schedulers, mechanisms or equilibrium solvers; only the plain data types
// (Task, ServerGroup, UtilityTable) are shared.

#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "ecshare/core.hpp"
#include "ecshare/game.hpp"

namespace ecshare::oracle {

struct OracleBudget {
  std::size_t max_tasks = 4;
  std::size_t max_servers = 6;
  std::size_t max_grid = 10 * 10;  // profiles in the table
};

/// Best total value over every assignment of tasks to servers or to "dropped".
/// Each server serves its tasks in (arrival, id) order, each starting at
/// max(arrival, previous completion); a vector counts only if every assigned
/// task completes by its deadline.
[[nodiscard]] inline double batch_optimum(const std::vector<Task>& tasks, const std::vector<ServerGroup>& groups,
                                          const OracleBudget& budget = {}) {
  struct Server {
    double bandwidth, cpu, prop;
  };
  std::vector<Server> servers;
  for (const auto& g : groups)
    for (int j = 0; j < g.count; ++j) servers.push_back({g.bandwidth, g.cpu_scale, g.propagation_delay});
  if (tasks.size() > budget.max_tasks || servers.size() > budget.max_servers)
    throw BudgetExceeded("oracle budget is " + std::to_string(budget.max_tasks) + " tasks and " +
                         std::to_string(budget.max_servers) + " servers");

  std::vector<std::size_t> order(tasks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (tasks[a].arrival_time != tasks[b].arrival_time) return tasks[a].arrival_time < tasks[b].arrival_time;
    return tasks[a].id < tasks[b].id;
  });

  const std::size_t choices = servers.size() + 1;  // last choice = dropped
  std::vector<std::size_t> pick(tasks.size(), 0);
  double best = 0.0;
  for (;;) {
    std::vector<double> free_at(servers.size(), 0.0);
    double value = 0.0;
    bool ok = true;
    for (std::size_t i : order) {
      if (pick[i] == servers.size()) continue;
      const Server& s = servers[pick[i]];
      const Task& t = tasks[i];
      const double d = 2.6 * s.cpu * t.size + 8.0 * t.size / s.bandwidth + s.prop;
      const double done = std::max(free_at[pick[i]], t.arrival_time) + d;
      if (done > t.arrival_time + t.latency_budget) {
        ok = false;
        break;
      }
      free_at[pick[i]] = done;
      value += t.value;
    }
    if (ok) best = std::max(best, value);

    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == choices) pick[k++] = 0;
    if (k == pick.size()) break;
  }
  return best;
}

/// v(counts), counts[g] = number of chosen servers with label g.
using CountValue = std::function<double(const std::vector<int>&)>;

/// Shapley value of each server by enumerating every subset, in exact rationals.
/// `labels[i]` is the group of server i; v is read through the group counts.
[[nodiscard]] inline std::vector<mpq_class> shapley_rational(const CountValue& v, const std::vector<std::size_t>& labels,
                                                             const OracleBudget& budget = {}) {
  const std::size_t n = labels.size();
  if (n > budget.max_servers)
    throw BudgetExceeded("oracle budget is " + std::to_string(budget.max_servers) + " servers");
  std::size_t groups = 0;
  for (auto l : labels) groups = std::max(groups, l + 1);

  std::vector<mpz_class> fact(n + 1, 1);
  for (std::size_t k = 1; k <= n; ++k) fact[k] = fact[k - 1] * static_cast<unsigned long>(k);

  const std::uint32_t full = (std::uint32_t{1} << n);
  std::vector<mpq_class> value(full);
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    std::vector<int> counts(groups, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) ++counts[labels[i]];
    value[mask] = mask == 0 ? mpq_class(0) : mpq_class(v(counts));
  }

  std::vector<mpq_class> phi(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t mask = 0; mask < full; ++mask) {
      if (mask >> i & 1u) continue;
      const auto s = static_cast<std::size_t>(std::popcount(mask));
      mpq_class w(fact[s] * fact[n - s - 1], fact[n]);
      w.canonicalize();
      phi[i] += w * (value[mask | (std::uint32_t{1} << i)] - value[mask]);
    }
  }
  return phi;
}

[[nodiscard]] inline std::vector<double> shapley(const CountValue& v, const std::vector<std::size_t>& labels,
                                                 const OracleBudget& budget = {}) {
  const auto q = shapley_rational(v, labels, budget);
  std::vector<double> out;
  out.reserve(q.size());
  for (const auto& x : q) out.push_back(x.get_d());
  return out;
}

/// One distribution per player over its strategies 0..cap.
using Mixture = std::vector<std::vector<double>>;

[[nodiscard]] inline Mixture point_mass(const UtilityTable& table, const Signature& profile) {
  Mixture m(table.players());
  for (std::size_t p = 0; p < table.players(); ++p) {
    m[p].assign(static_cast<std::size_t>(table.caps()[p]) + 1, 0.0);
    m[p].at(static_cast<std::size_t>(profile[p])) = 1.0;
  }
  return m;
}

/// True iff no player can raise its expected utility by more than `tol` by
/// switching to any pure strategy while the others keep their distributions.
/// Distributions that are negative or do not sum to one are never equilibria.
[[nodiscard]] inline bool equilibrium_check(const UtilityTable& table, const Mixture& mix, double tol = 1e-9,
                                            const OracleBudget& budget = {}) {
  if (table.size() > budget.max_grid)
    throw BudgetExceeded("table has " + std::to_string(table.size()) + " profiles, oracle budget is " +
                         std::to_string(budget.max_grid));
  const std::size_t players = table.players();
  if (mix.size() != players) throw InvalidArgument("one distribution per player required");
  for (std::size_t p = 0; p < players; ++p) {
    if (mix[p].size() != static_cast<std::size_t>(table.caps()[p]) + 1)
      throw InvalidArgument("distribution length must be cap + 1");
    double sum = 0.0;
    for (double x : mix[p]) {
      if (!(x >= -1e-12)) return false;
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) return false;
  }

  for (std::size_t p = 0; p < players; ++p) {
    // payoff[a] = expected utility of p playing a against the others' mixture
    std::vector<double> payoff(mix[p].size(), 0.0);
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      const Signature s = table.grid().at(idx);
      double w = 1.0;
      for (std::size_t q = 0; q < players; ++q)
        if (q != p) w *= mix[q][static_cast<std::size_t>(s[q])];
      payoff[static_cast<std::size_t>(s[p])] += w * table.utility(idx, p);
    }
    double current = 0.0;
    for (std::size_t a = 0; a < payoff.size(); ++a) current += mix[p][a] * payoff[a];
    for (double alt : payoff)
      if (alt > current + tol) return false;
  }
  return true;
}

[[nodiscard]] inline bool equilibrium_check(const UtilityTable& table, const Signature& profile, double tol = 1e-9,
                                            const OracleBudget& budget = {}) {
  return equilibrium_check(table, point_mass(table, profile), tol, budget);
}

}  // namespace ecshare::oracle

#endif  // ECSHARE_ORACLES_HPP
