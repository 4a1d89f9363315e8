#ifndef ECSHARE_GREEDY_HPP
#define ECSHARE_GREEDY_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "ecshare/core.hpp"
#include "ecshare/rng.hpp"
#include "ecshare/schedule.hpp"

namespace ecshare {

namespace detail {

// Sort key of the r-th idle slot of group g at event time t. Keys depend only on
// (seed, t, g, r), so growing one group leaves the relative order of the others'
// slots unchanged at a given event.
[[nodiscard]] inline std::uint64_t slot_key(std::uint64_t base, double t, int g, int r) {
  const auto tb = std::bit_cast<std::uint64_t>(t + 0.0);
  const auto gr = (static_cast<std::uint64_t>(g) << 32) | static_cast<std::uint32_t>(r);
  return splitmix64(base ^ splitmix64(tb) ^ splitmix64(~gr));
}

}  // namespace detail

/// Online greedy distribution, event driven.
///
/// Events are task arrivals and server completions. At each event time t the
/// idle servers are visited in a random order of their groups, keyed per idle
/// slot from the `greedy-order` stream seed; within a group the lowest-index
/// idle server goes first. A visited server takes the highest-value queued task
/// it can finish by that task's deadline when started at t (ties: earlier
/// arrival, then lower id). Tasks that no server could finish any more are
/// dropped.
[[nodiscard]] inline Schedule greedy_online(std::span<const Task> tasks,
                                            std::span<const ServerGroup> groups,
                                            std::uint64_t seed) {
  validate_task_order(tasks);
  for (const auto& g : groups) validate(g);

  const std::size_t n = tasks.size();
  const std::size_t m = groups.size();
  Schedule out = Schedule::empty_for(n, groups);
  if (n == 0 || total_servers(groups) == 0) return out;

  std::vector<double> delay(n * m);
  std::vector<double> fastest(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t g = 0; g < m; ++g) {
      delay[i * m + g] = task_delay(tasks[i], groups[g]);
      if (groups[g].count > 0) fastest[i] = std::min(fastest[i], delay[i * m + g]);
    }
  }

  auto priority = [&](std::size_t a, std::size_t b) {
    if (tasks[a].value != tasks[b].value) return tasks[a].value > tasks[b].value;
    return a < b;  // index order is (arrival, id) order
  };
  std::set<std::size_t, decltype(priority)> queue(priority);

  std::vector<std::vector<double>> free_at(m);
  for (std::size_t g = 0; g < m; ++g) free_at[g].assign(groups[g].count, 0.0);

  const std::uint64_t base = derive_seed(seed, stream::kGreedyOrder);
  std::vector<int> labels;
  std::vector<int> first(m, 0);
  std::vector<std::pair<std::uint64_t, int>> order;
  std::vector<std::vector<int>> idle(m);

  std::size_t next = 0;
  double t = tasks.front().arrival_time;
  for (;;) {
    while (next < n && tasks[next].arrival_time <= t) queue.insert(next++);
    for (auto it = queue.begin(); it != queue.end();) {
      if (t + fastest[*it] > tasks[*it].deadline())
        it = queue.erase(it);
      else
        ++it;
    }

    if (!queue.empty()) {
      labels.clear();
      for (std::size_t g = 0; g < m; ++g) {
        first[g] = static_cast<int>(labels.size());
        idle[g].clear();
        for (int j = 0; j < groups[g].count; ++j) {
          if (free_at[g][j] <= t) {
            idle[g].push_back(j);
            labels.push_back(static_cast<int>(g));
          }
        }
      }
      order.clear();
      for (int g : labels)
        order.push_back({detail::slot_key(base, t, g, static_cast<int>(order.size()) - first[g]), g});
      std::sort(order.begin(), order.end());
      for (std::size_t k = 0; k < order.size(); ++k) labels[k] = order[k].second;
      std::vector<std::size_t> cursor(m, 0);
      for (int g : labels) {
        if (queue.empty()) break;
        const int j = idle[g][cursor[g]++];
        for (auto it = queue.begin(); it != queue.end(); ++it) {
          const std::size_t i = *it;
          const double completion = t + delay[i * m + g];
          if (completion <= tasks[i].deadline()) {
            auto& a = out.assignments[i];
            a.dropped = false;
            a.group = g;
            a.server = j;
            a.start = t;
            a.completion = completion;
            free_at[g][j] = completion;
            out.per_server_value[g][j] += tasks[i].value;
            queue.erase(it);
            break;
          }
        }
      }
    }

    double next_t = std::numeric_limits<double>::infinity();
    if (next < n) next_t = tasks[next].arrival_time;
    for (std::size_t g = 0; g < m; ++g)
      for (double f : free_at[g])
        if (f > t) next_t = std::min(next_t, f);
    if (next_t == std::numeric_limits<double>::infinity()) break;
    t = next_t;
  }

  for (std::size_t i = 0; i < n; ++i)
    if (!out.assignments[i].dropped) out.total_value += tasks[i].value;
  return out;
}

}  // namespace ecshare

#endif  // ECSHARE_GREEDY_HPP
