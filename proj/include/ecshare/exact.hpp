#ifndef ECSHARE_EXACT_HPP
#define ECSHARE_EXACT_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecshare/core.hpp"
#include "ecshare/csv.hpp"
#include "ecshare/schedule.hpp"

namespace ecshare {

struct ExactOptions {
  /// Refuse instances whose worst-case search tree is larger than this.
  double node_budget = 5e7;
};

struct ExactStats {
  double node_bound = 0.0;
  std::uint64_t nodes = 0;
};

/// Worst-case node count of the search tree: sum over depths k of
/// prod_{i<k} (servers where task i fits alone + 1).
[[nodiscard]] inline double exact_node_bound(std::span<const Task> tasks,
                                             std::span<const ServerGroup> groups) {
  double level = 1.0;
  double total = 1.0;
  for (const auto& t : tasks) {
    int fits = 0;
    for (const auto& g : groups)
      if (task_delay(t, g) <= t.latency_budget) fits += g.count;
    level *= fits + 1;
    total += level;
  }
  return total;
}

namespace detail {

class BatchSearch {
 public:
  BatchSearch(std::span<const Task> tasks, std::span<const ServerGroup> groups)
      : tasks_(tasks), n_(tasks.size()) {
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (int j = 0; j < groups[g].count; ++j) {
        group_of_.push_back(static_cast<int>(g));
        index_in_group_.push_back(j);
      }
    s_ = group_of_.size();
    delay_.resize(n_ * s_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < s_; ++k) delay_[i * s_ + k] = task_delay(tasks[i], groups[group_of_[k]]);
    load_.assign(s_, 0.0);
    current_.assign(n_, kDropped);
    best_ = current_;
  }

  void run() { descend(0, 0.0); }

  static constexpr int kDropped = -1;
  [[nodiscard]] const std::vector<int>& best() const { return best_; }
  [[nodiscard]] double best_value() const { return best_value_; }
  [[nodiscard]] std::uint64_t nodes() const { return nodes_; }
  [[nodiscard]] int group_of(int server) const { return group_of_[server]; }
  [[nodiscard]] int index_in_group(int server) const { return index_in_group_[server]; }
  [[nodiscard]] double delay(std::size_t i, int server) const { return delay_[i * s_ + server]; }

 private:
  // Optimistic completion of the subtree: every remaining task that still fits
  // alone behind some server's current load.
  double bound(std::size_t i, double value) const {
    for (std::size_t k = i; k < n_; ++k) {
      for (std::size_t j = 0; j < s_; ++j) {
        if (load_[j] + delay_[k * s_ + j] <= tasks_[k].latency_budget) {
          value += tasks_[k].value;
          break;
        }
      }
    }
    return value;
  }

  bool equivalent_to_earlier(std::size_t j) const {
    for (std::size_t e = j; e-- > 0;) {
      if (group_of_[e] != group_of_[j]) break;
      if (load_[e] == load_[j]) return true;
    }
    return false;
  }

  void descend(std::size_t i, double value) {
    ++nodes_;
    if (i == n_) {
      if (value > best_value_) {
        best_value_ = value;
        best_ = current_;
      }
      return;
    }
    if (bound(i, value) <= best_value_) return;
    // Children in lexicographic order: servers by (group, index), then drop.
    for (std::size_t j = 0; j < s_; ++j) {
      const double finish = load_[j] + delay_[i * s_ + j];
      if (finish > tasks_[i].latency_budget) continue;
      if (equivalent_to_earlier(j)) continue;
      const double saved = load_[j];
      load_[j] = finish;
      current_[i] = static_cast<int>(j);
      descend(i + 1, value + tasks_[i].value);
      load_[j] = saved;
      current_[i] = kDropped;
    }
    descend(i + 1, value);
  }

  std::span<const Task> tasks_;
  std::size_t n_;
  std::size_t s_ = 0;
  std::vector<int> group_of_, index_in_group_;
  std::vector<double> delay_;
  std::vector<double> load_;
  std::vector<int> current_, best_;
  double best_value_ = -1.0;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// Exact batch distribution: maximizes the value of tasks finished by their
/// budgets when each server runs its tasks in arrival order. Depth-first
/// branch and bound; among optimal schedules the lexicographically smallest
/// assignment vector (server order by group then index, drop last) is returned.
[[nodiscard]] inline Schedule solve_batch_exact(std::span<const Task> tasks,
                                                std::span<const ServerGroup> groups,
                                                const ExactOptions& opt = {},
                                                ExactStats* stats = nullptr) {
  validate_task_order(tasks);
  for (const auto& g : groups) validate(g);
  for (const auto& t : tasks)
    if (t.arrival_time != tasks.front().arrival_time)
      throw InvalidArgument("exact solver needs a batch: all tasks must share one arrival time");

  const double node_bound = exact_node_bound(tasks, groups);
  if (stats) stats->node_bound = node_bound;
  if (node_bound > opt.node_budget)
    throw BudgetExceeded("branch-and-bound node bound " + csv::num(node_bound) +
                         " exceeds budget " + csv::num(opt.node_budget));

  Schedule out = Schedule::empty_for(tasks.size(), groups);
  if (tasks.empty()) return out;

  detail::BatchSearch search(tasks, groups);
  search.run();
  if (stats) stats->nodes = search.nodes();

  const double origin = tasks.front().arrival_time;
  std::vector<double> load(static_cast<std::size_t>(total_servers(groups)), 0.0);
  const auto& best = search.best();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const int j = best[i];
    if (j == detail::BatchSearch::kDropped) continue;
    auto& a = out.assignments[i];
    a.dropped = false;
    a.group = search.group_of(j);
    a.server = search.index_in_group(j);
    a.start = origin + load[j];
    load[j] += search.delay(i, j);
    a.completion = origin + load[j];
    out.per_server_value[a.group][a.server] += tasks[i].value;
    out.total_value += tasks[i].value;
  }
  return out;
}

}  // namespace ecshare

#endif  // ECSHARE_EXACT_HPP
