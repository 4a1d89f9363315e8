#ifndef ECSHARE_SCHEDULE_HPP
#define ECSHARE_SCHEDULE_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ecshare/core.hpp"
#include "ecshare/csv.hpp"

namespace ecshare {

struct Assignment {
  bool dropped = true;
  int group = -1;
  int server = -1;  // index within the group
  double start = 0.0;
  double completion = 0.0;
};

/// Assignment of tasks to servers. `assignments[i]` describes tasks[i].
struct Schedule {
  std::vector<Assignment> assignments;
  double total_value = 0.0;
  std::vector<std::vector<double>> per_server_value;  // [group][server]

  static Schedule empty_for(std::size_t n_tasks, std::span<const ServerGroup> groups) {
    Schedule s;
    s.assignments.assign(n_tasks, Assignment{});
    s.per_server_value.resize(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g)
      s.per_server_value[g].assign(static_cast<std::size_t>(groups[g].count), 0.0);
    return s;
  }

  [[nodiscard]] std::vector<double> per_group_value() const {
    std::vector<double> v;
    v.reserve(per_server_value.size());
    for (const auto& g : per_server_value) {
      double sum = 0.0;
      for (double x : g) sum += x;
      v.push_back(sum);
    }
    return v;
  }

  [[nodiscard]] std::size_t completed() const {
    return static_cast<std::size_t>(std::count_if(assignments.begin(), assignments.end(),
                                                  [](const Assignment& a) { return !a.dropped; }));
  }
};

/// Checks deadlines, per-server exclusivity, value bookkeeping and (optionally) FCFS order.
/// Throws InvariantViolation describing the first broken invariant.
inline void check_schedule(const Schedule& s, std::span<const Task> tasks,
                           std::span<const ServerGroup> groups, bool require_fcfs) {
  constexpr double kTol = 1e-9;
  if (s.assignments.size() != tasks.size())
    throw InvariantViolation("schedule size differs from task count");
  struct Slot {
    std::size_t task;
    double start, completion;
  };
  std::vector<std::vector<std::vector<Slot>>> slots(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) slots[g].resize(groups[g].count);

  double sum = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& a = s.assignments[i];
    if (a.dropped) continue;
    if (a.group < 0 || a.group >= static_cast<int>(groups.size()) || a.server < 0 ||
        a.server >= groups[a.group].count)
      throw InvariantViolation("task " + std::to_string(tasks[i].id) + " assigned to unknown server");
    if (a.completion > tasks[i].deadline() + kTol)
      throw InvariantViolation("task " + std::to_string(tasks[i].id) + " misses its deadline");
    if (a.start + kTol < tasks[i].arrival_time)
      throw InvariantViolation("task " + std::to_string(tasks[i].id) + " starts before arrival");
    sum += tasks[i].value;
    slots[a.group][a.server].push_back({i, a.start, a.completion});
  }
  double per_server_sum = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t j = 0; j < slots[g].size(); ++j) {
      auto& v = slots[g][j];
      double expect = 0.0;
      for (const auto& sl : v) expect += tasks[sl.task].value;
      if (std::abs(expect - s.per_server_value[g][j]) > kTol * std::max(1.0, expect))
        throw InvariantViolation("per-server value mismatch");
      per_server_sum += s.per_server_value[g][j];
      std::sort(v.begin(), v.end(), [](const Slot& a, const Slot& b) { return a.start < b.start; });
      for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k].start + kTol < v[k - 1].completion)
          throw InvariantViolation("overlapping executions on a server");
        if (require_fcfs && v[k].task < v[k - 1].task)
          throw InvariantViolation("server order violates FCFS");
      }
    }
  }
  if (std::abs(sum - s.total_value) > kTol * std::max(1.0, sum) ||
      std::abs(per_server_sum - s.total_value) > kTol * std::max(1.0, sum))
    throw InvariantViolation("total value does not match completed tasks");
}

/// `task_id,group,server,start_s,completion_s,dropped`; dropped rows leave placement blank.
[[nodiscard]] inline std::string schedule_csv(const Schedule& s, std::span<const Task> tasks) {
  std::string out = "task_id,group,server,start_s,completion_s,dropped\n";
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& a = s.assignments[i];
    out += std::to_string(tasks[i].id) + ",";
    if (a.dropped) {
      out += ",,,,1\n";
    } else {
      out += std::to_string(a.group) + "," + std::to_string(a.server) + "," + csv::num(a.start) +
             "," + csv::num(a.completion) + ",0\n";
    }
  }
  return out;
}

}  // namespace ecshare

#endif  // ECSHARE_SCHEDULE_HPP
