#ifndef ECSHARE_WORKLOAD_HPP
#define ECSHARE_WORKLOAD_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ecshare/core.hpp"
#include "ecshare/csv.hpp"
#include "ecshare/rng.hpp"

namespace ecshare {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct WorkloadParams {
  std::uint64_t seed = 0;
  double horizon_s = 300.0;
  double rate_per_min = 8.0;
  Range size_mb{1.0, 20.0};
  Range value{1.0, 5.0};
  double latency_factor = 1.4;
  ServerGroup reference = reference_server();
};

/// L_avg: uncongested completion time on the reference server.
[[nodiscard]] inline double average_latency(double size_mb, const ServerGroup& reference) {
  return task_delay(size_mb, reference);
}

namespace detail {
inline void check_range(const Range& r, const char* what) {
  if (!(r.lo > 0.0) || !(r.hi >= r.lo))
    throw InvalidArgument(std::string(what) + " range must satisfy 0 < lo <= hi");
}
}  // namespace detail

/// Poisson arrivals on [0, horizon) with uniform sizes, values and budgets.
/// Each attribute draws from its own labeled stream.
[[nodiscard]] inline std::vector<Task> generate_workload(const WorkloadParams& p) {
  if (!(p.horizon_s >= 0.0)) throw InvalidArgument("horizon must be >= 0");
  if (!(p.rate_per_min > 0.0)) throw InvalidArgument("arrival rate must be > 0");
  if (!(p.latency_factor >= 1.0)) throw InvalidArgument("latency factor must be >= 1");
  detail::check_range(p.size_mb, "size");
  detail::check_range(p.value, "value");
  validate(p.reference);

  RandomStream arrivals(p.seed, stream::kArrivals);
  RandomStream sizes(p.seed, stream::kSizes);
  RandomStream values(p.seed, stream::kValues);
  RandomStream budgets(p.seed, stream::kBudgets);

  const double rate_per_s = p.rate_per_min / 60.0;
  std::vector<Task> tasks;
  double t = 0.0;
  for (;;) {
    t += arrivals.exponential(rate_per_s);
    if (!(t < p.horizon_s)) break;
    Task task;
    task.id = tasks.size();
    task.arrival_time = t;
    task.size = sizes.uniform(p.size_mb.lo, p.size_mb.hi);
    task.value = values.uniform(p.value.lo, p.value.hi);
    const double l_avg = average_latency(task.size, p.reference);
    task.latency_budget = l_avg * (1.0 + (p.latency_factor - 1.0) * budgets.uniform01());
    tasks.push_back(task);
  }
  return tasks;
}

struct TraceWarning {
  std::size_t line;
  std::string message;
};

struct TraceLoad {
  std::vector<Task> tasks;
  std::vector<TraceWarning> warnings;
};

struct TraceOptions {
  double latency_factor = 1.0;  // used only when latency_s is absent
  std::uint64_t seed = 0;
  ServerGroup reference = reference_server();
};

/// Parses `arrival_s,size_mb,value[,latency_s]`. Rows out of arrival order are
/// stably sorted and re-indexed; a warning records the first offending line.
[[nodiscard]] inline TraceLoad load_trace(const std::string& path, const TraceOptions& opt = {}) {
  if (!(opt.latency_factor >= 1.0)) throw InvalidArgument("latency factor must be >= 1");
  auto lines = csv::read_lines(path);
  if (lines.empty()) throw InvalidArgument(path + ": empty trace (missing header)");

  auto header = csv::split(lines.front().text);
  for (auto& h : header) h = std::string(csv::trim(h));
  const bool has_latency = header.size() == 4;
  const std::vector<std::string> expected{"arrival_s", "size_mb", "value", "latency_s"};
  if (header.size() < 3 || header.size() > 4 ||
      !std::equal(header.begin(), header.end(), expected.begin()))
    throw InvalidArgument(path + ":" + std::to_string(lines.front().number) +
                          ": header must be arrival_s,size_mb,value[,latency_s]");

  TraceLoad out;
  RandomStream budgets(opt.seed, stream::kBudgets);
  std::vector<std::size_t> line_of;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& ln = lines[r];
    auto fail = [&](const std::string& why) {
      throw InvalidArgument(path + ":" + std::to_string(ln.number) + ": " + why);
    };
    auto cells = csv::split(ln.text);
    if (cells.size() != header.size()) fail("expected " + std::to_string(header.size()) + " fields");
    auto arrival = csv::parse_double(cells[0]);
    auto size = csv::parse_double(cells[1]);
    auto value = csv::parse_double(cells[2]);
    if (!arrival || !size || !value) fail("malformed number");
    if (!(*arrival >= 0.0)) fail("arrival_s must be >= 0");
    if (!(*size > 0.0)) fail("size_mb must be > 0");
    if (!(*value > 0.0)) fail("value must be > 0");
    Task t;
    t.arrival_time = *arrival;
    t.size = *size;
    t.value = *value;
    if (has_latency) {
      auto lat = csv::parse_double(cells[3]);
      if (!lat) fail("malformed number");
      if (!(*lat > 0.0)) fail("latency_s must be > 0");
      t.latency_budget = *lat;
    } else {
      const double l_avg = average_latency(t.size, opt.reference);
      t.latency_budget = l_avg * (1.0 + (opt.latency_factor - 1.0) * budgets.uniform01());
    }
    t.id = out.tasks.size();
    out.tasks.push_back(t);
    line_of.push_back(ln.number);
  }

  auto unsorted = std::is_sorted_until(out.tasks.begin(), out.tasks.end(),
                                       [](const Task& a, const Task& b) {
                                         return a.arrival_time < b.arrival_time;
                                       });
  if (unsorted != out.tasks.end()) {
    const auto pos = static_cast<std::size_t>(unsorted - out.tasks.begin());
    out.warnings.push_back({line_of[pos], "arrival times not monotone; tasks re-indexed"});
    std::stable_sort(out.tasks.begin(), out.tasks.end(), [](const Task& a, const Task& b) {
      return a.arrival_time < b.arrival_time;
    });
    for (std::size_t i = 0; i < out.tasks.size(); ++i) out.tasks[i].id = i;
  }
  return out;
}

[[nodiscard]] inline std::string trace_csv(const std::vector<Task>& tasks) {
  std::string s = "arrival_s,size_mb,value,latency_s\n";
  for (const auto& t : tasks) {
    s += csv::num(t.arrival_time) + "," + csv::num(t.size) + "," + csv::num(t.value) + "," +
         csv::num(t.latency_budget) + "\n";
  }
  return s;
}

}  // namespace ecshare

#endif  // ECSHARE_WORKLOAD_HPP
