#ifndef ECSHARE_CORE_HPP
#define ECSHARE_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecshare {

// Error hierarchy. The CLI maps these onto exit codes:
// InvalidArgument -> 2, BudgetExceeded -> 3, InvariantViolation -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// A unit of client work. The absolute deadline is arrival_time + latency_budget.
struct Task {
  std::size_t id = 0;
  double arrival_time = 0.0;    // s
  double size = 0.0;            // MB
  double value = 0.0;           // revenue units
  double latency_budget = 0.0;  // s

  [[nodiscard]] double deadline() const noexcept { return arrival_time + latency_budget; }
};

/// A provider's homogeneous fleet. All servers in a group are interchangeable.
struct ServerGroup {
  std::size_t provider_id = 0;
  std::string name;
  int count = 0;
  double bandwidth = 24.0;          // Mbps, client -> server
  double cpu_scale = 1.0;           // multiplier on the reference compute model
  double propagation_delay = 0.0;   // s
  double unit_cost = 0.0;           // revenue units per server
};

/// Compute time per MB on the reference machine.
inline constexpr double kComputeSecondsPerMb = 2.6;
inline constexpr double kReferenceBandwidthMbps = 24.0;

/// Time to ship a task to a server of `group` and run it there, without queuing.
[[nodiscard]] inline double task_delay(double size_mb, const ServerGroup& group) noexcept {
  return kComputeSecondsPerMb * group.cpu_scale * size_mb + 8.0 * size_mb / group.bandwidth +
         group.propagation_delay;
}

[[nodiscard]] inline double task_delay(const Task& task, const ServerGroup& group) noexcept {
  return task_delay(task.size, group);
}

/// The reference server used to derive latency budgets (L_avg).
[[nodiscard]] inline ServerGroup reference_server(double bandwidth_mbps = kReferenceBandwidthMbps,
                                                  double cpu_scale = 1.0,
                                                  double propagation_delay = 0.0) {
  ServerGroup g;
  g.name = "reference";
  g.count = 1;
  g.bandwidth = bandwidth_mbps;
  g.cpu_scale = cpu_scale;
  g.propagation_delay = propagation_delay;
  return g;
}

inline void validate(const Task& t) {
  if (!(t.size > 0.0)) throw InvalidArgument("task " + std::to_string(t.id) + ": size must be > 0");
  if (!(t.value > 0.0)) throw InvalidArgument("task " + std::to_string(t.id) + ": value must be > 0");
  if (!(t.latency_budget > 0.0))
    throw InvalidArgument("task " + std::to_string(t.id) + ": latency budget must be > 0");
  if (!(t.arrival_time >= 0.0))
    throw InvalidArgument("task " + std::to_string(t.id) + ": arrival time must be >= 0");
}

inline void validate(const ServerGroup& g) {
  if (g.count < 0) throw InvalidArgument("group '" + g.name + "': negative server count");
  if (!(g.bandwidth > 0.0)) throw InvalidArgument("group '" + g.name + "': bandwidth must be > 0");
  if (!(g.cpu_scale > 0.0)) throw InvalidArgument("group '" + g.name + "': cpu_scale must be > 0");
  if (!(g.propagation_delay >= 0.0))
    throw InvalidArgument("group '" + g.name + "': propagation delay must be >= 0");
  if (!(g.unit_cost >= 0.0)) throw InvalidArgument("group '" + g.name + "': unit cost must be >= 0");
}

/// Tasks must be ordered by (arrival_time, id) with unique ids.
inline void validate_task_order(std::span<const Task> tasks) {
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    validate(tasks[i]);
    if (i == 0) continue;
    const Task& a = tasks[i - 1];
    const Task& b = tasks[i];
    if (a.arrival_time > b.arrival_time || (a.arrival_time == b.arrival_time && a.id >= b.id))
      throw InvalidArgument("tasks not ordered by (arrival_time, id) at position " +
                            std::to_string(i));
  }
}

[[nodiscard]] inline double total_value(std::span<const Task> tasks) {
  double sum = 0.0;
  for (const Task& t : tasks) sum += t.value;
  return sum;
}

[[nodiscard]] inline int total_servers(std::span<const ServerGroup> groups) {
  int n = 0;
  for (const auto& g : groups) n += g.count;
  return n;
}

/// Per-provider server counts (n_1, ..., n_m) naming an equivalence class of server subsets.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<int> counts) : counts_(std::move(counts)) {}
  Signature(std::initializer_list<int> counts) : counts_(counts) {}

  static Signature zeros(std::size_t m) { return Signature(std::vector<int>(m, 0)); }

  static Signature of(std::span<const ServerGroup> groups) {
    std::vector<int> c;
    c.reserve(groups.size());
    for (const auto& g : groups) c.push_back(g.count);
    return Signature(std::move(c));
  }

  [[nodiscard]] std::size_t size() const noexcept { return counts_.size(); }
  [[nodiscard]] int operator[](std::size_t k) const { return counts_[k]; }
  int& operator[](std::size_t k) { return counts_[k]; }
  [[nodiscard]] const std::vector<int>& counts() const noexcept { return counts_; }
  [[nodiscard]] int total() const { return std::accumulate(counts_.begin(), counts_.end(), 0); }
  [[nodiscard]] bool empty_coalition() const { return total() == 0; }

  [[nodiscard]] Signature with(std::size_t k, int delta) const {
    Signature s = *this;
    s.counts_[k] += delta;
    return s;
  }

  [[nodiscard]] bool within(const Signature& bound) const {
    if (bound.size() != size()) return false;
    for (std::size_t k = 0; k < size(); ++k)
      if (counts_[k] < 0 || counts_[k] > bound.counts_[k]) return false;
    return true;
  }

  [[nodiscard]] std::string to_string() const {
    std::string s = "(";
    for (std::size_t k = 0; k < counts_.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(counts_[k]);
    }
    return s + ")";
  }

  friend bool operator==(const Signature&, const Signature&) = default;
  friend auto operator<=>(const Signature&, const Signature&) = default;

 private:
  std::vector<int> counts_;
};

struct SignatureHash {
  std::size_t operator()(const Signature& s) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int c : s.counts()) {
      h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// Mixed-radix enumeration of every signature s with 0 <= s <= bound, in lexicographic order.
/// Index of s is sum_k s_k * stride_k with the last coordinate varying fastest.
class SignatureGrid {
 public:
  explicit SignatureGrid(Signature bound) : bound_(std::move(bound)) {
    strides_.assign(bound_.size(), 1);
    size_ = 1;
    for (std::size_t k = bound_.size(); k-- > 0;) {
      if (bound_[k] < 0) throw InvalidArgument("negative bound in signature grid");
      strides_[k] = size_;
      size_ *= static_cast<std::size_t>(bound_[k]) + 1;
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] const Signature& bound() const noexcept { return bound_; }
  [[nodiscard]] std::size_t stride(std::size_t k) const { return strides_[k]; }

  [[nodiscard]] std::size_t index(const Signature& s) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < s.size(); ++k) idx += static_cast<std::size_t>(s[k]) * strides_[k];
    return idx;
  }

  [[nodiscard]] Signature at(std::size_t idx) const {
    std::vector<int> c(bound_.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      c[k] = static_cast<int>(idx / strides_[k]);
      idx %= strides_[k];
    }
    return Signature(std::move(c));
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i < size_; ++i) fn(i, at(i));
  }

 private:
  Signature bound_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

/// A complete scheduling scenario: fleet, workload and the seed every random draw derives from.
struct Scenario {
  std::vector<ServerGroup> groups;
  std::vector<Task> tasks;
  double latency_factor = 1.0;
  std::uint64_t seed = 0;
  double horizon = 0.0;  // s
};

}  // namespace ecshare

#endif  // ECSHARE_CORE_HPP
