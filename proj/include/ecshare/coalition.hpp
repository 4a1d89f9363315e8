#ifndef ECSHARE_COALITION_HPP
#define ECSHARE_COALITION_HPP

#include <atomic>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "ecshare/core.hpp"
#include "ecshare/exact.hpp"
#include "ecshare/greedy.hpp"
#include "ecshare/schedule.hpp"

namespace ecshare {

enum class SchedulerKind { greedy, exact };

[[nodiscard]] inline std::string_view to_string(SchedulerKind k) {
  return k == SchedulerKind::greedy ? "greedy" : "exact";
}

[[nodiscard]] inline SchedulerKind parse_scheduler(std::string_view s) {
  if (s == "greedy") return SchedulerKind::greedy;
  if (s == "exact") return SchedulerKind::exact;
  throw InvalidArgument("unknown scheduler '" + std::string(s) + "' (expected greedy|exact)");
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception is
/// rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::jthread> pool;
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  pool.reserve(count);
  for (std::size_t k = 0; k < count; ++k) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

/// Outcome of scheduling the fixed task list on one sub-fleet.
struct CoalitionRecord {
  double total = 0.0;
  std::vector<double> per_group;
};

/// Evaluates v(S) for signatures S of a fleet on one fixed task list and seed.
/// Results are memoized per signature; concurrent callers may compute the same
/// signature twice but always observe the first stored record.
class CoalitionEvaluator {
 public:
  CoalitionEvaluator(std::vector<Task> tasks, std::vector<ServerGroup> fleet,
                     SchedulerKind scheduler, std::uint64_t seed, ExactOptions exact = {})
      : tasks_(std::move(tasks)),
        fleet_(std::move(fleet)),
        scheduler_(scheduler),
        seed_(seed),
        exact_(exact) {
    validate_task_order(tasks_);
    for (const auto& g : fleet_) validate(g);
  }

  [[nodiscard]] const std::vector<Task>& tasks() const noexcept { return tasks_; }
  [[nodiscard]] const std::vector<ServerGroup>& fleet() const noexcept { return fleet_; }
  [[nodiscard]] Signature bound() const { return Signature::of(fleet_); }
  [[nodiscard]] SchedulerKind scheduler() const noexcept { return scheduler_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  [[nodiscard]] std::vector<ServerGroup> sub_fleet(const Signature& s) const {
    if (!s.within(bound()))
      throw InvalidArgument("signature " + s.to_string() + " exceeds fleet " + bound().to_string());
    auto groups = fleet_;
    for (std::size_t k = 0; k < groups.size(); ++k) groups[k].count = s[k];
    return groups;
  }

  [[nodiscard]] Schedule schedule(const Signature& s) const {
    const auto groups = sub_fleet(s);
    if (scheduler_ == SchedulerKind::greedy) return greedy_online(tasks_, groups, seed_);
    return solve_batch_exact(tasks_, groups, exact_);
  }

  [[nodiscard]] const CoalitionRecord& record(const Signature& s) {
    if (s.empty_coalition()) {
      if (!s.within(bound())) throw InvalidArgument("signature arity mismatch");
      std::call_once(empty_once_, [&] { empty_.per_group.assign(fleet_.size(), 0.0); });
      return empty_;
    }
    {
      std::shared_lock lock(mutex_);
      if (auto it = cache_.find(s); it != cache_.end()) return it->second;
    }
    const Schedule sched = schedule(s);
    CoalitionRecord rec{sched.total_value, sched.per_group_value()};
    std::unique_lock lock(mutex_);
    return cache_.try_emplace(s, std::move(rec)).first->second;
  }

  [[nodiscard]] double value(const Signature& s) { return record(s).total; }
  double operator()(const Signature& s) { return value(s); }

  /// Number of distinct non-empty signatures evaluated so far.
  [[nodiscard]] std::size_t evaluations() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
  }

 private:
  std::vector<Task> tasks_;
  std::vector<ServerGroup> fleet_;
  SchedulerKind scheduler_;
  std::uint64_t seed_;
  ExactOptions exact_;

  mutable std::shared_mutex mutex_;
  std::unordered_map<Signature, CoalitionRecord, SignatureHash> cache_;
  std::once_flag empty_once_;
  CoalitionRecord empty_;
};

}  // namespace ecshare

#endif  // ECSHARE_COALITION_HPP
