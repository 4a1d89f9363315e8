#include <gtest/gtest.h>

#include "ecshare/coalition.hpp"
#include "ecshare/exact.hpp"
#include "ecshare/greedy.hpp"
#include "ecshare/oracles.hpp"
#include "ecshare/schedule.hpp"
#include "ecshare/workload.hpp"
#include "support.hpp"

using namespace ecshare;
using ecshare::testing::batch_tasks;
using ecshare::testing::group;
using ecshare::testing::random_groups;

namespace {

// One server on which every task of `size` MB takes exactly `d` seconds.
constexpr double kSize = 1.0;
const double kD = 2.6 + 8.0 / 24.0;

Task task(std::size_t id, double value, double budget_in_d, double arrival = 0.0) {
  return Task{id, arrival, kSize, value, budget_in_d * kD};
}

}  // namespace

TEST(Exact, SingleFeasibleTask) {
  const std::vector<Task> tasks{task(0, 5, 1.5)};
  const std::vector<ServerGroup> groups{group(0, 1)};
  const auto s = solve_batch_exact(tasks, groups);
  EXPECT_EQ(s.total_value, 5.0);
  EXPECT_FALSE(s.assignments[0].dropped);
  EXPECT_NO_THROW(check_schedule(s, tasks, groups, true));
}

TEST(Exact, NoServersDropsEverything) {
  const std::vector<Task> tasks{task(0, 5, 3), task(1, 2, 3)};
  const std::vector<ServerGroup> groups{group(0, 0)};
  const auto s = solve_batch_exact(tasks, groups);
  EXPECT_EQ(s.total_value, 0.0);
  EXPECT_TRUE(s.assignments[0].dropped && s.assignments[1].dropped);
}

TEST(Exact, ArrivalOrderBlocksLaterTask) {
  // A (v=5, L=5d) then B (v=3, L=1.5d): B cannot run behind A, so the optimum is A alone.
  const std::vector<Task> tasks{task(0, 5, 5), task(1, 3, 1.5)};
  const std::vector<ServerGroup> groups{group(0, 1)};
  const auto s = solve_batch_exact(tasks, groups);
  EXPECT_EQ(s.total_value, 5.0);
  EXPECT_EQ(oracle::batch_optimum(tasks, groups), 5.0);
  EXPECT_TRUE(s.assignments[1].dropped);
}

TEST(Exact, ServesInArrivalOrderPerServer) {
  const std::vector<Task> tasks{task(0, 1, 4), task(1, 1, 4), task(2, 1, 4)};
  const std::vector<ServerGroup> groups{group(0, 1)};
  const auto s = solve_batch_exact(tasks, groups);
  EXPECT_EQ(s.total_value, 3.0);
  EXPECT_NEAR(s.assignments[2].start, 2 * kD, 1e-12);
  EXPECT_NO_THROW(check_schedule(s, tasks, groups, true));
}

TEST(Exact, RejectsOnlineInstances) {
  const std::vector<Task> tasks{task(0, 1, 4, 0.0), task(1, 1, 4, 1.0)};
  EXPECT_THROW((void)solve_batch_exact(tasks, std::vector<ServerGroup>{group(0, 1)}), InvalidArgument);
}

TEST(Exact, NodeBudgetGuardReportsBound) {
  RandomStream rng(3, "guard");
  auto tasks = batch_tasks(rng, 12);
  for (auto& t : tasks) t.latency_budget = 1e6;
  const std::vector<ServerGroup> groups{group(0, 6)};
  const double bound = exact_node_bound(tasks, groups);
  EXPECT_GT(bound, 1e9);
  try {
    (void)solve_batch_exact(tasks, groups, ExactOptions{1e6});
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("bound"), std::string::npos) << e.what();
  }
}

TEST(Exact, LexicographicTieBreakPrefersEarlierServers) {
  const std::vector<Task> tasks{task(0, 2, 3)};
  const std::vector<ServerGroup> groups{group(0, 2), group(1, 2)};
  const auto s = solve_batch_exact(tasks, groups);
  EXPECT_EQ(s.assignments[0].group, 0);
  EXPECT_EQ(s.assignments[0].server, 0);
}

TEST(Exact, MatchesOracleOnRandomInstances) {
  RandomStream rng(2024, "exact-vs-oracle");
  for (int trial = 0; trial < 150; ++trial) {
    const auto tasks = batch_tasks(rng, 1 + rng.below(4));
    const auto groups = random_groups(rng, 1 + rng.below(2), 3);
    ExactStats stats;
    const auto s = solve_batch_exact(tasks, groups, {}, &stats);
    ASSERT_EQ(s.total_value, oracle::batch_optimum(tasks, groups)) << "trial " << trial;
    ASSERT_NO_THROW(check_schedule(s, tasks, groups, true));
    ASSERT_LE(static_cast<double>(stats.nodes), stats.node_bound);
  }
}

TEST(Greedy, PicksHigherValueFirst) {
  // Both at t=0: greedy takes A (5) first and B misses its deadline.
  const std::vector<Task> tasks{task(0, 5, 5), task(1, 3, 1.5)};
  const std::vector<ServerGroup> groups{group(0, 1)};
  const auto s = greedy_online(tasks, groups, 1);
  EXPECT_EQ(s.total_value, 5.0);
  EXPECT_TRUE(s.assignments[1].dropped);
}

TEST(Greedy, InfeasibleTaskDropped) {
  const std::vector<Task> tasks{task(0, 5, 0.5)};
  const auto s = greedy_online(tasks, std::vector<ServerGroup>{group(0, 3)}, 1);
  EXPECT_EQ(s.total_value, 0.0);
  EXPECT_TRUE(s.assignments[0].dropped);
}

TEST(Greedy, TwoTasksTwoServers) {
  const std::vector<Task> tasks{task(0, 2, 1), task(1, 2, 1)};
  const std::vector<ServerGroup> groups{group(0, 2)};
  const auto s = greedy_online(tasks, groups, 9);
  EXPECT_EQ(s.total_value, 4.0);
  EXPECT_NE(s.assignments[0].server, s.assignments[1].server);
}

TEST(Greedy, NoServers) {
  const std::vector<Task> tasks{task(0, 2, 5)};
  EXPECT_EQ(greedy_online(tasks, std::vector<ServerGroup>{group(0, 0)}, 1).total_value, 0.0);
}

TEST(Greedy, EqualValuesServedInArrivalOrder) {
  const std::vector<Task> tasks{task(0, 3, 10, 0.0), task(1, 3, 10, 0.1), task(2, 3, 10, 0.2)};
  const std::vector<ServerGroup> groups{group(0, 1)};
  const auto s = greedy_online(tasks, groups, 1);
  EXPECT_LT(s.assignments[1].start, s.assignments[2].start);
}

TEST(Greedy, CanBeatTheFcfsOptimum) {
  // A (v=1, L=5d) and B (v=5, L=d) both at 0 on one server. Greedy serves B
  // first and still fits A; the FCFS model must put A first, which kills B.
  const std::vector<Task> tasks{task(0, 1, 5), task(1, 5, 1)};
  const std::vector<ServerGroup> groups{group(0, 1)};
  EXPECT_EQ(greedy_online(tasks, groups, 1).total_value, 6.0);
  EXPECT_EQ(solve_batch_exact(tasks, groups).total_value, 5.0);
}

TEST(Greedy, SchedulesAreValidAndDeterministic) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    WorkloadParams p;
    p.seed = seed;
    p.horizon_s = 600;
    p.rate_per_min = 12;
    const auto tasks = generate_workload(p);
    const std::vector<ServerGroup> groups{group(0, 3), group(1, 2, 6.0)};
    const auto a = greedy_online(tasks, groups, seed);
    const auto b = greedy_online(tasks, groups, seed);
    ASSERT_NO_THROW(check_schedule(a, tasks, groups, false));
    EXPECT_EQ(schedule_csv(a, tasks), schedule_csv(b, tasks));
    for (std::size_t i = 0; i < tasks.size(); ++i)
      if (!a.assignments[i].dropped) {
        EXPECT_GE(a.assignments[i].start, tasks[i].arrival_time);
      }
  }
}

TEST(Greedy, OrderOfOtherGroupsStableWhenOneGroupGrows) {
  // A server idle at an event keeps its draw when another group gets bigger,
  // so identical fleets plus an unusable extra group give identical schedules.
  WorkloadParams p;
  p.seed = 5;
  p.horizon_s = 600;
  p.rate_per_min = 10;
  const auto tasks = generate_workload(p);
  ServerGroup useless = group(2, 0, 1e-6);
  std::vector<ServerGroup> base{group(0, 2), group(1, 2, 8.0), useless};
  auto bigger = base;
  bigger[2].count = 3;
  const auto a = greedy_online(tasks, base, 77);
  const auto b = greedy_online(tasks, bigger, 77);
  EXPECT_EQ(a.total_value, b.total_value);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    EXPECT_EQ(a.assignments[i].group, b.assignments[i].group);
    EXPECT_EQ(a.assignments[i].server, b.assignments[i].server);
  }
}

TEST(CheckSchedule, CatchesBrokenSchedules) {
  const std::vector<Task> tasks{task(0, 1, 4), task(1, 1, 4)};
  const std::vector<ServerGroup> groups{group(0, 1)};
  auto s = solve_batch_exact(tasks, groups);
  ASSERT_EQ(s.total_value, 2.0);
  auto late = s;
  late.assignments[1].completion = 100 * kD;
  EXPECT_THROW(check_schedule(late, tasks, groups, true), InvariantViolation);
  auto overlap = s;
  overlap.assignments[1].start = 0.0;
  EXPECT_THROW(check_schedule(overlap, tasks, groups, true), InvariantViolation);
  auto value = s;
  value.total_value = 3.0;
  EXPECT_THROW(check_schedule(value, tasks, groups, true), InvariantViolation);
  auto order = s;
  std::swap(order.assignments[0], order.assignments[1]);
  EXPECT_THROW(check_schedule(order, tasks, groups, true), InvariantViolation);
}

TEST(ScheduleCsv, DroppedRowsHaveBlankFields) {
  const std::vector<Task> tasks{task(0, 5, 5), task(1, 3, 1.5)};
  const std::vector<ServerGroup> groups{group(0, 1)};
  const auto csv = schedule_csv(solve_batch_exact(tasks, groups), tasks);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "task_id,group,server,start_s,completion_s,dropped");
  EXPECT_NE(csv.find("\n1,,,,,1\n"), std::string::npos) << csv;
}

TEST(Coalition, EmptyFullAndMonotone) {
  RandomStream rng(8, "coalition");
  const auto tasks = batch_tasks(rng, 5);
  const std::vector<ServerGroup> fleet{group(0, 1), group(1, 1, 12.0)};
  CoalitionEvaluator eval(tasks, fleet, SchedulerKind::exact, 1);
  EXPECT_EQ(eval.value(Signature{0, 0}), 0.0);
  EXPECT_EQ(eval.evaluations(), 0u);
  EXPECT_EQ(eval.value(Signature{1, 1}), solve_batch_exact(tasks, fleet).total_value);
  EXPECT_LE(eval.value(Signature{1, 0}), eval.value(Signature{1, 1}));
  EXPECT_LE(eval.value(Signature{0, 1}), eval.value(Signature{1, 1}));
  EXPECT_EQ(eval.evaluations(), 3u);
  (void)eval.value(Signature{1, 0});
  EXPECT_EQ(eval.evaluations(), 3u);
  EXPECT_THROW((void)eval.value(Signature{2, 0}), InvalidArgument);
}

TEST(Coalition, GreedyUsesTheSeed) {
  WorkloadParams p;
  p.seed = 2;
  p.horizon_s = 300;
  const auto tasks = generate_workload(p);
  const std::vector<ServerGroup> fleet{group(0, 3), group(1, 2, 6.0)};
  CoalitionEvaluator eval(tasks, fleet, SchedulerKind::greedy, 31);
  EXPECT_EQ(eval.value(Signature{3, 2}), greedy_online(tasks, fleet, 31).total_value);
}

TEST(Coalition, ConcurrentReadersAgree) {
  WorkloadParams p;
  p.seed = 4;
  p.horizon_s = 300;
  const auto tasks = generate_workload(p);
  const std::vector<ServerGroup> fleet{group(0, 4), group(1, 4, 6.0)};
  CoalitionEvaluator eval(tasks, fleet, SchedulerKind::greedy, 3);
  SignatureGrid grid(eval.bound());
  std::vector<double> serial(grid.size()), parallel(grid.size());
  {
    CoalitionEvaluator fresh(tasks, fleet, SchedulerKind::greedy, 3);
    for (std::size_t i = 0; i < grid.size(); ++i) serial[i] = fresh.value(grid.at(i));
  }
  parallel_for(grid.size() * 3, 4, [&](std::size_t k) { parallel[k % grid.size()] = eval.value(grid.at(k % grid.size())); });
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(eval.evaluations(), grid.size() - 1);
}

TEST(ParallelFor, RethrowsFirstError) {
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 5) throw InvalidArgument("boom");
                            }),
               InvalidArgument);
}
