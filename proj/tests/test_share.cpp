#include <gtest/gtest.h>

#include <map>

#include "ecshare/coalition.hpp"
#include "ecshare/exact.hpp"
#include "ecshare/oracles.hpp"
#include "ecshare/share.hpp"
#include "support.hpp"

using namespace ecshare;
using ecshare::testing::batch_tasks;
using ecshare::testing::group;
using ecshare::testing::random_groups;
using ecshare::testing::TempDir;

namespace {

std::vector<ServerGroup> singletons(std::size_t n) {
  std::vector<ServerGroup> g;
  for (std::size_t k = 0; k < n; ++k) g.push_back(group(k, 1));
  return g;
}

// v({1}) = 2, v({2}) = 6, v({1,2}) = 40
double two_player(const Signature& s) {
  static const std::map<std::vector<int>, double> v{{{1, 0}, 2.0}, {{0, 1}, 6.0}, {{1, 1}, 40.0}};
  return s.empty_coalition() ? 0.0 : v.at(s.counts());
}

double additive(const Signature& s) { return s.total(); }

std::vector<std::size_t> labels_of(const std::vector<ServerGroup>& groups) {
  std::vector<std::size_t> labels;
  for (std::size_t k = 0; k < groups.size(); ++k)
    for (int j = 0; j < groups[k].count; ++j) labels.push_back(k);
  return labels;
}

std::vector<double> flat(const RevenueAllocation& a) {
  std::vector<double> out;
  for (const auto& g : a.per_server_share)
    for (double x : g) out.push_back(x);
  return out;
}

// Share of the single server of each group; 0 for an emptied group.
std::vector<double> per_group(const RevenueAllocation& a) {
  std::vector<double> out;
  for (const auto& g : a.per_server_share) out.push_back(g.empty() ? 0.0 : g[0]);
  return out;
}

}  // namespace

TEST(Shapley, WorkedExample) {
  const auto g = singletons(2);
  for (const auto& a : {shapley_exact(two_player, g), shapley_grouped(two_player, g)}) {
    EXPECT_EQ(a.per_server_share[0][0], 18.0);
    EXPECT_EQ(a.per_server_share[1][0], 22.0);
    EXPECT_EQ(a.per_provider_revenue, (std::vector<double>{18.0, 22.0}));
  }
}

TEST(Shapley, SingleServerGetsItsValue) {
  auto v = [](const Signature& s) { return s.total() == 1 ? 7.5 : 0.0; };
  const auto g = singletons(1);
  EXPECT_EQ(shapley_exact(v, g).per_server_share[0][0], 7.5);
  EXPECT_EQ(shapley_grouped(v, g).per_server_share[0][0], 7.5);
}

TEST(Shapley, AdditiveGame) {
  const std::vector<ServerGroup> g{group(0, 3)};
  for (double x : flat(shapley_exact(additive, g))) EXPECT_NEAR(x, 1.0, 1e-12);
  for (double x : flat(shapley_grouped(additive, g))) EXPECT_NEAR(x, 1.0, 1e-12);
}

TEST(Shapley, ExactRefusesLargeFleets) {
  const std::vector<ServerGroup> g{group(0, 6), group(1, 5)};
  EXPECT_THROW((void)shapley_exact(additive, g), BudgetExceeded);
  EXPECT_NO_THROW((void)shapley_grouped(additive, g));
}

TEST(Shapley, GroupedEvaluatesElevenSignaturesForThreePlusTwo) {
  RandomStream rng(17, "eleven");
  const auto tasks = batch_tasks(rng, 5);
  const std::vector<ServerGroup> fleet{group(0, 3), group(1, 2, 6.0)};
  CoalitionEvaluator eval(tasks, fleet, SchedulerKind::exact, 1);
  (void)shapley_grouped(eval, fleet);
  EXPECT_EQ(eval.evaluations(), 11u);
}

TEST(Shapley, GroupedMatchesExactAndOracleOnSchedules) {
  RandomStream rng(99, "grouped-vs-exact");
  for (int trial = 0; trial < 30; ++trial) {
    const auto tasks = batch_tasks(rng, 5);
    const std::vector<ServerGroup> fleet{group(0, 2), group(1, 2, 8.0)};
    CoalitionEvaluator eval(tasks, fleet, SchedulerKind::exact, 1);
    const auto grouped = flat(shapley_grouped(eval, fleet));
    const auto exact = flat(shapley_exact(eval, fleet));
    const auto ref = oracle::shapley([&](const std::vector<int>& c) { return eval.value(Signature(c)); },
                                     labels_of(fleet));
    ASSERT_EQ(grouped.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_NEAR(grouped[i], ref[i], 1e-9);
      EXPECT_NEAR(exact[i], ref[i], 1e-9);
    }
  }
}

TEST(Shapley, LargeFleetStaysEfficient) {
  // 70 servers exercises the log-factorial weights.
  auto v = [](const Signature& s) { return std::sqrt(1.0 * s[0]) * 10 + 2.0 * s[1]; };
  const std::vector<ServerGroup> g{group(0, 40), group(1, 30)};
  const auto a = shapley_grouped(v, g);
  EXPECT_NEAR(a.total(), v(Signature{40, 30}), 1e-9 * v(Signature{40, 30}));
  EXPECT_NEAR(a.per_server_share[1][0], 2.0, 1e-9);
}

TEST(Shapley, BalancedContributionsDifferenceForm) {
  // phi_i(N) - phi_i(N \ j) = phi_j(N) - phi_j(N \ i) on singleton fleets.
  RandomStream rng(5, "balanced");
  for (int trial = 0; trial < 20; ++trial) {
    const auto tasks = batch_tasks(rng, 4);
    std::vector<ServerGroup> fleet;
    for (std::size_t k = 0; k < 4; ++k) fleet.push_back(group(k, 1, 24.0 / (1 + rng.below(4))));
    CoalitionEvaluator eval(tasks, fleet, SchedulerKind::exact, 1);
    const auto full = per_group(shapley_exact(eval, fleet));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) {
        auto without = [&](std::size_t drop) {
          auto f = fleet;
          f[drop].count = 0;
          return per_group(shapley_exact(eval, f));
        };
        const auto no_j = without(j), no_i = without(i);
        EXPECT_NEAR(full[i] - no_j[i], full[j] - no_i[j], 1e-9);
      }
  }
}

TEST(Ortmann, WorkedExample) {
  const auto a = ortmann(two_player, singletons(2));
  EXPECT_EQ(a.per_server_share[0][0], 10.0);
  EXPECT_EQ(a.per_server_share[1][0], 30.0);
}

TEST(Ortmann, SingleServerGetsItsValue) {
  auto v = [](const Signature& s) { return s.total() == 1 ? 3.25 : 0.0; };
  EXPECT_EQ(ortmann(v, singletons(1)).per_server_share[0][0], 3.25);
}

TEST(Ortmann, TwoPlayerClosedForm) {
  // share_i = v(i) / (v(i) + v(j)) * v(ij)
  auto v = [](const Signature& s) {
    if (s == Signature{1, 0}) return 3.0;
    if (s == Signature{0, 1}) return 5.0;
    return s.empty_coalition() ? 0.0 : 11.0;
  };
  const auto a = ortmann(v, singletons(2));
  EXPECT_NEAR(a.per_server_share[0][0], 3.0 / 8.0 * 11.0, 1e-12);
  EXPECT_NEAR(a.per_server_share[1][0], 5.0 / 8.0 * 11.0, 1e-12);
}

TEST(Ortmann, RatioBalancedContributions) {
  // phi_i(N) / phi_i(N \ j) = phi_j(N) / phi_j(N \ i) on three singletons.
  RandomStream rng(41, "ratio");
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 20; ++trial) {
    const auto tasks = batch_tasks(rng, 4);
    std::vector<ServerGroup> fleet;
    for (std::size_t k = 0; k < 3; ++k) fleet.push_back(group(k, 1, 24.0 / (1 + rng.below(4))));
    CoalitionEvaluator eval(tasks, fleet, SchedulerKind::exact, 1);
    bool positive = true;
    for (std::size_t k = 0; k < 3; ++k) positive = positive && eval.value(Signature::zeros(3).with(k, 1)) > 0.0;
    if (!positive) continue;  // ratios need every singleton to be worth something
    ++checked;
    const auto full = per_group(ortmann(eval, fleet));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) {
        auto without = [&](std::size_t drop) {
          auto f = fleet;
          f[drop].count = 0;
          return per_group(ortmann(eval, f));
        };
        const auto no_j = without(j), no_i = without(i);
        EXPECT_NEAR(full[i] * no_i[j], full[j] * no_j[i], 1e-9 * std::max(1.0, full[i] * no_i[j]));
      }
  }
  EXPECT_GE(checked, 20);
}

TEST(Ortmann, ZeroSingletonGroupIsExcluded) {
  // Group 1 adds nothing alone or together: it gets 0 and group 0 keeps everything.
  auto v = [](const Signature& s) { return 4.0 * s[0]; };
  const auto a = ortmann(v, std::vector<ServerGroup>{group(0, 2), group(1, 2)});
  EXPECT_NEAR(a.per_server_share[0][0], 4.0, 1e-12);
  EXPECT_EQ(a.per_server_share[1][0], 0.0);
  EXPECT_NEAR(a.total(), 8.0, 1e-12);
}

TEST(Ortmann, ZeroSingletonWithSynergyStillEfficient) {
  auto v = [](const Signature& s) { return s[0] > 0 && s[1] > 0 ? 10.0 : 2.0 * s[0]; };
  const auto a = ortmann(v, singletons(2));
  EXPECT_NEAR(a.total(), 10.0, 1e-12);
  EXPECT_EQ(a.per_server_share[1][0], 0.0);
}

TEST(Ortmann, UndefinedCasesThrow) {
  auto only_pairs = [](const Signature& s) { return s.total() == 2 ? 5.0 : 0.0; };
  EXPECT_THROW((void)ortmann(only_pairs, singletons(2)), InvalidArgument);
  auto negative = [](const Signature& s) { return -1.0 * s.total(); };
  EXPECT_THROW((void)ortmann(negative, singletons(2)), InvalidArgument);
  auto zero = [](const Signature&) { return 0.0; };
  EXPECT_EQ(ortmann(zero, singletons(2)).total(), 0.0);
}

TEST(Mechanisms, EfficiencyAndGroupSymmetry) {
  RandomStream rng(12, "efficiency");
  for (int trial = 0; trial < 25; ++trial) {
    const auto tasks = batch_tasks(rng, 5);
    auto fleet = random_groups(rng, 2, 5);
    CoalitionEvaluator eval(tasks, fleet, SchedulerKind::exact, 1);
    const double vn = eval.value(eval.bound());
    for (const auto& a : {shapley_grouped(eval, fleet), shapley_exact(eval, fleet), ortmann(eval, fleet),
                          direct_contribution(eval.schedule(eval.bound()), fleet)}) {
      EXPECT_NEAR(a.total(), vn, 1e-9 * std::max(1.0, vn)) << to_string(a.mechanism);
      double providers = 0.0;
      for (double r : a.per_provider_revenue) providers += r;
      EXPECT_NEAR(providers, vn, 1e-9 * std::max(1.0, vn));
      if (a.mechanism == Mechanism::direct) continue;
      for (const auto& g : a.per_server_share)
        for (double x : g) EXPECT_NEAR(x, g.front(), 1e-9 * std::max(1.0, std::abs(x)));
    }
  }
}

TEST(Mechanisms, ProviderSwapSymmetry) {
  // Swapping two identical providers swaps their revenue.
  RandomStream rng(77, "swap");
  for (int trial = 0; trial < 10; ++trial) {
    const auto tasks = batch_tasks(rng, 5);
    std::vector<ServerGroup> fleet{group(0, 1 + rng.below(2)), group(1, 1 + rng.below(2))};
    auto swapped = fleet;
    std::swap(swapped[0].count, swapped[1].count);
    CoalitionEvaluator a(tasks, fleet, SchedulerKind::exact, 1), b(tasks, swapped, SchedulerKind::exact, 1);
    for (int m = 0; m < 2; ++m) {
      const auto ra = m == 0 ? shapley_grouped(a, fleet) : ortmann(a, fleet);
      const auto rb = m == 0 ? shapley_grouped(b, swapped) : ortmann(b, swapped);
      EXPECT_NEAR(ra.per_provider_revenue[0], rb.per_provider_revenue[1], 1e-9);
      EXPECT_NEAR(ra.per_provider_revenue[1], rb.per_provider_revenue[0], 1e-9);
    }
  }
}

TEST(Direct, SharesAreScheduleValues) {
  Schedule s;
  s.per_server_value = {{8.0, 0.0}};
  s.total_value = 8.0;
  const auto a = direct_contribution(s, std::vector<ServerGroup>{group(0, 2)});
  EXPECT_EQ(a.per_server_share[0][0], 8.0);
  EXPECT_EQ(a.per_server_share[0][1], 0.0);
  EXPECT_EQ(a.per_provider_revenue[0], 8.0);
  EXPECT_THROW((void)direct_contribution(s, std::vector<ServerGroup>{group(0, 3)}), InvalidArgument);
}

TEST(Allocation, CsvLayout) {
  const auto csv = allocation_csv(ortmann(two_player, singletons(2)));
  EXPECT_EQ(csv, "mechanism,group,server,share\nortmann,0,0,10\nortmann,1,0,30\n");
}

TEST(ValueTable, ReadsAndValidates) {
  TempDir dir("values");
  const auto vt = read_value_table(dir.write("v.csv", "n_1,n_2,value\n1,0,2\n0,1,6\n1,1,40\n0,0,0\n"));
  EXPECT_EQ(vt.fleet, (Signature{1, 1}));
  EXPECT_EQ(vt(Signature{1, 1}), 40.0);
  EXPECT_EQ(vt(Signature{0, 0}), 0.0);
  EXPECT_THROW((void)read_value_table(dir.write("a.csv", "n_1,value\n1,2\n1,3\n")), InvalidArgument);
  EXPECT_THROW((void)read_value_table(dir.write("b.csv", "n_1,value\n0,2\n")), InvalidArgument);
  EXPECT_THROW((void)read_value_table(dir.write("c.csv", "a,value\n1,2\n")), InvalidArgument);
  const auto gap = read_value_table(dir.write("d.csv", "n_1,n_2,value\n1,1,3\n"));
  EXPECT_THROW((void)shapley_grouped(gap, gap.groups()), InvalidArgument);
}
