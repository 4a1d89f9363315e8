#include <gtest/gtest.h>

#include "ecshare/experiment.hpp"
#include "ecshare/oracles.hpp"

using namespace ecshare;

namespace {

SweepSpec small_spec() {
  SweepSpec s = SweepSpec::desk();
  s.k_bw = {4};
  s.k_latency = {1.4};
  s.replications = 1;
  s.workload.horizon_s = 120;
  s.cap_limit = 6;
  return s;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Sweep, PresetParameters) {
  const auto desk = SweepSpec::desk();
  EXPECT_EQ(desk.workload.horizon_s, 300.0);
  EXPECT_EQ(desk.workload.rate_per_min, 8.0);
  EXPECT_EQ(desk.cap_limit, 12);
  EXPECT_EQ(desk.replications, 5);
  const auto paper = SweepSpec::paper();
  EXPECT_EQ(paper.workload.horizon_s, 3600.0);
  EXPECT_EQ(paper.workload.rate_per_min, 40.0);
}

TEST(Sweep, ScenarioShape) {
  const auto spec = SweepSpec::desk();
  const Scenario sc = sweep_scenario(spec, 4.0, 2.0, 0);
  ASSERT_EQ(sc.groups.size(), 2u);
  EXPECT_EQ(sc.groups[0].bandwidth, 24.0);
  EXPECT_EQ(sc.groups[1].bandwidth, 6.0);
  EXPECT_EQ(sc.groups[0].unit_cost, 4.0);
  EXPECT_EQ(sc.groups[1].unit_cost, 3.0);
  EXPECT_EQ(sc.latency_factor, 2.0);
  for (const auto& t : sc.tasks) {
    const double l_avg = 2.6 * t.size + 8.0 * t.size / 24.0;
    EXPECT_LE(t.latency_budget, 2.0 * l_avg * (1 + 1e-12));
  }
}

TEST(Sweep, ReplicationSeedsDiffer) {
  EXPECT_NE(replication_seed(1, 4, 1.4, 0), replication_seed(1, 4, 1.4, 1));
  EXPECT_NE(replication_seed(1, 4, 1.4, 0), replication_seed(1, 3, 1.4, 0));
  EXPECT_NE(replication_seed(1, 4, 1.4, 0), replication_seed(1, 4, 2, 0));
  EXPECT_EQ(replication_seed(1, 4, 1.4, 0), replication_seed(1, 4, 1.4, 0));
}

TEST(Sweep, SingleCellOneReplicationOneRowPerMechanism) {
  auto spec = small_spec();
  spec.mechanisms = {Mechanism::shapley};
  const auto r = run_sweep(spec);
  ASSERT_EQ(r.cells.size(), 1u);
  EXPECT_TRUE(r.cells[0].ok) << r.cells[0].error;
  EXPECT_EQ(count_lines(results_csv(r)), 2u);
}

TEST(Sweep, ReproducibleAndJobsIndependent) {
  auto spec = small_spec();
  spec.k_bw = {1, 4};
  spec.replications = 2;
  const auto a = run_sweep(spec);
  spec.jobs = 3;
  const auto b = run_sweep(spec);
  EXPECT_EQ(results_csv(a), results_csv(b));
  const auto ta = summarize(a), tb = summarize(b);
  ASSERT_EQ(ta.size(), tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) EXPECT_EQ(ta[i].csv, tb[i].csv);
}

TEST(Sweep, EquilibriaPassDeviationCheck) {
  auto spec = small_spec();
  spec.replications = 2;
  const auto r = run_sweep(spec);
  for (const auto& c : r.cells) {
    ASSERT_TRUE(c.ok) << c.error;
    const Scenario sc = sweep_scenario(spec, c.k_bw, c.k_latency, c.replication);
    Signature caps = default_caps(sc);
    for (std::size_t k = 0; k < 2; ++k) caps[k] = std::min(caps[k], spec.cap_limit);
    const auto table = build_utility_table(sc, c.mechanism, caps);
    for (const auto& e : c.equilibria) EXPECT_TRUE(oracle::equilibrium_check(table, e));
    if (c.mixed) {
      EXPECT_TRUE(oracle::equilibrium_check(table, oracle::Mixture{c.mixed->row, c.mixed->col}));
    }
  }
}

TEST(Summary, ShapeAndAggregation) {
  SweepSpec spec = SweepSpec::desk();
  spec.k_latency = {1.4};
  SweepResult r;
  r.spec = spec;
  int rep = 0;
  for (double kb : spec.k_bw)
    for (Mechanism m : spec.mechanisms)
      for (int i = 0; i < 2; ++i) {
        CellResult c;
        c.k_bw = kb;
        c.k_latency = 1.4;
        c.mechanism = m;
        c.replication = i;
        c.ok = true;
        c.utility_loss = 0.1 * (i + 1);
        c.server_ratio = 2.0;
        r.cells.push_back(c);
        ++rep;
      }
  const auto tables = summarize(r);
  ASSERT_EQ(tables.size(), 2u);
  EXPECT_EQ(tables[0].name, "utility_loss_klat_1.4.csv");
  EXPECT_EQ(tables[1].name, "server_ratio_klat_1.4.csv");
  const auto& csv = tables[0].csv;
  EXPECT_EQ(count_lines(csv), 5u);  // header + 4 k_bw rows
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "k_bw,shapley_mean,shapley_std,shapley_n,ortmann_mean,ortmann_std,ortmann_n,direct_mean,direct_std,direct_n");
  const auto a = entry(r, Metric::utility_loss, 1, 1.4, Mechanism::shapley);
  EXPECT_EQ(a.count, 2u);
  EXPECT_NEAR(a.mean, 0.15, 1e-12);
  EXPECT_NEAR(a.stddev, std::sqrt(0.005), 1e-12);
}

TEST(Summary, FailedCellsLeaveBlanksAndErrors) {
  SweepSpec spec = SweepSpec::desk();
  spec.k_bw = {1};
  spec.k_latency = {2};
  spec.mechanisms = {Mechanism::direct};
  SweepResult r;
  r.spec = spec;
  CellResult c;
  c.k_bw = 1;
  c.k_latency = 2;
  c.mechanism = Mechanism::direct;
  c.error = "strategy grid too large";
  r.cells.push_back(c);
  const auto tables = summarize(r);
  EXPECT_EQ(tables[0].csv, "k_bw,direct_mean,direct_std,direct_n\n1,,,0\n");
  EXPECT_EQ(errors_csv(r), "cell,error\n\"k_bw=1,k_latency=2,mechanism=direct,rep=0\",strategy grid too large\n");
  EXPECT_THROW((void)summarize(SweepResult{}), InvalidArgument);
}

TEST(Sweep, SetupFailureRecordedPerCell) {
  auto spec = small_spec();
  spec.edge_cost = 0.0;  // unbounded game
  const auto r = run_sweep(spec);
  for (const auto& c : r.cells) {
    EXPECT_FALSE(c.ok);
    EXPECT_NE(c.error.find("unit cost"), std::string::npos) << c.error;
  }
}

TEST(Sweep, ValidateRejectsBadSpecs) {
  auto spec = small_spec();
  spec.replications = 0;
  EXPECT_THROW((void)run_sweep(spec), InvalidArgument);
  spec = small_spec();
  spec.k_latency = {0.5};
  EXPECT_THROW((void)run_sweep(spec), InvalidArgument);
}
