#ifndef ECSHARE_EXPERIMENT_HPP
#define ECSHARE_EXPERIMENT_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecshare/coalition.hpp"
#include "ecshare/core.hpp"
#include "ecshare/csv.hpp"
#include "ecshare/game.hpp"
#include "ecshare/rng.hpp"
#include "ecshare/share.hpp"
#include "ecshare/workload.hpp"

namespace ecshare {

/// Two-provider edge/cloud study over bandwidth and latency factors.
struct SweepSpec {
  std::string preset = "desk";
  std::uint64_t seed = 1;
  WorkloadParams workload;  // seed and latency_factor are set per cell
  double edge_bandwidth = 24.0;
  double edge_cost = 4.0;
  double cloud_cost = 3.0;
  double cpu_scale = 1.0;
  double propagation_delay = 0.0;
  std::vector<double> k_bw{1, 2, 3, 4};
  std::vector<double> k_latency{1.4, 2, 4};
  std::vector<Mechanism> mechanisms{Mechanism::shapley, Mechanism::ortmann, Mechanism::direct};
  int replications = 5;
  int cap_limit = 12;
  SchedulerKind scheduler = SchedulerKind::greedy;
  MixedOptions mixed{};
  int jobs = 1;

  /// T = 5 min, 8 tasks/min, caps <= 12.
  static SweepSpec desk() {
    SweepSpec s;
    s.workload.horizon_s = 300.0;
    s.workload.rate_per_min = 8.0;
    return s;
  }

  /// T = 60 min, 40 tasks/min.
  static SweepSpec paper() {
    SweepSpec s;
    s.preset = "paper";
    s.workload.horizon_s = 3600.0;
    s.workload.rate_per_min = 40.0;
    s.cap_limit = 24;
    return s;
  }

  void validate() const {
    if (k_bw.empty() || k_latency.empty() || mechanisms.empty())
      throw InvalidArgument("sweep factor lists must be non-empty");
    if (replications < 1) throw InvalidArgument("replications must be >= 1");
    if (cap_limit < 1) throw InvalidArgument("cap limit must be >= 1");
    for (double k : k_bw)
      if (!(k > 0.0)) throw InvalidArgument("k_bw must be > 0");
    for (double k : k_latency)
      if (!(k >= 1.0)) throw InvalidArgument("k_latency must be >= 1");
  }
};

/// Seed of replication `rep` of the (k_bw, k_latency) cell. Mechanisms share it.
[[nodiscard]] inline std::uint64_t replication_seed(std::uint64_t seed, double k_bw, double k_latency, int rep) {
  const std::uint64_t cell = fnv1a64("k_bw=" + csv::num(k_bw) + ";k_latency=" + csv::num(k_latency));
  return splitmix64(seed + cell + static_cast<std::uint64_t>(rep));
}

/// Edge group 0 and cloud group 1 (bandwidth edge_bandwidth / k_bw).
[[nodiscard]] inline Scenario sweep_scenario(const SweepSpec& spec, double k_bw, double k_latency, int rep) {
  Scenario sc;
  sc.seed = replication_seed(spec.seed, k_bw, k_latency, rep);
  sc.latency_factor = k_latency;
  sc.horizon = spec.workload.horizon_s;
  WorkloadParams w = spec.workload;
  w.seed = sc.seed;
  w.latency_factor = k_latency;
  sc.tasks = generate_workload(w);
  ServerGroup edge;
  edge.provider_id = 0;
  edge.name = "edge";
  edge.bandwidth = spec.edge_bandwidth;
  edge.cpu_scale = spec.cpu_scale;
  edge.propagation_delay = spec.propagation_delay;
  edge.unit_cost = spec.edge_cost;
  ServerGroup cloud = edge;
  cloud.provider_id = 1;
  cloud.name = "cloud";
  cloud.bandwidth = spec.edge_bandwidth / k_bw;
  cloud.unit_cost = spec.cloud_cost;
  sc.groups = {edge, cloud};
  return sc;
}

struct CellResult {
  double k_bw = 0.0;
  double k_latency = 0.0;
  Mechanism mechanism = Mechanism::shapley;
  int replication = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::optional<double> utility_loss;
  std::vector<Signature> equilibria;
  std::optional<MixedEquilibrium> mixed;
  double edge_servers = 0.0;   // mean over equilibria (expected count if mixed)
  double cloud_servers = 0.0;
  double server_ratio = 0.0;   // edge / cloud, averaged over equilibria
  double equilibrium_revenue = 0.0;
  double optimum_utility = 0.0;
  bool equilibrium_at_cap = false;
  double seconds = 0.0;

  [[nodiscard]] std::string id() const {
    return "k_bw=" + csv::num(k_bw) + ",k_latency=" + csv::num(k_latency) + ",mechanism=" +
           std::string(to_string(mechanism)) + ",rep=" + std::to_string(replication);
  }
};

struct SweepResult {
  SweepSpec spec;
  std::vector<CellResult> cells;  // ordered by (k_bw, k_latency, replication, mechanism)
};

namespace detail {

inline double ratio(double edge, double cloud) {
  if (cloud == 0.0) return edge == 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity();
  return edge / cloud;
}

inline void summarize_equilibria(CellResult& cell, const UtilityTable& table, const EquilibriumReport& rep,
                                 CoalitionEvaluator& eval) {
  cell.utility_loss = rep.utility_loss;
  cell.optimum_utility = rep.optimum.total_utility;
  cell.equilibrium_at_cap = rep.equilibrium_at_cap;
  cell.equilibria = rep.pure_equilibria;
  cell.mixed = rep.mixed_equilibrium;
  if (!rep.pure_equilibria.empty()) {
    double ratio_sum = 0.0, edge = 0.0, cloud = 0.0, revenue = 0.0;
    for (const auto& s : rep.pure_equilibria) {
      edge += s[0];
      cloud += s[1];
      ratio_sum += ratio(s[0], s[1]);
      revenue += eval.value(s);
    }
    const double n = static_cast<double>(rep.pure_equilibria.size());
    cell.edge_servers = edge / n;
    cell.cloud_servers = cloud / n;
    cell.server_ratio = ratio_sum / n;
    cell.equilibrium_revenue = revenue / n;
  } else if (rep.mixed_equilibrium) {
    const auto& mx = *rep.mixed_equilibrium;
    double edge = 0.0, cloud = 0.0, revenue = 0.0;
    for (std::size_t r = 0; r < mx.row.size(); ++r) edge += r * mx.row[r];
    for (std::size_t c = 0; c < mx.col.size(); ++c) cloud += c * mx.col[c];
    for (std::size_t r = 0; r < mx.row.size(); ++r)
      for (std::size_t c = 0; c < mx.col.size(); ++c)
        if (mx.row[r] > 0.0 && mx.col[c] > 0.0)
          revenue += mx.row[r] * mx.col[c] * eval.value(Signature{static_cast<int>(r), static_cast<int>(c)});
    cell.edge_servers = edge;
    cell.cloud_servers = cloud;
    cell.server_ratio = ratio(edge, cloud);
    cell.equilibrium_revenue = revenue;
  } else {
    throw Error("no equilibrium found");
  }
  (void)table;
}

}  // namespace detail

/// Runs every (k_bw, k_latency, replication) unit; the mechanisms of one unit
/// share the same trace and coalition values. Failures are recorded per cell.
[[nodiscard]] inline SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  struct Unit {
    double k_bw, k_latency;
    int rep;
  };
  std::vector<Unit> units;
  for (double kb : spec.k_bw)
    for (double kl : spec.k_latency)
      for (int r = 0; r < spec.replications; ++r) units.push_back({kb, kl, r});

  const std::size_t per_unit = spec.mechanisms.size();
  SweepResult result;
  result.spec = spec;
  result.cells.resize(units.size() * per_unit);

  parallel_for(units.size(), spec.jobs, [&](std::size_t u) {
    const Unit& unit = units[u];
    std::optional<CoalitionEvaluator> eval;
    std::string setup_error;
    try {
      Scenario sc = sweep_scenario(spec, unit.k_bw, unit.k_latency, unit.rep);
      Signature caps = default_caps(sc);
      for (std::size_t k = 0; k < caps.size(); ++k) caps[k] = std::min(caps[k], spec.cap_limit);
      auto fleet = sc.groups;
      for (std::size_t k = 0; k < fleet.size(); ++k) fleet[k].count = caps[k];
      eval.emplace(sc.tasks, fleet, spec.scheduler, sc.seed);
    } catch (const std::exception& e) {
      setup_error = e.what();
    }
    for (std::size_t mi = 0; mi < per_unit; ++mi) {
      CellResult& cell = result.cells[u * per_unit + mi];
      cell.k_bw = unit.k_bw;
      cell.k_latency = unit.k_latency;
      cell.mechanism = spec.mechanisms[mi];
      cell.replication = unit.rep;
      cell.seed = replication_seed(spec.seed, unit.k_bw, unit.k_latency, unit.rep);
      if (!eval) {
        cell.error = setup_error;
        continue;
      }
      const auto start = std::chrono::steady_clock::now();
      try {
        const UtilityTable table = build_utility_table(*eval, cell.mechanism);
        const EquilibriumReport rep = analyze(table, spec.mixed);
        detail::summarize_equilibria(cell, table, rep, *eval);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  });
  return result;
}

/// Mean and sample standard deviation over successful replications.
struct Aggregate {
  std::size_t count = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double stddev = std::numeric_limits<double>::quiet_NaN();
};

[[nodiscard]] inline Aggregate aggregate(const std::vector<double>& xs) {
  Aggregate a;
  a.count = xs.size();
  if (xs.empty()) return a;
  double sum = 0.0;
  for (double x : xs) sum += x;
  a.mean = sum / static_cast<double>(xs.size());
  if (xs.size() == 1) {
    a.stddev = 0.0;
    return a;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - a.mean) * (x - a.mean);
  a.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return a;
}

enum class Metric { utility_loss, server_ratio };

/// Aggregate of one metric for a (k_bw, k_latency, mechanism) entry.
[[nodiscard]] inline Aggregate entry(const SweepResult& r, Metric metric, double k_bw, double k_latency,
                                     Mechanism mech) {
  std::vector<double> xs;
  for (const auto& c : r.cells) {
    if (!c.ok || c.k_bw != k_bw || c.k_latency != k_latency || c.mechanism != mech) continue;
    if (metric == Metric::utility_loss) {
      if (c.utility_loss) xs.push_back(*c.utility_loss);
    } else {
      xs.push_back(c.server_ratio);
    }
  }
  return aggregate(xs);
}

struct SummaryTable {
  std::string name;  // e.g. utility_loss_klat_1.4.csv
  std::string csv;
};

/// One table per (metric, k_latency): rows k_bw, columns mechanism mean/std.
/// Entries without any successful replication are left blank.
[[nodiscard]] inline std::vector<SummaryTable> summarize(const SweepResult& r) {
  if (r.cells.empty()) throw InvalidArgument("empty sweep result");
  std::vector<SummaryTable> out;
  for (Metric metric : {Metric::utility_loss, Metric::server_ratio}) {
    const std::string stem = metric == Metric::utility_loss ? "utility_loss" : "server_ratio";
    for (double kl : r.spec.k_latency) {
      SummaryTable t;
      t.name = stem + "_klat_" + csv::num(kl) + ".csv";
      t.csv = "k_bw";
      for (Mechanism m : r.spec.mechanisms) {
        const std::string name(to_string(m));
        t.csv += "," + name + "_mean," + name + "_std," + name + "_n";
      }
      t.csv += "\n";
      for (double kb : r.spec.k_bw) {
        t.csv += csv::num(kb);
        for (Mechanism m : r.spec.mechanisms) {
          const Aggregate a = entry(r, metric, kb, kl, m);
          if (a.count == 0)
            t.csv += ",,,0";
          else
            t.csv += "," + csv::num(a.mean) + "," + csv::num(a.stddev) + "," + std::to_string(a.count);
        }
        t.csv += "\n";
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

[[nodiscard]] inline std::string results_csv(const SweepResult& r) {
  std::string s =
      "k_bw,k_latency,mechanism,replication,seed,ok,utility_loss,equilibria,mixed,edge_servers,"
      "cloud_servers,server_ratio,equilibrium_revenue,optimum_utility,equilibrium_at_cap\n";
  for (const auto& c : r.cells) {
    std::string eqs;
    for (const auto& e : c.equilibria) eqs += (eqs.empty() ? "" : ";") + std::to_string(e[0]) + ":" + std::to_string(e[1]);
    s += csv::num(c.k_bw) + "," + csv::num(c.k_latency) + "," + std::string(to_string(c.mechanism)) + "," +
         std::to_string(c.replication) + "," + std::to_string(c.seed) + "," + (c.ok ? "1" : "0") + ",";
    if (!c.ok) {
      s += ",,,,,,,,\n";
      continue;
    }
    s += (c.utility_loss ? csv::num(*c.utility_loss) : "") + "," + eqs + "," + (c.mixed ? "1" : "0") + "," +
         csv::num(c.edge_servers) + "," + csv::num(c.cloud_servers) + "," + csv::num(c.server_ratio) + "," +
         csv::num(c.equilibrium_revenue) + "," + csv::num(c.optimum_utility) + "," +
         (c.equilibrium_at_cap ? "1" : "0") + "\n";
  }
  return s;
}

[[nodiscard]] inline std::string errors_csv(const SweepResult& r) {
  std::string s = "cell,error\n";
  for (const auto& c : r.cells) {
    if (c.ok) continue;
    std::string msg = c.error;
    for (char& ch : msg)
      if (ch == ',' || ch == '\n') ch = ' ';
    s += "\"" + c.id() + "\"," + msg + "\n";
  }
  return s;
}

}  // namespace ecshare

#endif  // ECSHARE_EXPERIMENT_HPP
