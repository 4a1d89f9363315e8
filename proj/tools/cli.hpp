#ifndef ECSHARE_TOOLS_CLI_HPP
#define ECSHARE_TOOLS_CLI_HPP

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ecshare/coalition.hpp"
#include "ecshare/config.hpp"
#include "ecshare/csv.hpp"
#include "ecshare/exact.hpp"
#include "ecshare/experiment.hpp"
#include "ecshare/game.hpp"
#include "ecshare/greedy.hpp"
#include "ecshare/oracles.hpp"
#include "ecshare/schedule.hpp"
#include "ecshare/share.hpp"
#include "ecshare/workload.hpp"

namespace ecshare::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kBudget = 3, kInternal = 4 };

namespace fs = std::filesystem;
using config::json;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Flags shared by every run-config command. Optional members are unset unless
/// the flag was given, so that they override the config document only then.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> jobs;
  std::string trace;
};

struct RunFlags {
  CommonFlags common;
  std::string scheduler, mechanism, shapley_impl, values, table;
  std::vector<int> caps, profile;
  std::optional<std::uint64_t> node_budget;
  std::optional<int> grid_limit;
  bool verify = false;
  std::string mode;  // oracle
};

inline void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON config, or a manifest.json from an earlier run");
  sub->add_option("--seed", f.seed, "Scenario seed (overrides the config)");
  sub->add_option("--out", f.out, "Output directory; without it the main CSV goes to stdout");
  sub->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

inline config::RunConfig resolve(const RunFlags& f) {
  config::RunConfig rc;
  if (!f.common.config.empty())
    rc = config::read_run(config::unwrap_manifest(config::parse_file(f.common.config)));
  if (f.common.seed) rc.scenario.seed = *f.common.seed;
  if (f.common.jobs) rc.jobs = *f.common.jobs;
  if (!f.common.trace.empty()) {
    rc.scenario.trace = f.common.trace;
    rc.scenario.workload.reset();
  }
  if (!f.scheduler.empty()) rc.scheduler = parse_scheduler(f.scheduler);
  if (!f.mechanism.empty()) rc.mechanism = parse_mechanism(f.mechanism);
  if (!f.shapley_impl.empty()) rc.shapley_impl = config::parse_shapley_impl(f.shapley_impl);
  if (!f.values.empty()) rc.values = f.values;
  if (!f.table.empty()) rc.table = f.table;
  if (!f.caps.empty()) rc.caps = f.caps;
  if (!f.profile.empty()) rc.profile = f.profile;
  if (f.node_budget) rc.exact.node_budget = static_cast<double>(*f.node_budget);
  if (f.grid_limit) rc.mixed.grid_limit = *f.grid_limit;
  if (f.verify) rc.verify = true;
  return rc;
}

class Output {
 public:
  Output(std::string dir, Streams s) : dir_(std::move(dir)), s_(s) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  [[nodiscard]] bool to_dir() const { return !dir_.empty(); }

  /// Writes `name` into the output directory, or the primary output to stdout.
  void file(const std::string& name, const std::string& content, bool primary = false) {
    if (to_dir())
      csv::write_file((fs::path(dir_) / name).string(), content);
    else if (primary)
      s_.out << content;
  }

  /// Summary lines go to stdout when files are written, else to stderr.
  std::ostream& summary() { return to_dir() ? s_.out : s_.err; }

 private:
  std::string dir_;
  Streams s_;
};

inline Scenario load_scenario(const config::RunConfig& rc, Streams s) {
  std::vector<std::string> warnings;
  Scenario sc = config::materialize(rc.scenario, &warnings);
  for (const auto& w : warnings) s.err << "warning: " << w << "\n";
  return sc;
}

inline int cmd_gen_trace(const config::RunConfig& rc, const std::string& out_dir, Streams s) {
  const Scenario sc = load_scenario(rc, s);
  Output out(out_dir, s);
  out.file("trace.csv", trace_csv(sc.tasks), true);
  out.file("manifest.json", config::dump(config::manifest("gen-trace", config::write_run(rc))));
  out.summary() << "tasks=" << sc.tasks.size() << " total_value=" << csv::num(total_value(sc.tasks)) << "\n";
  return kOk;
}

inline int cmd_schedule(const config::RunConfig& rc, const std::string& out_dir, Streams s) {
  const Scenario sc = load_scenario(rc, s);
  const bool exact = rc.scheduler == SchedulerKind::exact;
  ExactStats stats;
  const Schedule sched = exact ? solve_batch_exact(sc.tasks, sc.groups, rc.exact, &stats)
                               : greedy_online(sc.tasks, sc.groups, sc.seed);
  check_schedule(sched, sc.tasks, sc.groups, exact);
  Output out(out_dir, s);
  out.file("schedule.csv", schedule_csv(sched, sc.tasks), true);
  out.file("manifest.json", config::dump(config::manifest("schedule", config::write_run(rc))));
  out.summary() << "scheduler=" << to_string(rc.scheduler) << " tasks=" << sc.tasks.size()
                << " completed=" << sched.completed() << " total_value=" << csv::num(sched.total_value) << "\n";
  return kOk;
}

inline RevenueAllocation allocate(const config::RunConfig& rc, const ValueOracle& v,
                                  std::span<const ServerGroup> groups) {
  switch (rc.mechanism) {
    case Mechanism::shapley:
      return rc.shapley_impl == config::ShapleyImpl::exact ? shapley_exact(v, groups) : shapley_grouped(v, groups);
    case Mechanism::ortmann: return ortmann(v, groups);
    case Mechanism::direct: break;
  }
  throw InvalidArgument("direct sharing needs a schedule; it is not available with --values");
}

inline int cmd_share(const config::RunConfig& rc, const std::string& out_dir, Streams s) {
  RevenueAllocation alloc;
  double total = 0.0;
  if (rc.values) {
    const ValueTable vt = read_value_table(*rc.values);
    const auto groups = vt.groups();
    alloc = allocate(rc, [&](const Signature& sig) { return vt(sig); }, groups);
    total = vt(vt.fleet);
  } else {
    const Scenario sc = load_scenario(rc, s);
    CoalitionEvaluator eval(sc.tasks, sc.groups, rc.scheduler, sc.seed, rc.exact);
    const Signature full = eval.bound();
    total = eval.value(full);
    if (rc.mechanism == Mechanism::direct)
      alloc = direct_contribution(eval.schedule(full), sc.groups);
    else
      alloc = allocate(rc, [&](const Signature& sig) { return eval.value(sig); }, sc.groups);
  }
  Output out(out_dir, s);
  out.file("allocation.csv", allocation_csv(alloc), true);
  out.file("manifest.json", config::dump(config::manifest("share", config::write_run(rc))));

  const double sum = alloc.total();
  const double gap = std::abs(sum - total);
  const bool efficient = gap <= 1e-9 * std::max(1.0, std::abs(total));
  out.summary() << "efficiency: sum_shares=" << csv::num(sum) << " total=" << csv::num(total)
                << " gap=" << csv::num(gap) << (efficient ? " ok" : " FAIL") << "\n";
  for (std::size_t p = 0; p < alloc.per_provider_revenue.size(); ++p)
    out.summary() << "provider " << p + 1 << " revenue=" << csv::num(alloc.per_provider_revenue[p]) << "\n";
  if (!efficient) throw InvariantViolation("shares do not add up to the fleet's revenue");
  return kOk;
}

inline json report_json(const UtilityTable& table, const EquilibriumReport& rep, std::optional<bool> verified) {
  auto sig = [](const Signature& s) { return json(s.counts()); };
  json j;
  j["players"] = table.players();
  j["caps"] = sig(table.caps());
  j["pure_equilibria"] = json::array();
  for (const auto& e : rep.pure_equilibria) j["pure_equilibria"].push_back(sig(e));
  if (rep.mixed_equilibrium) {
    const auto& m = *rep.mixed_equilibrium;
    j["mixed_equilibrium"] = {{"row", m.row}, {"col", m.col}, {"row_payoff", m.row_payoff},
                              {"col_payoff", m.col_payoff}};
  } else {
    j["mixed_equilibrium"] = nullptr;
  }
  if (!rep.mixed_note.empty()) j["note"] = rep.mixed_note;
  j["social_optimum"] = {{"profile", sig(rep.optimum.profile)}, {"total_utility", rep.optimum.total_utility}};
  j["equilibrium_total_utility"] =
      rep.equilibrium_total_utility ? json(*rep.equilibrium_total_utility) : json(nullptr);
  j["utility_loss"] = rep.utility_loss ? json(*rep.utility_loss) : json(nullptr);
  j["equilibrium_at_cap"] = rep.equilibrium_at_cap;
  j["best_responses_at_cap"] = rep.best_response_at_cap.size();
  if (verified) j["verified"] = *verified;
  return j;
}

/// Re-checks every reported equilibrium with the brute-force deviation oracle.
inline bool verify_report(const UtilityTable& table, const EquilibriumReport& rep) {
  oracle::OracleBudget budget;
  budget.max_grid = table.size();
  for (const auto& s : rep.pure_equilibria)
    if (!oracle::equilibrium_check(table, s, kUtilityTolerance, budget)) return false;
  if (rep.mixed_equilibrium) {
    const oracle::Mixture mix{rep.mixed_equilibrium->row, rep.mixed_equilibrium->col};
    if (!oracle::equilibrium_check(table, mix, kUtilityTolerance, budget)) return false;
  }
  return true;
}

inline int cmd_game(const config::RunConfig& rc, const std::string& out_dir, Streams s) {
  UtilityTable table;
  if (rc.table) {
    table = read_utility_table(*rc.table);
  } else {
    const Scenario sc = load_scenario(rc, s);
    std::optional<Signature> caps;
    if (rc.caps) caps = Signature(*rc.caps);
    table = build_utility_table(sc, rc.mechanism, caps, TableOptions{rc.scheduler, rc.exact, rc.jobs});
  }
  const EquilibriumReport rep = analyze(table, rc.mixed);
  std::optional<bool> verified;
  if (rc.verify) verified = verify_report(table, rep);

  Output out(out_dir, s);
  const json report = report_json(table, rep, verified);
  out.file("utility_table.csv", utility_table_csv(table));
  out.file("best_response.csv", best_response_csv(table));
  out.file("report.json", config::dump(report), true);
  out.file("manifest.json", config::dump(config::manifest("game", config::write_run(rc))));

  auto& sum = out.summary();
  sum << "profiles=" << table.size() << " pure_equilibria=" << rep.pure_equilibria.size()
      << " mixed=" << (rep.mixed_equilibrium ? 1 : 0) << " utility_loss="
      << (rep.utility_loss ? csv::num(*rep.utility_loss) : std::string("n/a"));
  if (verified) sum << " verified=" << (*verified ? "yes" : "NO");
  sum << "\n";
  if (!rep.pure_equilibria.empty() || rep.mixed_equilibrium) {
    if (verified && !*verified) throw InvariantViolation("an emitted equilibrium fails the deviation check");
    return kOk;
  }
  s.err << "no equilibrium found: " << rep.mixed_note << "\n";
  return kInternal;
}

struct SweepFlags {
  std::string config, preset, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs, replications;
};

inline SweepSpec resolve_sweep(const SweepFlags& f) {
  SweepSpec spec;
  if (!f.config.empty()) {
    if (!f.preset.empty()) throw InvalidArgument("give either --preset or --config (set \"preset\" inside the config)");
    spec = config::read_sweep(config::unwrap_manifest(config::parse_file(f.config)));
  } else if (f.preset.empty() || f.preset == "desk") {
    spec = SweepSpec::desk();
  } else if (f.preset == "paper") {
    spec = SweepSpec::paper();
  } else {
    throw InvalidArgument("unknown preset '" + f.preset + "' (expected desk|paper)");
  }
  if (f.seed) spec.seed = *f.seed;
  if (f.jobs) spec.jobs = *f.jobs;
  if (f.replications) spec.replications = *f.replications;
  spec.validate();
  return spec;
}

/// Runs a sweep and writes results.csv, errors.csv, the summary tables and
/// manifest.json into `out_dir`. Wall-clock fields live only in the manifest.
inline SweepResult write_sweep(const SweepSpec& spec, const std::string& out_dir, Streams s) {
  const auto start = std::chrono::steady_clock::now();
  SweepResult r = run_sweep(spec);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  csv::write_file((dir / "results.csv").string(), results_csv(r));
  csv::write_file((dir / "errors.csv").string(), errors_csv(r));
  for (const auto& t : summarize(r)) csv::write_file((dir / t.name).string(), t.csv);

  json m = config::manifest("sweep", config::write_sweep(spec));
  m["seed"] = spec.seed;
  json cells = json::array();
  std::size_t failed = 0;
  for (const auto& c : r.cells) {
    cells.push_back({{"cell", c.id()}, {"ok", c.ok}, {"wall_clock_s", c.seconds}});
    if (!c.ok) ++failed;
  }
  m["cells"] = std::move(cells);
  m["wall_clock_s"] = wall;
  csv::write_file((dir / "manifest.json").string(), config::dump(m));

  s.out << "cells=" << r.cells.size() << " ok=" << r.cells.size() - failed << " failed=" << failed
        << " wall_clock_s=" << csv::num(std::round(wall * 10.0) / 10.0) << "\n";
  return r;
}

inline int cmd_oracle(const config::RunConfig& rc, const std::string& mode, Streams s) {
  if (mode == "batch") {
    const Scenario sc = load_scenario(rc, s);
    s.out << "optimum=" << csv::num(oracle::batch_optimum(sc.tasks, sc.groups)) << "\n";
    return kOk;
  }
  if (mode == "shapley") {
    if (!rc.values) throw InvalidArgument("oracle shapley needs --values");
    const ValueTable vt = read_value_table(*rc.values);
    std::vector<std::size_t> labels;
    for (std::size_t k = 0; k < vt.fleet.size(); ++k)
      for (int j = 0; j < vt.fleet[k]; ++j) labels.push_back(k);
    const auto phi = oracle::shapley_rational(
        [&](const std::vector<int>& counts) { return vt(Signature(counts)); }, labels);
    s.out << "group,server,share,exact\n";
    std::vector<int> seen(vt.fleet.size(), 0);
    for (std::size_t i = 0; i < phi.size(); ++i)
      s.out << labels[i] << "," << seen[labels[i]]++ << "," << csv::num(phi[i].get_d()) << "," << phi[i].get_str()
            << "\n";
    return kOk;
  }
  if (mode == "check") {
    if (!rc.table || !rc.profile) throw InvalidArgument("oracle check needs --table and --profile");
    const UtilityTable table = read_utility_table(*rc.table);
    const Signature profile(*rc.profile);
    if (profile.size() != table.players() || !profile.within(table.caps()))
      throw InvalidArgument("profile outside the table");
    oracle::OracleBudget budget;
    budget.max_grid = std::max(budget.max_grid, table.size());
    s.out << "equilibrium=" << (oracle::equilibrium_check(table, profile, kUtilityTolerance, budget) ? "true" : "false")
          << "\n";
    return kOk;
  }
  throw InvalidArgument("oracle mode must be batch|shapley|check");
}

/// Parses argv and runs one subcommand. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  const Streams s{out, err};
  CLI::App app{"Edge/cloud revenue sharing: scheduling, sharing mechanisms and the provider game", "ecshare"};
  app.set_version_flag("--version", std::string(ECSHARE_VERSION));
  app.require_subcommand(1);

  auto add_scenario_source = [](CLI::App* sub, RunFlags& f) {
    add_common(sub, f.common);
    sub->add_option("--trace", f.common.trace, "Task trace CSV (arrival_s,size_mb,value[,latency_s])");
  };
  auto add_scheduler = [](CLI::App* sub, RunFlags& f) {
    sub->add_option("--scheduler", f.scheduler, "greedy|exact")->check(CLI::IsMember({"greedy", "exact"}));
    sub->add_option("--node-budget", f.node_budget, "Node bound limit of the exact solver");
  };

  RunFlags gen, sched, share, game, orc;
  SweepFlags sweep;

  auto* c_gen = app.add_subcommand("gen-trace", "Generate a task trace from the workload parameters");
  add_scenario_source(c_gen, gen);

  auto* c_sched = app.add_subcommand("schedule", "Schedule the tasks on the fleet");
  add_scenario_source(c_sched, sched);
  add_scheduler(c_sched, sched);

  auto* c_share = app.add_subcommand("share", "Split the fleet's revenue between its servers");
  add_scenario_source(c_share, share);
  add_scheduler(c_share, share);
  c_share->add_option("--mechanism", share.mechanism, "shapley|ortmann|direct")
      ->check(CLI::IsMember({"shapley", "ortmann", "direct"}));
  c_share->add_option("--shapley-impl", share.shapley_impl, "exact|grouped")
      ->check(CLI::IsMember({"exact", "grouped"}));
  c_share->add_option("--values", share.values, "Coalition values CSV (n_1,...,n_m,value) instead of a scenario");

  auto* c_game = app.add_subcommand("game", "Tabulate the provider game and find its equilibria");
  add_scenario_source(c_game, game);
  add_scheduler(c_game, game);
  c_game->add_option("--mechanism", game.mechanism, "shapley|ortmann|direct")
      ->check(CLI::IsMember({"shapley", "ortmann", "direct"}));
  c_game->add_option("--table", game.table, "Utility table CSV instead of a scenario");
  c_game->add_option("--caps", game.caps, "Per-provider server caps, comma separated")->delimiter(',');
  c_game->add_option("--grid-limit", game.grid_limit, "Largest strategy count for mixed equilibria");
  c_game->add_flag("--verify", game.verify, "Re-check every equilibrium with the deviation oracle");

  auto* c_sweep = app.add_subcommand("sweep", "Run the bandwidth/latency study");
  c_sweep->add_option("--config", sweep.config, "Sweep JSON, or a manifest.json from an earlier sweep");
  c_sweep->add_option("--preset", sweep.preset, "desk|paper")->check(CLI::IsMember({"desk", "paper"}));
  c_sweep->add_option("--seed", sweep.seed, "Sweep seed");
  c_sweep->add_option("--jobs", sweep.jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_sweep->add_option("--replications", sweep.replications, "Replications per cell")->check(CLI::PositiveNumber);
  c_sweep->add_option("--out", sweep.out, "Output directory")->required();

  auto* c_oracle = app.add_subcommand("oracle", "Brute-force reference checks");
  c_oracle->group("");  // hidden
  add_scenario_source(c_oracle, orc);
  c_oracle->add_option("mode", orc.mode, "batch|shapley|check")->required();
  c_oracle->add_option("--values", orc.values, "Coalition values CSV");
  c_oracle->add_option("--table", orc.table, "Utility table CSV");
  c_oracle->add_option("--profile", orc.profile, "Profile to check, comma separated")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c_gen->parsed()) return cmd_gen_trace(resolve(gen), gen.common.out, s);
    if (c_sched->parsed()) return cmd_schedule(resolve(sched), sched.common.out, s);
    if (c_share->parsed()) return cmd_share(resolve(share), share.common.out, s);
    if (c_game->parsed()) return cmd_game(resolve(game), game.common.out, s);
    if (c_sweep->parsed()) {
      (void)write_sweep(resolve_sweep(sweep), sweep.out, s);
      return kOk;
    }
    if (c_oracle->parsed()) return cmd_oracle(resolve(orc), orc.mode, s);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kBudget;
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace ecshare::cli

#endif  // ECSHARE_TOOLS_CLI_HPP
