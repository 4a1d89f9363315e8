#ifndef ECSHARE_CONFIG_HPP
#define ECSHARE_CONFIG_HPP

// JSON documents for the CLI: run configs, sweep specs and manifests.
// Unknown keys are rejected so that typos fail loudly.

#include <json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ecshare/coalition.hpp"
#include "ecshare/core.hpp"
#include "ecshare/experiment.hpp"
#include "ecshare/game.hpp"
#include "ecshare/rng.hpp"
#include "ecshare/share.hpp"
#include "ecshare/workload.hpp"

#ifndef ECSHARE_VERSION
#define ECSHARE_VERSION "unknown"
#endif

namespace ecshare::config {

using json = nlohmann::ordered_json;

/// Fleet and task source. Exactly one of `workload` and `trace` is used; when
/// neither is given the default workload is generated.
struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::optional<WorkloadParams> workload;
  std::optional<std::string> trace;
  double latency_factor = 1.4;  // traces without a latency column, or no workload block
  std::vector<ServerGroup> groups = default_groups();

  /// Edge: 3 servers at 24 Mbps, cost 4. Cloud: 2 servers at 6 Mbps, cost 3.
  static std::vector<ServerGroup> default_groups() {
    ServerGroup edge;
    edge.provider_id = 0;
    edge.name = "edge";
    edge.count = 3;
    edge.bandwidth = 24.0;
    edge.unit_cost = 4.0;
    ServerGroup cloud = edge;
    cloud.provider_id = 1;
    cloud.name = "cloud";
    cloud.count = 2;
    cloud.bandwidth = 6.0;
    cloud.unit_cost = 3.0;
    return {edge, cloud};
  }
};

enum class ShapleyImpl { exact, grouped };

[[nodiscard]] inline std::string_view to_string(ShapleyImpl s) { return s == ShapleyImpl::exact ? "exact" : "grouped"; }

[[nodiscard]] inline ShapleyImpl parse_shapley_impl(std::string_view s) {
  if (s == "exact") return ShapleyImpl::exact;
  if (s == "grouped") return ShapleyImpl::grouped;
  throw InvalidArgument("unknown shapley implementation '" + std::string(s) + "' (expected exact|grouped)");
}

/// Everything a schedule/share/game/gen-trace/oracle run depends on.
struct RunConfig {
  ScenarioConfig scenario;
  SchedulerKind scheduler = SchedulerKind::greedy;
  Mechanism mechanism = Mechanism::shapley;
  ShapleyImpl shapley_impl = ShapleyImpl::grouped;
  std::optional<std::string> values;  // signature -> value CSV
  std::optional<std::string> table;   // utility table CSV
  std::optional<std::vector<int>> caps;
  std::optional<std::vector<int>> profile;  // oracle check
  ExactOptions exact;
  MixedOptions mixed;
  bool verify = false;
  int jobs = 1;
};

namespace detail {

// Walks one JSON object, remembering which keys were consumed.
class Object {
 public:
  Object(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw InvalidArgument(where_ + ": expected an object");
  }

  [[nodiscard]] bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw InvalidArgument(where_ + "." + key + ": wrong type");
    }
  }

  [[nodiscard]] const json& at(const std::string& key) const { return j_.at(key); }
  [[nodiscard]] std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw InvalidArgument(where_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

inline Range read_range(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InvalidArgument(where + ": expected [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline ServerGroup read_group(const json& j, const std::string& where, std::size_t provider) {
  Object o(j, where);
  ServerGroup g;
  g.provider_id = provider;
  o.get("provider_id", g.provider_id);
  o.get("name", g.name);
  o.get("count", g.count);
  o.get("bandwidth", g.bandwidth);
  o.get("cpu_scale", g.cpu_scale);
  o.get("propagation_delay", g.propagation_delay);
  o.get("unit_cost", g.unit_cost);
  o.finish();
  validate(g);
  return g;
}

inline json write_group(const ServerGroup& g) {
  return json{{"provider_id", g.provider_id}, {"name", g.name},           {"count", g.count},
              {"bandwidth", g.bandwidth},     {"cpu_scale", g.cpu_scale}, {"propagation_delay", g.propagation_delay},
              {"unit_cost", g.unit_cost}};
}

inline void read_workload(const json& j, const std::string& where, WorkloadParams& w) {
  Object o(j, where);
  o.get("horizon_s", w.horizon_s);
  o.get("rate_per_min", w.rate_per_min);
  if (o.has("size_mb")) w.size_mb = read_range(o.at("size_mb"), o.path("size_mb"));
  if (o.has("value")) w.value = read_range(o.at("value"), o.path("value"));
  o.get("latency_factor", w.latency_factor);
  if (o.has("reference")) {
    Object r(o.at("reference"), o.path("reference"));
    r.get("bandwidth", w.reference.bandwidth);
    r.get("cpu_scale", w.reference.cpu_scale);
    r.get("propagation_delay", w.reference.propagation_delay);
    r.finish();
  }
  o.finish();
}

inline json write_workload(const WorkloadParams& w) {
  return json{{"horizon_s", w.horizon_s},
              {"rate_per_min", w.rate_per_min},
              {"size_mb", {w.size_mb.lo, w.size_mb.hi}},
              {"value", {w.value.lo, w.value.hi}},
              {"latency_factor", w.latency_factor},
              {"reference",
               {{"bandwidth", w.reference.bandwidth},
                {"cpu_scale", w.reference.cpu_scale},
                {"propagation_delay", w.reference.propagation_delay}}}};
}

inline void read_mixed(const json& j, const std::string& where, MixedOptions& m) {
  Object o(j, where);
  o.get("grid_limit", m.grid_limit);
  o.get("support_budget", m.support_budget);
  o.finish();
}

inline json write_mixed(const MixedOptions& m) {
  return json{{"grid_limit", m.grid_limit}, {"support_budget", m.support_budget}};
}

inline std::string read_string(Object& o, const std::string& key, std::string fallback) {
  o.get(key, fallback);
  return fallback;
}

}  // namespace detail

[[nodiscard]] inline json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(in, nullptr, true, true);  // comments allowed
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

[[nodiscard]] inline ScenarioConfig read_scenario(const json& j, const std::string& where = "scenario") {
  detail::Object o(j, where);
  ScenarioConfig sc;
  o.get("seed", sc.seed);
  if (o.has("workload")) {
    WorkloadParams w;
    detail::read_workload(o.at("workload"), o.path("workload"), w);
    sc.workload = w;
  }
  if (o.has("trace")) sc.trace = o.at("trace").get<std::string>();
  if (sc.workload && sc.trace) throw InvalidArgument(where + ": give either 'workload' or 'trace', not both");
  o.get("latency_factor", sc.latency_factor);
  if (o.has("groups")) {
    const json& gs = o.at("groups");
    if (!gs.is_array() || gs.empty()) throw InvalidArgument(o.path("groups") + ": expected a non-empty array");
    sc.groups.clear();
    for (std::size_t k = 0; k < gs.size(); ++k)
      sc.groups.push_back(detail::read_group(gs[k], o.path("groups") + "[" + std::to_string(k) + "]", k));
  }
  o.finish();
  return sc;
}

[[nodiscard]] inline json write_scenario(const ScenarioConfig& sc) {
  json j{{"seed", sc.seed}};
  if (sc.workload) j["workload"] = detail::write_workload(*sc.workload);
  if (sc.trace) j["trace"] = *sc.trace;
  j["latency_factor"] = sc.latency_factor;
  j["groups"] = json::array();
  for (const auto& g : sc.groups) j["groups"].push_back(detail::write_group(g));
  return j;
}

/// Builds the scenario: generates the workload or loads the trace.
/// Trace warnings are appended to `warnings` when given.
[[nodiscard]] inline Scenario materialize(const ScenarioConfig& sc, std::vector<std::string>* warnings = nullptr) {
  Scenario out;
  out.seed = sc.seed;
  out.groups = sc.groups;
  if (sc.trace) {
    TraceOptions opt;
    opt.latency_factor = sc.latency_factor;
    opt.seed = sc.seed;
    auto load = load_trace(*sc.trace, opt);
    if (warnings)
      for (const auto& w : load.warnings)
        warnings->push_back(*sc.trace + ":" + std::to_string(w.line) + ": " + w.message);
    out.tasks = std::move(load.tasks);
    out.latency_factor = sc.latency_factor;
    out.horizon = out.tasks.empty() ? 0.0 : out.tasks.back().arrival_time;
  } else {
    WorkloadParams w;
    if (sc.workload)
      w = *sc.workload;
    else
      w.latency_factor = sc.latency_factor;
    w.seed = sc.seed;
    out.tasks = generate_workload(w);
    out.latency_factor = w.latency_factor;
    out.horizon = w.horizon_s;
  }
  return out;
}

[[nodiscard]] inline RunConfig read_run(const json& j, const std::string& where = "config") {
  detail::Object o(j, where);
  RunConfig rc;
  if (o.has("scenario")) rc.scenario = read_scenario(o.at("scenario"), o.path("scenario"));
  rc.scheduler = parse_scheduler(detail::read_string(o, "scheduler", "greedy"));
  rc.mechanism = parse_mechanism(detail::read_string(o, "mechanism", "shapley"));
  rc.shapley_impl = parse_shapley_impl(detail::read_string(o, "shapley_impl", "grouped"));
  if (o.has("values")) rc.values = o.at("values").get<std::string>();
  if (o.has("table")) rc.table = o.at("table").get<std::string>();
  if (o.has("caps")) {
    std::vector<int> caps;
    o.get("caps", caps);
    rc.caps = caps;
  }
  if (o.has("profile")) {
    std::vector<int> p;
    o.get("profile", p);
    rc.profile = p;
  }
  o.get("node_budget", rc.exact.node_budget);
  if (o.has("mixed")) detail::read_mixed(o.at("mixed"), o.path("mixed"), rc.mixed);
  o.get("verify", rc.verify);
  o.get("jobs", rc.jobs);
  o.finish();
  return rc;
}

[[nodiscard]] inline json write_run(const RunConfig& rc) {
  json j{{"scenario", write_scenario(rc.scenario)},
         {"scheduler", to_string(rc.scheduler)},
         {"mechanism", to_string(rc.mechanism)},
         {"shapley_impl", to_string(rc.shapley_impl)}};
  if (rc.values) j["values"] = *rc.values;
  if (rc.table) j["table"] = *rc.table;
  if (rc.caps) j["caps"] = *rc.caps;
  if (rc.profile) j["profile"] = *rc.profile;
  j["node_budget"] = rc.exact.node_budget;
  j["mixed"] = detail::write_mixed(rc.mixed);
  j["verify"] = rc.verify;
  j["jobs"] = rc.jobs;
  return j;
}

/// Reads a sweep document on top of its preset ("desk" unless given).
[[nodiscard]] inline SweepSpec read_sweep(const json& j, const std::string& where = "sweep") {
  detail::Object o(j, where);
  const std::string preset = detail::read_string(o, "preset", "desk");
  SweepSpec s;
  if (preset == "desk")
    s = SweepSpec::desk();
  else if (preset == "paper")
    s = SweepSpec::paper();
  else
    throw InvalidArgument(where + ".preset: unknown preset '" + preset + "' (expected desk|paper)");
  o.get("seed", s.seed);
  if (o.has("workload")) detail::read_workload(o.at("workload"), o.path("workload"), s.workload);
  o.get("edge_bandwidth", s.edge_bandwidth);
  o.get("edge_cost", s.edge_cost);
  o.get("cloud_cost", s.cloud_cost);
  o.get("cpu_scale", s.cpu_scale);
  o.get("propagation_delay", s.propagation_delay);
  o.get("k_bw", s.k_bw);
  o.get("k_latency", s.k_latency);
  if (o.has("mechanisms")) {
    std::vector<std::string> names;
    o.get("mechanisms", names);
    s.mechanisms.clear();
    for (const auto& n : names) s.mechanisms.push_back(parse_mechanism(n));
  }
  o.get("replications", s.replications);
  o.get("cap_limit", s.cap_limit);
  s.scheduler = parse_scheduler(detail::read_string(o, "scheduler", std::string(to_string(s.scheduler))));
  if (o.has("mixed")) detail::read_mixed(o.at("mixed"), o.path("mixed"), s.mixed);
  o.get("jobs", s.jobs);
  o.finish();
  s.validate();
  return s;
}

/// The resolved spec. `jobs` is left out: it never changes results.
[[nodiscard]] inline json write_sweep(const SweepSpec& s) {
  json mechs = json::array();
  for (auto m : s.mechanisms) mechs.push_back(to_string(m));
  return json{{"preset", s.preset},
              {"seed", s.seed},
              {"workload", detail::write_workload(s.workload)},
              {"edge_bandwidth", s.edge_bandwidth},
              {"edge_cost", s.edge_cost},
              {"cloud_cost", s.cloud_cost},
              {"cpu_scale", s.cpu_scale},
              {"propagation_delay", s.propagation_delay},
              {"k_bw", s.k_bw},
              {"k_latency", s.k_latency},
              {"mechanisms", mechs},
              {"replications", s.replications},
              {"cap_limit", s.cap_limit},
              {"scheduler", to_string(s.scheduler)},
              {"mixed", detail::write_mixed(s.mixed)}};
}

/// Common manifest header. `config` is the resolved document that reproduces
/// the run when passed back with --config.
[[nodiscard]] inline json manifest(const std::string& command, json config) {
  return json{{"command", command},
              {"version", ECSHARE_VERSION},
              {"rng", kRngAlgorithm},
              {"config", std::move(config)}};
}

/// A manifest's "config" member, or the document itself.
[[nodiscard]] inline const json& unwrap_manifest(const json& j) {
  if (j.is_object() && j.contains("command") && j.contains("config")) return j.at("config");
  return j;
}

[[nodiscard]] inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace ecshare::config

#endif  // ECSHARE_CONFIG_HPP
