#ifndef ECSHARE_GAME_HPP
#define ECSHARE_GAME_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecshare/coalition.hpp"
#include "ecshare/core.hpp"
#include "ecshare/csv.hpp"
#include "ecshare/share.hpp"

namespace ecshare {

/// Two utilities closer than this are treated as equal when taking argmax sets
/// and when testing deviations.
inline constexpr double kUtilityTolerance = 1e-9;

/// Revenue and utility of every provider for every profile 0 <= n <= caps.
class UtilityTable {
 public:
  UtilityTable() = default;
  UtilityTable(Signature caps, std::vector<double> unit_costs)
      : caps_(std::move(caps)), unit_costs_(std::move(unit_costs)), grid_(caps_) {
    if (unit_costs_.size() != caps_.size()) throw InvalidArgument("one unit cost per provider required");
    revenue_.assign(grid_.size() * players(), 0.0);
    utility_.assign(grid_.size() * players(), 0.0);
  }

  [[nodiscard]] std::size_t players() const noexcept { return caps_.size(); }
  [[nodiscard]] const Signature& caps() const noexcept { return caps_; }
  [[nodiscard]] const std::vector<double>& unit_costs() const noexcept { return unit_costs_; }
  [[nodiscard]] const SignatureGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t size() const noexcept { return grid_.size(); }

  [[nodiscard]] double revenue(std::size_t idx, std::size_t p) const { return revenue_[idx * players() + p]; }
  [[nodiscard]] double utility(std::size_t idx, std::size_t p) const { return utility_[idx * players() + p]; }
  [[nodiscard]] double utility(const Signature& s, std::size_t p) const { return utility(grid_.index(s), p); }

  [[nodiscard]] double total_utility(std::size_t idx) const {
    double s = 0.0;
    for (std::size_t p = 0; p < players(); ++p) s += utility(idx, p);
    return s;
  }

  void set_revenue(std::size_t idx, std::size_t p, double v) {
    const Signature s = grid_.at(idx);
    revenue_[idx * players() + p] = v;
    utility_[idx * players() + p] = v - unit_costs_[p] * s[p];
  }

  /// For tables read from a file; keeps the stored utility as is.
  void set_entry(std::size_t idx, std::size_t p, double v, double u) {
    revenue_[idx * players() + p] = v;
    utility_[idx * players() + p] = u;
  }

 private:
  Signature caps_;
  std::vector<double> unit_costs_;
  SignatureGrid grid_{Signature{}};
  std::vector<double> revenue_;
  std::vector<double> utility_;
};

/// Fills a table from `revenue_of(profile) -> per-provider revenue`. Cells are
/// independent and evaluated on up to `jobs` threads; any failure aborts.
template <class RevenueFn>
[[nodiscard]] UtilityTable tabulate(Signature caps, std::vector<double> unit_costs, RevenueFn&& revenue_of,
                                    int jobs = 1) {
  UtilityTable table(std::move(caps), std::move(unit_costs));
  std::vector<std::vector<double>> cells(table.size());
  parallel_for(table.size(), jobs, [&](std::size_t idx) { cells[idx] = revenue_of(table.grid().at(idx)); });
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    if (cells[idx].size() != table.players()) throw InvariantViolation("revenue vector arity mismatch");
    for (std::size_t p = 0; p < table.players(); ++p) table.set_revenue(idx, p, cells[idx][p]);
  }
  return table;
}

namespace detail {
inline void require_one_group_per_provider(std::span<const ServerGroup> groups) {
  for (std::size_t k = 0; k < groups.size(); ++k)
    if (groups[k].provider_id != k)
      throw InvalidArgument("the provider game needs exactly one group per provider, in provider order");
}
}  // namespace detail

/// Per-provider revenue at one profile under `mechanism`, using the evaluator's
/// memoized coalition values (common random numbers across profiles).
[[nodiscard]] inline std::vector<double> provider_revenue(CoalitionEvaluator& eval, Mechanism mechanism,
                                                          const Signature& profile) {
  const auto groups = eval.sub_fleet(profile);
  switch (mechanism) {
    case Mechanism::shapley: return shapley_grouped(eval, groups).per_group();
    case Mechanism::ortmann: return ortmann(eval, groups).per_group();
    case Mechanism::direct: return eval.record(profile).per_group;
  }
  throw InvalidArgument("unknown mechanism");
}

/// Utility table over 0 <= n <= fleet counts of the evaluator.
[[nodiscard]] inline UtilityTable build_utility_table(CoalitionEvaluator& eval, Mechanism mechanism,
                                                      int jobs = 1) {
  detail::require_one_group_per_provider(eval.fleet());
  std::vector<double> costs;
  for (const auto& g : eval.fleet()) costs.push_back(g.unit_cost);
  return tabulate(eval.bound(), std::move(costs),
                  [&](const Signature& profile) { return provider_revenue(eval, mechanism, profile); }, jobs);
}

/// cap_k = ceil(sum of task values / unit_cost_k), at least 1.
[[nodiscard]] inline Signature default_caps(const Scenario& scenario) {
  const double bound = total_value(scenario.tasks);
  std::vector<int> caps;
  for (const auto& g : scenario.groups) {
    if (!(g.unit_cost > 0.0))
      throw InvalidArgument("group '" + g.name + "': unit cost must be > 0 for a bounded game");
    caps.push_back(std::max(1, static_cast<int>(std::ceil(bound / g.unit_cost))));
  }
  return Signature(std::move(caps));
}

struct TableOptions {
  SchedulerKind scheduler = SchedulerKind::greedy;
  ExactOptions exact{};
  int jobs = 1;
};

[[nodiscard]] inline UtilityTable build_utility_table(const Scenario& scenario, Mechanism mechanism,
                                                      std::optional<Signature> caps = std::nullopt,
                                                      const TableOptions& opt = {}) {
  const Signature bound = caps ? *caps : default_caps(scenario);
  if (bound.size() != scenario.groups.size()) throw InvalidArgument("one cap per provider required");
  auto fleet = scenario.groups;
  for (std::size_t k = 0; k < fleet.size(); ++k) fleet[k].count = bound[k];
  CoalitionEvaluator eval(scenario.tasks, std::move(fleet), opt.scheduler, scenario.seed, opt.exact);
  return build_utility_table(eval, mechanism, opt.jobs);
}

/// Argmax set of provider p's utility with the other coordinates of `others` fixed.
[[nodiscard]] inline std::vector<int> best_response(const UtilityTable& table, std::size_t provider,
                                                    const Signature& others) {
  if (provider >= table.players()) throw InvalidArgument("provider out of range");
  Signature s = others;
  if (s.size() != table.players()) throw InvalidArgument("profile arity mismatch");
  s[provider] = 0;
  if (!s.within(table.caps())) throw InvalidArgument("profile outside the table");
  double best = -std::numeric_limits<double>::infinity();
  for (int n = 0; n <= table.caps()[provider]; ++n) {
    s[provider] = n;
    best = std::max(best, table.utility(s, provider));
  }
  std::vector<int> out;
  for (int n = 0; n <= table.caps()[provider]; ++n) {
    s[provider] = n;
    if (table.utility(s, provider) >= best - kUtilityTolerance) out.push_back(n);
  }
  return out;
}

/// Every profile where each provider plays a best response.
[[nodiscard]] inline std::vector<Signature> pure_equilibria(const UtilityTable& table) {
  std::vector<Signature> out;
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    const Signature s = table.grid().at(idx);
    bool stable = true;
    for (std::size_t p = 0; p < table.players() && stable; ++p) {
      const auto br = best_response(table, p, s);
      stable = std::binary_search(br.begin(), br.end(), s[p]);
    }
    if (stable) out.push_back(s);
  }
  return out;
}

struct MixedEquilibrium {
  std::vector<double> row;  // provider 0 distribution over 0..cap_0
  std::vector<double> col;  // provider 1 distribution over 0..cap_1
  double row_payoff = 0.0;
  double col_payoff = 0.0;
  bool pure = false;
};

struct MixedOptions {
  int grid_limit = 25;
  std::uint64_t support_budget = 5'000'000;
};

namespace detail {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Solves for a distribution over `mix` (columns of `payoff` restricted to
// `against` rows) making every row in `against` indifferent. Returns the
// distribution and common payoff, or nullopt.
inline std::optional<std::pair<Vector, double>> indifference(const Matrix& payoff,
                                                             const std::vector<int>& against,
                                                             const std::vector<int>& mix) {
  const auto k1 = static_cast<Eigen::Index>(against.size());
  const auto k2 = static_cast<Eigen::Index>(mix.size());
  Matrix m = Matrix::Zero(k1 + 1, k2 + 1);
  Vector rhs = Vector::Zero(k1 + 1);
  double scale = 1.0;
  for (Eigen::Index r = 0; r < k1; ++r) {
    for (Eigen::Index c = 0; c < k2; ++c) {
      m(r, c) = payoff(against[r], mix[c]);
      scale = std::max(scale, std::abs(m(r, c)));
    }
    m(r, k2) = -1.0;
  }
  for (Eigen::Index c = 0; c < k2; ++c) m(k1, c) = 1.0;
  rhs(k1) = 1.0;
  Vector sol = m.completeOrthogonalDecomposition().solve(rhs);
  if (!sol.allFinite()) return std::nullopt;
  if ((m * sol - rhs).cwiseAbs().maxCoeff() > 1e-9 * scale) return std::nullopt;
  Vector prob = sol.head(k2);
  for (Eigen::Index c = 0; c < k2; ++c) {
    if (prob(c) < -1e-12) return std::nullopt;
    prob(c) = std::max(prob(c), 0.0);
  }
  const double sum = prob.sum();
  if (!(sum > 0.0)) return std::nullopt;
  prob /= sum;
  return std::make_pair(prob, sol(k2));
}

template <class Fn>
bool for_each_combination(int n, int k, Fn&& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    if (fn(idx)) return true;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// One Nash equilibrium of the bimatrix game (A for rows, B for columns).
/// Pure equilibria are returned first as degenerate mixtures; otherwise
/// strictly dominated strategies are removed and support pairs are tried in
/// increasing size, each indifference system solved in least squares and
/// accepted only if no pure deviation gains more than the tolerance.
[[nodiscard]] inline MixedEquilibrium bimatrix_equilibrium(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                           std::uint64_t support_budget = 5'000'000) {
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  if (rows == 0 || cols == 0 || b.rows() != rows || b.cols() != cols)
    throw InvalidArgument("bimatrix payoffs must be non-empty and of equal shape");

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (a.col(c).maxCoeff() <= a(r, c) + kUtilityTolerance &&
          b.row(r).maxCoeff() <= b(r, c) + kUtilityTolerance) {
        MixedEquilibrium eq;
        eq.row.assign(rows, 0.0);
        eq.col.assign(cols, 0.0);
        eq.row[r] = 1.0;
        eq.col[c] = 1.0;
        eq.row_payoff = a(r, c);
        eq.col_payoff = b(r, c);
        eq.pure = true;
        return eq;
      }
    }
  }

  std::vector<bool> row_alive(rows, true), col_alive(cols, true);
  for (bool changed = true; changed;) {
    changed = false;
    for (int r = 0; r < rows; ++r) {
      if (!row_alive[r]) continue;
      for (int q = 0; q < rows && row_alive[r]; ++q) {
        if (q == r || !row_alive[q]) continue;
        bool dominates = true;
        for (int c = 0; c < cols && dominates; ++c)
          if (col_alive[c] && !(a(q, c) > a(r, c) + kUtilityTolerance)) dominates = false;
        if (dominates) row_alive[r] = false, changed = true;
      }
    }
    for (int c = 0; c < cols; ++c) {
      if (!col_alive[c]) continue;
      for (int q = 0; q < cols && col_alive[c]; ++q) {
        if (q == c || !col_alive[q]) continue;
        bool dominates = true;
        for (int r = 0; r < rows && dominates; ++r)
          if (row_alive[r] && !(b(r, q) > b(r, c) + kUtilityTolerance)) dominates = false;
        if (dominates) col_alive[c] = false, changed = true;
      }
    }
  }
  std::vector<int> live_rows, live_cols;
  for (int r = 0; r < rows; ++r)
    if (row_alive[r]) live_rows.push_back(r);
  for (int c = 0; c < cols; ++c)
    if (col_alive[c]) live_cols.push_back(c);
  const int nr = static_cast<int>(live_rows.size());
  const int nc = static_cast<int>(live_cols.size());
  const Eigen::MatrixXd bt = b.transpose();

  std::uint64_t tried = 0;
  std::optional<MixedEquilibrium> found;
  auto try_pair = [&](const std::vector<int>& ri, const std::vector<int>& ci) {
    if (++tried > support_budget) return true;
    std::vector<int> rset, cset;
    for (int i : ri) rset.push_back(live_rows[i]);
    for (int j : ci) cset.push_back(live_cols[j]);
    auto y = detail::indifference(a, rset, cset);
    if (!y) return false;
    auto x = detail::indifference(bt, cset, rset);
    if (!x) return false;
    Eigen::VectorXd col_mix = Eigen::VectorXd::Zero(cols);
    Eigen::VectorXd row_mix = Eigen::VectorXd::Zero(rows);
    for (std::size_t j = 0; j < cset.size(); ++j) col_mix(cset[j]) = y->first(j);
    for (std::size_t i = 0; i < rset.size(); ++i) row_mix(rset[i]) = x->first(i);
    const Eigen::VectorXd row_values = a * col_mix;
    const Eigen::VectorXd col_values = b.transpose() * row_mix;
    const double u = row_mix.dot(row_values);
    const double w = col_mix.dot(col_values);
    if (row_values.maxCoeff() > u + kUtilityTolerance || col_values.maxCoeff() > w + kUtilityTolerance)
      return false;
    MixedEquilibrium eq;
    eq.row.assign(row_mix.data(), row_mix.data() + rows);
    eq.col.assign(col_mix.data(), col_mix.data() + cols);
    eq.row_payoff = u;
    eq.col_payoff = w;
    found = eq;
    return true;
  };

  const int largest = std::max(nr, nc);
  for (int d = 1; d <= largest && !found && tried <= support_budget; ++d) {
    // support size pairs with max(k1, k2) == d, by total size then k1
    std::vector<std::pair<int, int>> sizes;
    for (int k1 = 1; k1 <= std::min(d, nr); ++k1)
      for (int k2 = 1; k2 <= std::min(d, nc); ++k2)
        if (std::max(k1, k2) == d) sizes.emplace_back(k1, k2);
    std::stable_sort(sizes.begin(), sizes.end(), [](auto x, auto y) {
      return std::pair(x.first + x.second, x.first) < std::pair(y.first + y.second, y.first);
    });
    for (auto [k1, k2] : sizes) {
      const bool stop = detail::for_each_combination(nr, k1, [&](const std::vector<int>& ri) {
        return detail::for_each_combination(nc, k2, [&](const std::vector<int>& ci) { return try_pair(ri, ci); });
      });
      if (stop) break;
    }
  }
  if (found) return *found;
  if (tried > support_budget)
    throw BudgetExceeded("support enumeration budget of " + std::to_string(support_budget) +
                         " support pairs exhausted without an equilibrium");
  throw Error("no equilibrium found within numerical tolerance");
}

/// Mixed equilibrium of a two-provider table.
[[nodiscard]] inline MixedEquilibrium mixed_equilibrium_2p(const UtilityTable& table, const MixedOptions& opt = {}) {
  if (table.players() != 2) throw InvalidArgument("mixed equilibria are computed for two providers only");
  const int rows = table.caps()[0] + 1;
  const int cols = table.caps()[1] + 1;
  if (rows > opt.grid_limit || cols > opt.grid_limit)
    throw BudgetExceeded("strategy grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " exceeds the mixed-equilibrium limit of " + std::to_string(opt.grid_limit));
  Eigen::MatrixXd a(rows, cols), b(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const Signature s{r, c};
      a(r, c) = table.utility(s, 0);
      b(r, c) = table.utility(s, 1);
    }
  return bimatrix_equilibrium(a, b, opt.support_budget);
}

struct SocialOptimum {
  Signature profile;
  double total_utility = 0.0;
};

/// Grid maximum of the summed utility; the first maximizer in grid order.
[[nodiscard]] inline SocialOptimum social_optimum(const UtilityTable& table) {
  SocialOptimum best{table.grid().at(0), table.total_utility(0)};
  for (std::size_t idx = 1; idx < table.size(); ++idx) {
    const double t = table.total_utility(idx);
    if (t > best.total_utility) best = {table.grid().at(idx), t};
  }
  return best;
}

struct EquilibriumSet {
  std::vector<Signature> pure;
  std::optional<MixedEquilibrium> mixed;
};

/// Average total utility over the pure equilibria, or the mixed equilibrium's
/// expected total when there is no pure one.
[[nodiscard]] inline double equilibrium_total_utility(const UtilityTable& table, const EquilibriumSet& eq) {
  if (!eq.pure.empty()) {
    double sum = 0.0;
    for (const auto& s : eq.pure) sum += table.total_utility(table.grid().index(s));
    return sum / static_cast<double>(eq.pure.size());
  }
  if (eq.mixed) return eq.mixed->row_payoff + eq.mixed->col_payoff;
  throw InvalidArgument("no equilibrium to evaluate");
}

/// (max total utility - equilibrium total utility) / max total utility, or
/// nullopt when the optimum is not positive.
[[nodiscard]] inline std::optional<double> utility_loss(const UtilityTable& table, const EquilibriumSet& eq) {
  const double opt = social_optimum(table).total_utility;
  if (!(opt > 0.0)) return std::nullopt;
  return (opt - equilibrium_total_utility(table, eq)) / opt;
}

[[nodiscard]] inline std::optional<double> utility_loss(double optimum, std::span<const double> equilibrium_totals) {
  if (!(optimum > 0.0) || equilibrium_totals.empty()) return std::nullopt;
  double sum = 0.0;
  for (double t : equilibrium_totals) sum += t;
  return (optimum - sum / static_cast<double>(equilibrium_totals.size())) / optimum;
}

struct CapFlag {
  std::size_t provider;
  Signature others;  // provider's own coordinate is 0
};

struct EquilibriumReport {
  std::vector<Signature> pure_equilibria;
  std::optional<MixedEquilibrium> mixed_equilibrium;
  std::string mixed_note;
  SocialOptimum optimum;
  std::optional<double> equilibrium_total_utility;
  std::optional<double> utility_loss;
  std::vector<CapFlag> best_response_at_cap;
  bool equilibrium_at_cap = false;

  [[nodiscard]] EquilibriumSet equilibria() const { return {pure_equilibria, mixed_equilibrium}; }
};

/// Pure equilibria, a mixed one when needed (two providers only), optimum and loss.
[[nodiscard]] inline EquilibriumReport analyze(const UtilityTable& table, const MixedOptions& opt = {}) {
  EquilibriumReport rep;
  rep.pure_equilibria = pure_equilibria(table);
  if (rep.pure_equilibria.empty()) {
    if (table.players() == 2) {
      rep.mixed_equilibrium = mixed_equilibrium_2p(table, opt);
      rep.mixed_note = "first equilibrium found by support enumeration; others may exist";
    } else {
      rep.mixed_note = "no pure equilibrium; mixed equilibria are only computed for two providers";
    }
  }
  rep.optimum = social_optimum(table);
  const auto set = rep.equilibria();
  if (!set.pure.empty() || set.mixed) {
    rep.equilibrium_total_utility = equilibrium_total_utility(table, set);
    rep.utility_loss = utility_loss(table, set);
  }
  for (std::size_t p = 0; p < table.players(); ++p) {
    Signature bound = table.caps();
    bound[p] = 0;
    SignatureGrid others(bound);
    for (std::size_t i = 0; i < others.size(); ++i) {
      const Signature o = others.at(i);
      const auto br = best_response(table, p, o);
      if (!br.empty() && br.back() == table.caps()[p]) rep.best_response_at_cap.push_back({p, o});
    }
  }
  for (const auto& s : rep.pure_equilibria)
    for (std::size_t p = 0; p < table.players(); ++p)
      if (s[p] == table.caps()[p]) rep.equilibrium_at_cap = true;
  return rep;
}

/// `n_1,...,n_m,v_1,...,v_m,u_1,...,u_m`
[[nodiscard]] inline std::string utility_table_csv(const UtilityTable& table) {
  const std::size_t m = table.players();
  std::string out;
  for (const char* prefix : {"n_", "v_", "u_"})
    for (std::size_t p = 0; p < m; ++p) {
      if (!out.empty()) out += ",";
      out += prefix + std::to_string(p + 1);
    }
  out += "\n";
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    const Signature s = table.grid().at(idx);
    std::string row;
    for (std::size_t p = 0; p < m; ++p) row += std::to_string(s[p]) + ",";
    for (std::size_t p = 0; p < m; ++p) row += csv::num(table.revenue(idx, p)) + ",";
    for (std::size_t p = 0; p < m; ++p) row += csv::num(table.utility(idx, p)) + (p + 1 < m ? "," : "\n");
    out += row;
  }
  return out;
}

/// Reads a utility-table CSV; every profile of the implied grid must appear once.
[[nodiscard]] inline UtilityTable read_utility_table(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw InvalidArgument(path + ": empty utility table");
  const auto header = csv::split(lines.front().text);
  if (header.size() % 3 != 0 || header.empty())
    throw InvalidArgument(path + ": header must be n_1..n_m,v_1..v_m,u_1..u_m");
  const std::size_t m = header.size() / 3;
  struct Row {
    std::vector<int> n;
    std::vector<double> v, u;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::vector<int> caps(m, 0);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = csv::split(lines[i].text);
    auto fail = [&](const std::string& why) {
      throw InvalidArgument(path + ":" + std::to_string(lines[i].number) + ": " + why);
    };
    if (cells.size() != 3 * m) fail("wrong field count");
    Row r{{}, {}, {}, lines[i].number};
    for (std::size_t p = 0; p < m; ++p) {
      auto n = csv::parse_int(cells[p]);
      auto v = csv::parse_double(cells[m + p]);
      auto u = csv::parse_double(cells[2 * m + p]);
      if (!n || *n < 0 || !v || !u) fail("malformed entry");
      r.n.push_back(static_cast<int>(*n));
      r.v.push_back(*v);
      r.u.push_back(*u);
      caps[p] = std::max(caps[p], static_cast<int>(*n));
    }
    rows.push_back(std::move(r));
  }
  // Unit cost recovered from any row with n_p > 0; purely informational.
  std::vector<double> costs(m, 0.0);
  for (const auto& r : rows)
    for (std::size_t p = 0; p < m; ++p)
      if (r.n[p] > 0) costs[p] = (r.v[p] - r.u[p]) / r.n[p];
  UtilityTable table(Signature(caps), costs);
  std::vector<bool> seen(table.size(), false);
  for (const auto& r : rows) {
    const std::size_t idx = table.grid().index(Signature(r.n));
    if (seen[idx]) throw InvalidArgument(path + ":" + std::to_string(r.line) + ": duplicate profile");
    seen[idx] = true;
    for (std::size_t p = 0; p < m; ++p) table.set_entry(idx, p, r.v[p], r.u[p]);
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw InvalidArgument(path + ": table does not cover every profile of its grid");
  return table;
}

/// `provider,others,best_responses` with profile coordinates and responses joined by ';'.
[[nodiscard]] inline std::string best_response_csv(const UtilityTable& table) {
  std::string out = "provider,others,best_responses\n";
  for (std::size_t p = 0; p < table.players(); ++p) {
    Signature bound = table.caps();
    bound[p] = 0;
    SignatureGrid others(bound);
    for (std::size_t i = 0; i < others.size(); ++i) {
      const Signature o = others.at(i);
      std::string key;
      for (std::size_t q = 0; q < table.players(); ++q) {
        if (q == p) continue;
        if (!key.empty()) key += ";";
        key += std::to_string(o[q]);
      }
      std::string br;
      for (int n : best_response(table, p, o)) br += (br.empty() ? "" : ";") + std::to_string(n);
      out += std::to_string(p + 1) + "," + key + "," + br + "\n";
    }
  }
  return out;
}

}  // namespace ecshare

#endif  // ECSHARE_GAME_HPP
