#ifndef ECSHARE_SHARE_HPP
#define ECSHARE_SHARE_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ecshare/core.hpp"
#include "ecshare/csv.hpp"
#include "ecshare/schedule.hpp"

namespace ecshare {

enum class Mechanism { shapley, ortmann, direct };

[[nodiscard]] inline std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::shapley: return "shapley";
    case Mechanism::ortmann: return "ortmann";
    case Mechanism::direct: return "direct";
  }
  return "?";
}

[[nodiscard]] inline Mechanism parse_mechanism(std::string_view s) {
  if (s == "shapley") return Mechanism::shapley;
  if (s == "ortmann") return Mechanism::ortmann;
  if (s == "direct") return Mechanism::direct;
  throw InvalidArgument("unknown mechanism '" + std::string(s) + "' (expected shapley|ortmann|direct)");
}

/// Split of the fleet's revenue. Shares may be negative under Shapley.
struct RevenueAllocation {
  Mechanism mechanism = Mechanism::shapley;
  std::vector<std::vector<double>> per_server_share;  // [group][server]
  std::vector<double> per_provider_revenue;           // indexed by provider id

  [[nodiscard]] double total() const {
    double s = 0.0;
    for (const auto& g : per_server_share)
      for (double x : g) s += x;
    return s;
  }

  [[nodiscard]] std::vector<double> per_group() const {
    std::vector<double> out;
    for (const auto& g : per_server_share) {
      double s = 0.0;
      for (double x : g) s += x;
      out.push_back(s);
    }
    return out;
  }
};

/// A coalition value function over signatures of `groups`.
using ValueOracle = std::function<double(const Signature&)>;

namespace detail {

inline RevenueAllocation allocation_from_group_shares(Mechanism mech,
                                                      std::span<const ServerGroup> groups,
                                                      const std::vector<double>& per_server) {
  RevenueAllocation a;
  a.mechanism = mech;
  std::size_t providers = 0;
  for (const auto& g : groups) providers = std::max(providers, g.provider_id + 1);
  a.per_provider_revenue.assign(providers, 0.0);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    a.per_server_share.emplace_back(static_cast<std::size_t>(groups[k].count), per_server[k]);
    a.per_provider_revenue[groups[k].provider_id] += groups[k].count * per_server[k];
  }
  return a;
}

/// ln(k!) for k <= n, by summation (lgamma writes a global on glibc).
inline std::vector<double> log_factorials(int n) {
  std::vector<double> lf(static_cast<std::size_t>(std::max(n, 0)) + 1, 0.0);
  for (int k = 2; k <= n; ++k) lf[k] = lf[k - 1] + std::log(static_cast<double>(k));
  return lf;
}

/// Binomial coefficients: exact (Pascal's triangle in 64-bit) up to n = 60,
/// log-factorial based beyond.
class Binomials {
 public:
  static constexpr int kExactRows = 60;

  explicit Binomials(int n) : n_(n), lf_(log_factorials(n)) {
    const int rows = std::min(n, kExactRows);
    pascal_.resize(static_cast<std::size_t>(rows) + 1);
    for (int r = 0; r <= rows; ++r) {
      pascal_[r].assign(static_cast<std::size_t>(r) + 1, 1);
      for (int k = 1; k < r; ++k) pascal_[r][k] = pascal_[r - 1][k - 1] + pascal_[r - 1][k];
    }
  }

  [[nodiscard]] double operator()(int top, int k) const {
    if (top <= kExactRows) return static_cast<double>(pascal_[top][k]);
    return std::exp(lf_[top] - lf_[k] - lf_[top - k]);
  }

  [[nodiscard]] double log(int top, int k) const { return lf_[top] - lf_[k] - lf_[top - k]; }

  /// |S|! (n-|S|-1)! / n! = 1 / (n * C(n-1, |S|)), times the multiplicity `coeff` (given as a log).
  [[nodiscard]] double shapley_weight(int size, double coeff, double log_coeff) const {
    if (n_ <= kExactRows && coeff < 0x1.0p53) return coeff / (n_ * (*this)(n_ - 1, size));
    return std::exp(lf_[size] + lf_[n_ - size - 1] - lf_[n_] + log_coeff);
  }

 private:
  int n_;
  std::vector<double> lf_;
  std::vector<std::vector<std::uint64_t>> pascal_;
};

template <class Oracle>
double value_or_zero(Oracle& v, const Signature& s) {
  return s.empty_coalition() ? 0.0 : static_cast<double>(v(s));
}

}  // namespace detail

inline constexpr int kShapleyBruteForceLimit = 10;

/// Shapley value by enumerating every subset of the other servers.
template <class Oracle>
[[nodiscard]] RevenueAllocation shapley_exact(Oracle&& value, std::span<const ServerGroup> groups,
                                              int limit = kShapleyBruteForceLimit) {
  const int n = total_servers(groups);
  if (n > limit)
    throw BudgetExceeded("exact Shapley refuses " + std::to_string(n) + " servers (limit " +
                         std::to_string(limit) + "); use the grouped implementation");
  if (n > 30) throw BudgetExceeded("exact Shapley cannot enumerate more than 30 servers");

  std::vector<std::size_t> group_of;
  for (std::size_t k = 0; k < groups.size(); ++k)
    for (int j = 0; j < groups[k].count; ++j) group_of.push_back(k);

  const std::uint32_t subsets = n == 0 ? 1u : (1u << n);
  std::vector<double> v(subsets, 0.0);
  Signature sig = Signature::zeros(groups.size());
  for (std::uint32_t mask = 1; mask < subsets; ++mask) {
    for (std::size_t k = 0; k < groups.size(); ++k) sig[k] = 0;
    for (int s = 0; s < n; ++s)
      if (mask & (1u << s)) ++sig[group_of[s]];
    v[mask] = value(sig);
  }

  const detail::Binomials binom(n);
  std::vector<std::vector<double>> shares(groups.size());
  for (std::size_t k = 0; k < groups.size(); ++k) shares[k].assign(groups[k].count, 0.0);
  for (int i = 0; i < n; ++i) {
    const std::uint32_t bit = 1u << i;
    double phi = 0.0;
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      const int size = std::popcount(mask);
      phi += binom.shapley_weight(size, 1.0, 0.0) * (v[mask | bit] - v[mask]);
    }
    std::size_t k = group_of[i];
    int j = 0;
    for (int e = 0; e < i; ++e)
      if (group_of[e] == k) ++j;
    shares[k][j] = phi;
  }

  RevenueAllocation a;
  a.mechanism = Mechanism::shapley;
  std::size_t providers = 0;
  for (const auto& g : groups) providers = std::max(providers, g.provider_id + 1);
  a.per_provider_revenue.assign(providers, 0.0);
  for (std::size_t k = 0; k < groups.size(); ++k)
    for (double x : shares[k]) a.per_provider_revenue[groups[k].provider_id] += x;
  a.per_server_share = std::move(shares);
  return a;
}

/// Shapley value exploiting identical servers within a group. For group j the
/// marginal value of one more j-server is summed over every signature of the
/// remaining servers, weighted by the number of subsets sharing that signature
/// (a product of binomials) times |S|!(N-|S|-1)!/N!. Evaluates at most
/// prod_k (N_k + 1) - 1 distinct non-empty signatures.
template <class Oracle>
[[nodiscard]] RevenueAllocation shapley_grouped(Oracle&& value, std::span<const ServerGroup> groups) {
  const Signature full = Signature::of(groups);
  const int n = full.total();
  const detail::Binomials binom(n);

  std::vector<double> per_server(groups.size(), 0.0);
  for (std::size_t j = 0; j < groups.size(); ++j) {
    if (full[j] == 0) continue;
    Signature bound = full.with(j, -1);
    SignatureGrid grid(bound);
    double acc = 0.0;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      const Signature s = grid.at(idx);
      const double v1 = detail::value_or_zero(value, s);
      const double v2 = detail::value_or_zero(value, s.with(j, 1));
      double coeff = 1.0;
      double log_coeff = 0.0;
      for (std::size_t k = 0; k < groups.size(); ++k) {
        coeff *= binom(bound[k], s[k]);
        log_coeff += binom.log(bound[k], s[k]);
      }
      acc += binom.shapley_weight(s.total(), coeff, log_coeff) * (v2 - v1);
    }
    per_server[j] = acc;
  }
  return detail::allocation_from_group_shares(Mechanism::shapley, groups, per_server);
}

/// Proportional value through the multiplicative potential
///   P(empty) = 1,  P(S) = v(S) / sum_{i in S} 1 / P(S \ {i}),
/// with share_i = P(N) / P(N \ {i}). The potential only depends on the
/// signature of S.
///
/// Zero values: groups whose single server is worth nothing are excluded and
/// receive 0; zero-valued sub-coalitions inside the recursion are left out of
/// the denominator. When exclusions make the included sub-fleet's value differ
/// from v(N), shares are rescaled so they still sum to v(N).
template <class Oracle>
[[nodiscard]] RevenueAllocation ortmann(Oracle&& value, std::span<const ServerGroup> groups) {
  const Signature full = Signature::of(groups);
  const std::size_t m = groups.size();
  std::vector<double> per_server(m, 0.0);
  if (full.empty_coalition())
    return detail::allocation_from_group_shares(Mechanism::ortmann, groups, per_server);

  Signature included = full;
  bool excluded_any = false;
  for (std::size_t k = 0; k < m; ++k) {
    if (full[k] == 0) continue;
    const double single = value(Signature::zeros(m).with(k, 1));
    if (single < 0.0) throw InvalidArgument("proportional value needs non-negative coalition values");
    if (single == 0.0) {
      included[k] = 0;
      excluded_any = true;
    }
  }

  const double v_full = detail::value_or_zero(value, full);
  if (included.empty_coalition()) {
    if (v_full != 0.0)
      throw InvalidArgument("proportional value undefined: every single server is worth 0 but v(N) = " +
                            csv::num(v_full));
    return detail::allocation_from_group_shares(Mechanism::ortmann, groups, per_server);
  }

  SignatureGrid grid(included);
  std::vector<double> potential(grid.size(), 0.0);
  potential[0] = 1.0;
  double top_denominator = 0.0;
  for (std::size_t idx = 1; idx < grid.size(); ++idx) {
    const Signature s = grid.at(idx);
    const double vs = value(s);
    if (vs < 0.0) throw InvalidArgument("proportional value needs non-negative coalition values");
    double denom = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (s[k] == 0) continue;
      const double p = potential[idx - grid.stride(k)];
      if (p > 0.0) denom += s[k] / p;
    }
    if (idx + 1 == grid.size()) top_denominator = denom;
    if (vs == 0.0) continue;
    potential[idx] = denom > 0.0 ? vs / denom : vs;
  }

  const std::size_t top = grid.size() - 1;
  const double v_included = detail::value_or_zero(value, included);
  if (v_included == 0.0 || top_denominator == 0.0) {
    if (v_full != 0.0)
      throw InvalidArgument("proportional value undefined for this value function");
    return detail::allocation_from_group_shares(Mechanism::ortmann, groups, per_server);
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (included[k] == 0) continue;
    const double p = potential[top - grid.stride(k)];
    per_server[k] = p > 0.0 ? potential[top] / p : 0.0;
  }
  if (excluded_any && v_full != v_included) {
    const double scale = v_full / v_included;
    for (double& x : per_server) x *= scale;
  }
  return detail::allocation_from_group_shares(Mechanism::ortmann, groups, per_server);
}

/// Each server keeps the value of the tasks it completed.
[[nodiscard]] inline RevenueAllocation direct_contribution(const Schedule& schedule,
                                                           std::span<const ServerGroup> groups) {
  if (schedule.per_server_value.size() != groups.size())
    throw InvalidArgument("schedule does not match the fleet");
  RevenueAllocation a;
  a.mechanism = Mechanism::direct;
  std::size_t providers = 0;
  for (const auto& g : groups) providers = std::max(providers, g.provider_id + 1);
  a.per_provider_revenue.assign(providers, 0.0);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (schedule.per_server_value[k].size() != static_cast<std::size_t>(groups[k].count))
      throw InvalidArgument("schedule does not match the fleet");
    a.per_server_share.push_back(schedule.per_server_value[k]);
    for (double x : schedule.per_server_value[k]) a.per_provider_revenue[groups[k].provider_id] += x;
  }
  return a;
}

/// Coalition values given directly as `n_1,...,n_m,value` rows. The fleet is
/// the componentwise maximum of the listed signatures; v(empty) is 0.
struct ValueTable {
  Signature fleet;
  std::unordered_map<Signature, double, SignatureHash> values;

  [[nodiscard]] double operator()(const Signature& s) const {
    if (s.empty_coalition()) return 0.0;
    auto it = values.find(s);
    if (it == values.end()) throw InvalidArgument("no value given for signature " + s.to_string());
    return it->second;
  }

  /// One synthetic group per column; provider k owns group k.
  [[nodiscard]] std::vector<ServerGroup> groups() const {
    std::vector<ServerGroup> out(fleet.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k].provider_id = k;
      out[k].name = "g" + std::to_string(k + 1);
      out[k].count = fleet[k];
    }
    return out;
  }
};

[[nodiscard]] inline ValueTable read_value_table(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw InvalidArgument(path + ": empty value table (missing header)");
  const auto header = csv::split(lines.front().text);
  if (header.size() < 2 || csv::trim(header.back()) != "value")
    throw InvalidArgument(path + ":" + std::to_string(lines.front().number) + ": header must be n_1,...,n_m,value");
  const std::size_t m = header.size() - 1;
  for (std::size_t k = 0; k < m; ++k)
    if (csv::trim(header[k]) != "n_" + std::to_string(k + 1))
      throw InvalidArgument(path + ":" + std::to_string(lines.front().number) + ": header must be n_1,...,n_m,value");

  ValueTable t;
  t.fleet = Signature::zeros(m);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& ln = lines[r];
    auto fail = [&](const std::string& why) {
      throw InvalidArgument(path + ":" + std::to_string(ln.number) + ": " + why);
    };
    const auto cells = csv::split(ln.text);
    if (cells.size() != m + 1) fail("expected " + std::to_string(m + 1) + " fields");
    Signature s = Signature::zeros(m);
    for (std::size_t k = 0; k < m; ++k) {
      const auto n = csv::parse_int(cells[k]);
      if (!n || *n < 0 || *n > 1'000'000) fail("server counts must be non-negative integers");
      s[k] = static_cast<int>(*n);
      t.fleet[k] = std::max(t.fleet[k], s[k]);
    }
    const auto v = csv::parse_double(cells[m]);
    if (!v || !std::isfinite(*v)) fail("malformed value");
    if (s.empty_coalition()) {
      if (*v != 0.0) fail("the empty coalition must have value 0");
      continue;
    }
    if (!t.values.try_emplace(s, *v).second) fail("duplicate signature " + s.to_string());
  }
  if (t.values.empty()) throw InvalidArgument(path + ": no coalition values");
  return t;
}

/// `mechanism,group,server,share`
[[nodiscard]] inline std::string allocation_csv(const RevenueAllocation& a) {
  std::string out = "mechanism,group,server,share\n";
  const auto mech = std::string(to_string(a.mechanism));
  for (std::size_t k = 0; k < a.per_server_share.size(); ++k)
    for (std::size_t j = 0; j < a.per_server_share[k].size(); ++j)
      out += mech + "," + std::to_string(k) + "," + std::to_string(j) + "," +
             csv::num(a.per_server_share[k][j]) + "\n";
  return out;
}

}  // namespace ecshare

#endif  // ECSHARE_SHARE_HPP
