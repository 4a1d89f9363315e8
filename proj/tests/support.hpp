#ifndef ECSHARE_TESTS_SUPPORT_HPP
#define ECSHARE_TESTS_SUPPORT_HPP

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ecshare/core.hpp"
#include "ecshare/rng.hpp"

namespace ecshare::testing {

/// Batch instance: every task arrives at 0. Sizes 1..8 MB, values 1..5,
/// budgets between 0.5x and 3x the reference completion time.
inline std::vector<Task> batch_tasks(RandomStream& rng, std::size_t n) {
  std::vector<Task> tasks(n);
  for (std::size_t i = 0; i < n; ++i) {
    tasks[i].id = i;
    tasks[i].size = rng.uniform(1.0, 8.0);
    tasks[i].value = static_cast<double>(1 + rng.below(5));
    const double ref = task_delay(tasks[i].size, reference_server());
    tasks[i].latency_budget = ref * rng.uniform(0.5, 3.0);
  }
  return tasks;
}

/// Groups with random counts summing to at most `max_servers` (at least one server).
inline std::vector<ServerGroup> random_groups(RandomStream& rng, std::size_t groups, int max_servers) {
  std::vector<ServerGroup> out(groups);
  int total = 0;
  for (std::size_t k = 0; k < groups; ++k) {
    out[k].provider_id = k;
    out[k].name = "g" + std::to_string(k);
    out[k].bandwidth = 24.0 / static_cast<double>(1 + rng.below(4));
    out[k].cpu_scale = rng.uniform(0.6, 1.4);
    out[k].unit_cost = 3.0 + static_cast<double>(k);
  }
  const int budget = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_servers)));
  for (int s = 0; s < budget; ++s) {
    const auto k = rng.below(groups);
    ++out[k].count;
    ++total;
  }
  return out;
}

inline ServerGroup group(std::size_t provider, int count, double bandwidth = 24.0, double cost = 1.0) {
  ServerGroup g;
  g.provider_id = provider;
  g.name = "g" + std::to_string(provider);
  g.count = count;
  g.bandwidth = bandwidth;
  g.unit_cost = cost;
  return g;
}

/// A fresh, empty directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ecshare-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }
  [[nodiscard]] std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(file(name)) << content;
    return file(name);
  }
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliResult {
  int code;
  std::string out, err;
};

inline CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ecshare");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace ecshare::testing

#endif  // ECSHARE_TESTS_SUPPORT_HPP
