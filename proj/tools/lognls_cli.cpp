#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <lognls/scenario.hpp>

namespace {

using namespace lognls;

const char* status_word(int status) { return status == 0 ? "pass" : status == 1 ? "fail" : "error"; }

// Runs scenarios on up to `jobs` threads; returns the worst exit status.
int run_all(const std::vector<Scenario>& scenarios, unsigned jobs) {
  std::vector<RunReport> reports(scenarios.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < scenarios.size();) {
      reports[i] = run_scenario(scenarios[i]);
      std::lock_guard lock(io);
      std::cout << scenarios[i].name << ": " << status_word(reports[i].exit_status) << " ("
                << scenarios[i].output_dir.string() << ")";
      if (!reports[i].error.empty()) std::cout << ": " << reports[i].error;
      std::cout << '\n';
      for (const auto& c : reports[i].checks)
        if (!c.pass) std::cout << "  failed check " << c.name << ": " << c.value << " > " << c.tolerance << '\n';
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < std::min<std::size_t>(jobs, scenarios.size()); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  int worst = 0;
  for (const auto& r : reports) worst = std::max(worst, r.exit_status);
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logarithmic Schrodinger equation experiments"};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  std::string out_dir = "out";
  unsigned jobs = 1;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "run scenarios from config files");
  run->add_option("configs", configs, "config files")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output base directory");
  run->add_option("--jobs", jobs, "scenarios run concurrently")->check(CLI::PositiveNumber);
  auto* run_seed = run->add_option("--seed", seed, "overrides the seed key of every config");

  auto* verify = app.add_subcommand("verify", "run the estimate and inequality property suites");
  verify->add_option("--out", out_dir, "output base directory");
  verify->add_option("--seed", seed, "seed key");

  auto* list = app.add_subcommand("list-kinds", "list experiment kinds and their keys");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    for (ScenarioKind k : all_kinds()) {
      std::cout << kind_name(k) << '\n';
      for (const auto& p : param_specs(k)) {
        std::cout << "  " << p.key << (p.required ? " (required)" : " = " + format_param(p.fallback)) << ": "
                  << p.doc << '\n';
      }
    }
    return 0;
  }

  std::vector<Scenario> scenarios;
  if (verify->parsed()) {
    scenarios.push_back(verify_scenario(seed, out_dir));
  } else {
    std::set<std::string> dirs;
    for (const auto& path : configs) {
      std::ifstream in(path);
      std::stringstream text;
      text << in.rdbuf();
      try {
        Scenario s = parse_config(text.str(), out_dir);
        if (run_seed->count() > 0) s.seed = seed;
        if (!dirs.insert(s.output_dir.string()).second) {
          std::cerr << path << ": output directory " << s.output_dir.string() << " used by another config\n";
          return 2;
        }
        scenarios.push_back(std::move(s));
      } catch (const ConfigError& e) {
        std::cerr << path << ": " << e.what() << '\n';
        return 2;
      }
    }
  }
  return run_all(scenarios, jobs);
}
