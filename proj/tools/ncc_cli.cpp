// Command-line front end: run experiments, parameter sweeps and dataset checks.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ncc/config.hpp"
#include "ncc/dataio.hpp"
#include "ncc/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

// Bad user input that is not a syntax error inside a file.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> horizon;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> threads;
  std::vector<std::string> policies;
  std::string output;
  std::string dataset;
  std::string preset;
};

// Config file first, then flags on top.
ncc::ExperimentConfig resolve(const RunFlags& f) {
  ncc::ExperimentConfig cfg;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw UsageError("cannot open config " + f.config);
    cfg = ncc::parse_config(in);
  } else {
    cfg.policies = ncc::default_policies();
  }
  if (f.seed) cfg.run.seed = *f.seed;
  if (f.horizon) cfg.run.horizon = *f.horizon;
  if (f.runs) cfg.run.runs = *f.runs;
  if (f.threads) cfg.run.threads = *f.threads;
  if (!f.output.empty()) cfg.run.output = f.output;
  if (!f.dataset.empty()) cfg.environment.dataset = f.dataset;
  if (!f.preset.empty()) cfg.environment.preset = f.preset;
  if (!f.policies.empty()) {
    std::vector<ncc::PolicySpec> chosen;
    for (const auto& label : f.policies) {
      auto it = std::find_if(cfg.policies.begin(), cfg.policies.end(), [&](const auto& p) { return p.label == label; });
      chosen.push_back(it != cfg.policies.end() ? *it : ncc::make_policy_spec(label));
    }
    cfg.policies = std::move(chosen);
  }
  return cfg;
}

bool report_issues(const ncc::ExperimentConfig& cfg) {
  const auto issues = ncc::validate_config(cfg);
  for (const auto& i : issues) std::cerr << "error: " << i.field << ": " << i.message << '\n';
  return issues.empty();
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config file");
  cmd->add_option("--seed", f.seed, "Base seed");
  cmd->add_option("--horizon", f.horizon, "Rounds per repetition");
  cmd->add_option("--runs", f.runs, "Repetitions");
  cmd->add_option("--threads", f.threads, "Worker threads (0: all cores)");
  cmd->add_option("--policy", f.policies, "Policy labels, comma separated")->delimiter(',');
  cmd->add_option("--output", f.output, "Output directory");
  cmd->add_option("--dataset", f.dataset, "Nursery data file");
  cmd->add_option("--preset", f.preset, "Environment preset");
}

int cmd_run(const RunFlags& f) {
  const auto cfg = resolve(f);
  if (!report_issues(cfg)) return kInvalid;
  const auto out = ncc::run_experiment(cfg);
  const std::filesystem::path dir = cfg.run.output;
  ncc::write_results(out.result, ncc::manifest_for(cfg, out.result), dir);
  ncc::emit_plot_data(out.result, dir);

  const auto& r = out.result;
  std::printf("%-16s %12s %12s %12s %14s\n", "policy", "reward", "cost", "gain", "regret");
  for (std::size_t p = 0; p < r.policies.size(); ++p) {
    std::printf("%-16s %12.2f %12.2f %12.2f %14.2f\n", r.policies[p].c_str(), r.mean_total_reward(p),
                r.mean_total_cost(p), r.mean_total_gain(p), r.mean_final_regret(p));
  }
  std::printf("results written to %s\n", dir.string().c_str());
  return kOk;
}

int cmd_sweep(const RunFlags& f, const std::string& grid_path) {
  const auto cfg = resolve(f);
  if (!report_issues(cfg)) return kInvalid;
  std::vector<ncc::GridAxis> grid;
  {
    std::ifstream in(grid_path);
    if (!in) {
      std::cerr << "error: cannot open grid " << grid_path << '\n';
      return kInvalid;
    }
    grid = ncc::parse_grid(in);
  }
  for (const auto& axis : grid) {
    for (double v : axis.values) {
      ncc::ExperimentConfig probe = cfg;
      probe.policies = {ncc::make_policy_spec(axis.policy)};
      probe.policies[0].params[axis.param] = v;
      if (!report_issues(probe)) return kInvalid;
    }
  }
  const auto rows = ncc::sweep(cfg, grid, ncc::load_pool(cfg.environment));
  const std::filesystem::path dir = cfg.run.output;
  std::filesystem::create_directories(dir);
  const auto path = dir / "sweep.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  ncc::write_sweep_csv(out, rows);
  ncc::write_sweep_csv(std::cout, rows);
  return kOk;
}

int cmd_parse(const std::string& input, bool check_only) {
  std::ifstream in(input);
  if (!in) {
    std::cerr << "error: cannot open " << input << '\n';
    return kRuntime;
  }
  const auto parsed = ncc::parse_nursery_detailed(in);
  std::cerr << "rows read " << parsed.rows_read << ", retained " << parsed.records.size() << ", dropped "
            << parsed.rows_dropped << '\n';
  if (check_only) return kOk;
  std::cout << "form,children,finance,housing,health,label\n";
  for (const auto& r : parsed.records) {
    for (std::size_t i = 0; i < r.states.size(); ++i) std::cout << r.states[i] << ',';
    std::cout << r.label << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Costly-feature non-stationary contextual bandit experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ncc::version_string());

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run policies against an environment");
  add_run_flags(run, run_flags);

  RunFlags sweep_flags;
  std::string grid_path;
  auto* sweep = app.add_subcommand("sweep", "Grid search over policy parameters");
  add_run_flags(sweep, sweep_flags);
  sweep->add_option("--grid", grid_path, "Grid file")->required();

  std::string input;
  bool check_only = false;
  auto* parse = app.add_subcommand("parse-nursery", "Parse and check a nursery.data file");
  parse->add_option("--input", input, "nursery.data path")->required();
  parse->add_flag("--check", check_only, "Only validate and report counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*sweep) return cmd_sweep(sweep_flags, grid_path);
    if (*parse) return cmd_parse(input, check_only);
  } catch (const ncc::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
