#include "ncc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "ncc/environment.hpp"
#include "ncc/oracle.hpp"

namespace ncc {

RowPool load_pool(const EnvironmentSpec& spec) {
  if (!preset_uses_dataset(spec.preset)) return nullptr;
  auto records = load_nursery_file(spec.dataset);
  const auto split = effective_split(spec);
  if (split == "all") return std::make_shared<const std::vector<NurseryRecord>>(std::move(records));
  auto [train, validation] = split_train_validation(records, spec.split_seed);
  if (split == "train") return std::make_shared<const std::vector<NurseryRecord>>(std::move(train));
  if (split == "validation") return std::make_shared<const std::vector<NurseryRecord>>(std::move(validation));
  throw std::invalid_argument("unknown split '" + split + "'");
}

namespace {

struct Repetition {
  std::vector<RoundRow> rounds;  // policy-major
  std::vector<SummaryRow> summaries;
  std::uint64_t stream_hash = 0;
  std::vector<std::uint64_t> reward_starts;
  std::vector<std::uint64_t> cost_starts;
  std::size_t feature_count = 0;
  std::size_t action_count = 0;
};

double cost_of(ObservationSet obs, const std::vector<double>& costs) {
  double total = 0.0;
  for (auto i : obs.members()) total += costs[i];
  return total;
}

Repetition run_repetition(const ExperimentConfig& cfg, const RowPool& pool, std::size_t run) {
  const std::uint64_t seed = cfg.run.seed;
  const std::uint64_t horizon = cfg.run.horizon;
  auto env_cfg =
      std::make_shared<const EnvironmentConfig>(build_environment(cfg.environment, horizon, pool, seed, run));
  const Environment env(env_cfg, seed, run);
  const auto& space = env_cfg->space;
  auto catalog = std::make_shared<const PartialCatalog>(space);
  auto truth = std::make_shared<const TrueParameters>(env.true_parameters());
  auto oracle = std::make_shared<const OracleTable>(truth, catalog);

  Repetition rep;
  rep.stream_hash = env.stream_hash();
  rep.reward_starts = env_cfg->reward_starts;
  rep.cost_starts = env_cfg->cost_starts;
  rep.feature_count = space.feature_count();
  rep.action_count = env_cfg->action_count;

  // Oracle's realized gain under the shared draws.
  std::vector<double> oracle_realized(static_cast<std::size_t>(horizon));
  std::vector<double> oracle_expected(static_cast<std::size_t>(horizon));
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const auto& draw = env.sample_round(t);
    const auto [decision, rho] = oracle->decide(t);
    const auto psi = make_partial(space.state_at(draw.state_index), decision.observation_set);
    const auto a = decision.action_for(space, psi);
    oracle_realized[t - 1] = env.realize_reward(draw, a) - cost_of(decision.observation_set, draw.costs);
    oracle_expected[t - 1] = rho;
  }

  rep.rounds.reserve(cfg.policies.size() * static_cast<std::size_t>(horizon));
  for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
    auto policy = make_policy(cfg.policies[p], catalog, env_cfg->action_count, horizon, seed, run, oracle);
    const std::size_t first = rep.rounds.size();
    double cumulative = 0.0;
    for (std::uint64_t t = 1; t <= horizon; ++t) {
      const auto& draw = env.sample_round(t);
      const PolicyDecision d = policy->decide(t);
      const auto obs = d.observation_set;
      auto psi = make_partial(space.state_at(draw.state_index), obs);
      const std::size_t a = d.action_for(space, psi);

      RoundRecord rec;
      rec.time = t;
      rec.action = a;
      rec.observation_set = obs;
      rec.reward = env.realize_reward(draw, a);
      for (auto i : obs.members()) rec.paid_costs.push_back({i, draw.costs[i]});
      rec.partial = std::move(psi);

      RoundRow row;
      row.run = run;
      row.t = t;
      row.policy = p;
      row.action = a;
      row.obs_set = obs.mask();
      row.reward = rec.reward;
      row.cost_paid = cost_of(obs, draw.costs);
      row.gain = row.reward - row.cost_paid;
      double regret = oracle_expected[t - 1] - oracle->expected_gain(t, d);
      if (regret < 0.0) {
        if (regret < -1e-9) throw std::logic_error("policy outperformed the oracle in expectation");
        regret = 0.0;
      }
      row.expected_regret = regret;
      row.realized_regret = oracle_realized[t - 1] - row.gain;
      cumulative += regret;
      row.cumulative_expected_regret = cumulative;
      rep.rounds.push_back(row);

      policy->update(rec);
    }
    rep.summaries.push_back(
        summarize(std::span<const RoundRow>(rep.rounds).subspan(first), run, p, space.feature_count()));
  }
  return rep;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg, RowPool pool) {
  const auto issues = validate_config(cfg, pool == nullptr);
  if (!issues.empty()) {
    throw std::invalid_argument("invalid configuration: " + issues.front().field + ": " + issues.front().message);
  }
  const std::size_t runs = cfg.run.runs;
  std::vector<Repetition> reps(runs);
  std::size_t workers = cfg.run.threads != 0 ? cfg.run.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, runs);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    while (true) {
      const std::size_t r = next.fetch_add(1);
      if (r >= runs) return;
      try {
        reps[r] = run_repetition(cfg, pool, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = runs;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t k = 0; k < workers; ++k) threads.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentOutput out;
  auto& res = out.result;
  for (const auto& p : cfg.policies) res.policies.push_back(p.label);
  res.runs = runs;
  res.horizon = cfg.run.horizon;
  if (!reps.empty()) {
    res.feature_count = reps.front().feature_count;
    res.action_count = reps.front().action_count;
    res.reward_starts = reps.front().reward_starts;
    res.cost_starts = reps.front().cost_starts;
  }
  for (auto& rep : reps) {
    res.rounds.insert(res.rounds.end(), rep.rounds.begin(), rep.rounds.end());
    res.summaries.insert(res.summaries.end(), rep.summaries.begin(), rep.summaries.end());
    out.stream_hashes.push_back(rep.stream_hash);
  }
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) { return run_experiment(cfg, load_pool(cfg.environment)); }

ManifestInfo manifest_for(const ExperimentConfig& cfg, const RunResult& result) {
  ManifestInfo info;
  info.config_text = serialize_config(cfg);
  info.seed = cfg.run.seed;
  info.runs = cfg.run.runs;
  info.policies = result.policies;
  return info;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + p.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& p) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace

void emit_plot_data(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + dir.string());
  const std::size_t P = result.policies.size();
  const double runs = static_cast<double>(std::max<std::size_t>(1, result.runs));

  {
    const auto path = dir / "regret_curve.csv";
    auto out = open_out(path);
    out << "t,reward_change,cost_change";
    for (const auto& p : result.policies) out << ',' << p;
    out << '\n';
    std::vector<std::vector<double>> mean(P, std::vector<double>(static_cast<std::size_t>(result.horizon), 0.0));
    for (std::size_t run = 0; run < result.runs; ++run) {
      for (std::size_t p = 0; p < P; ++p) {
        const auto s = result.series(run, p);
        for (std::size_t k = 0; k < s.size(); ++k) mean[p][k] += s[k].cumulative_expected_regret / runs;
      }
    }
    const auto marks = [](const std::vector<std::uint64_t>& starts, std::uint64_t t) {
      return t > 1 && std::find(starts.begin(), starts.end(), t) != starts.end() ? 1 : 0;
    };
    for (std::uint64_t t = 1; t <= result.horizon; ++t) {
      out << t << ',' << marks(result.reward_starts, t) << ',' << marks(result.cost_starts, t);
      for (std::size_t p = 0; p < P; ++p) out << ',' << format_double(mean[p][t - 1]);
      out << '\n';
    }
    finish(out, path);
  }

  {
    const auto path = dir / "totals.csv";
    auto out = open_out(path);
    out << "policy,mean_total_reward,mean_total_cost,mean_total_gain,mean_final_cumulative_regret\n";
    for (std::size_t p = 0; p < P; ++p) {
      out << result.policies[p] << ',' << format_double(result.mean_total_reward(p)) << ','
          << format_double(result.mean_total_cost(p)) << ',' << format_double(result.mean_total_gain(p)) << ','
          << format_double(result.mean_final_regret(p)) << '\n';
    }
    finish(out, path);
  }

  {
    const auto path = dir / "action_histogram.csv";
    auto out = open_out(path);
    out << "run,policy,segment,segment_start,segment_end,action,count\n";
    const auto& starts = result.reward_starts;
    for (std::size_t run = 0; run < result.runs; ++run) {
      for (std::size_t p = 0; p < P; ++p) {
        const auto s = result.series(run, p);
        for (std::size_t seg = 0; seg < starts.size(); ++seg) {
          const std::uint64_t begin = starts[seg];
          const std::uint64_t end = seg + 1 < starts.size() ? starts[seg + 1] - 1 : result.horizon;
          std::vector<std::size_t> counts(result.action_count, 0);
          for (std::uint64_t t = begin; t <= end && t <= s.size(); ++t) counts.at(s[t - 1].action) += 1;
          for (std::size_t a = 0; a < counts.size(); ++a) {
            out << run << ',' << result.policies[p] << ',' << seg << ',' << begin << ',' << end << ',' << a << ','
                << counts[a] << '\n';
          }
        }
      }
    }
    finish(out, path);
  }

  {
    const auto path = dir / "accuracy.csv";
    auto out = open_out(path);
    out << "policy,k,mean_accuracy,runs_with_data\n";
    for (std::size_t p = 0; p < P; ++p) {
      for (std::size_t k = 0; k <= result.feature_count; ++k) {
        double total = 0.0;
        std::size_t present = 0;
        for (std::size_t run = 0; run < result.runs; ++run) {
          const auto& acc = result.summary(run, p).accuracy_at_k;
          if (k < acc.size() && acc[k]) {
            total += *acc[k];
            ++present;
          }
        }
        out << result.policies[p] << ',' << k << ',';
        if (present) out << format_double(total / static_cast<double>(present));
        out << ',' << present << '\n';
      }
    }
    finish(out, path);
  }
}

std::vector<GridAxis> parse_grid(std::istream& in) {
  std::vector<GridAxis> axes;
  std::string raw;
  std::size_t line = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string text = raw.substr(0, raw.find('#'));
    text = trim(text);
    if (text.empty() || text == "[grid]") continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'policy.param = v1, v2'", line);
    const auto key = trim(text.substr(0, eq));
    const auto dot = key.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size()) {
      throw ParseError("grid key must be 'policy.param'", line);
    }
    GridAxis axis{key.substr(0, dot), key.substr(dot + 1), {}};
    std::string rest = text.substr(eq + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      const auto comma = rest.find(',', start);
      const auto item = trim(rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (!item.empty()) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size()) {
          throw ParseError("cannot read '" + item + "' as a number", line);
        }
        axis.values.push_back(v);
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (axis.values.empty()) throw ParseError("grid axis has no values", line);
    axes.push_back(std::move(axis));
  }
  if (axes.empty()) throw ParseError("grid is empty", line);
  return axes;
}

std::vector<GridAxis> load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid: " + path.string());
  return parse_grid(in);
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const std::vector<GridAxis>& grid, RowPool pool) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  std::vector<std::string> swept;
  for (const auto& axis : grid) {
    if (std::find(swept.begin(), swept.end(), axis.policy) == swept.end()) swept.push_back(axis.policy);
  }

  std::vector<SweepRow> rows;
  std::vector<std::size_t> index(grid.size(), 0);
  while (true) {
    ExperimentConfig point = cfg;
    point.policies.clear();
    for (const auto& label : swept) {
      const auto it =
          std::find_if(cfg.policies.begin(), cfg.policies.end(), [&](const auto& p) { return p.label == label; });
      point.policies.push_back(it != cfg.policies.end() ? *it : make_policy_spec(label));
    }
    std::vector<std::pair<std::string, double>> assignment;
    for (std::size_t a = 0; a < grid.size(); ++a) {
      const double v = grid[a].values[index[a]];
      for (auto& p : point.policies) {
        if (p.label == grid[a].policy) p.params[grid[a].param] = v;
      }
      assignment.emplace_back(grid[a].policy + "." + grid[a].param, v);
    }

    const auto out = run_experiment(point, pool);
    for (std::size_t p = 0; p < point.policies.size(); ++p) {
      SweepRow row;
      row.assignment = assignment;
      row.policy = point.policies[p].label;
      row.mean_total_gain = out.result.mean_total_gain(p);
      row.mean_final_regret = out.result.mean_final_regret(p);
      for (std::size_t r = 0; r < out.result.runs; ++r) {
        row.final_regret_per_run.push_back(out.result.summary(r, p).final_cumulative_regret);
      }
      rows.push_back(std::move(row));
    }

    // Odometer over the grid, last axis fastest.
    bool advanced = false;
    for (std::size_t a = grid.size(); a-- > 0 && !advanced;) {
      if (++index[a] < grid[a].values.size()) {
        advanced = true;
      } else {
        index[a] = 0;
      }
    }
    if (!advanced) break;
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].mean_total_gain > rows[best].mean_total_gain) best = k;
  }
  rows[best].best = true;
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "parameters,policy,mean_total_gain,mean_final_cumulative_regret,best\n";
  for (const auto& r : rows) {
    std::string params;
    for (const auto& [k, v] : r.assignment) params += (params.empty() ? "" : ";") + k + "=" + format_double(v);
    out << params << ',' << r.policy << ',' << format_double(r.mean_total_gain) << ','
        << format_double(r.mean_final_regret) << ',' << (r.best ? 1 : 0) << '\n';
  }
}

}  // namespace ncc
