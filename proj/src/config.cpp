#include "ncc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "ncc/baselines.hpp"
#include "ncc/dataio.hpp"
#include "ncc/oracle.hpp"
#include "ncc/rng.hpp"

namespace ncc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto pos = value.find(',', start);
    const auto item = trim(value.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.emplace_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_value(std::string_view s, std::size_t line, std::string_view key) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("key '" + std::string(key) + "': cannot read '" + std::string(s) + "' as a number", line);
  }
  return v;
}

std::vector<std::uint64_t> parse_points(std::string_view s, std::size_t line, std::string_view key) {
  std::vector<std::uint64_t> out;
  if (s == "none") return out;
  for (const auto& item : split_list(s)) out.push_back(parse_value<std::uint64_t>(item, line, key));
  return out;
}

std::string join_points(const std::vector<std::uint64_t>& v) {
  if (v.empty()) return "none";
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ", ";
    out += std::to_string(v[k]);
  }
  return out;
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

std::string PolicySpec::kind() const { return label.substr(0, label.find(':')); }

double PolicySpec::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw std::out_of_range("policy " + label + " has no parameter '" + key + "'");
  return it->second;
}

const std::vector<std::string>& policy_kinds() {
  static const std::vector<std::string> kinds{"ncc-ucrl2", "sim-oos",    "ps-linucb", "linucb",
                                              "ucb1",      "eps-greedy", "random",    "oracle"};
  return kinds;
}

const std::map<std::string, double>& policy_defaults(const std::string& kind) {
  static const std::map<std::string, std::map<std::string, double>> table{
      {"ncc-ucrl2", {{"window", 250}, {"delta", 0.04}}},
      {"sim-oos", {{"delta", 0.8}}},
      {"ps-linucb", {{"alpha", 0.7}, {"omega", 100}, {"delta", 0.05}}},
      {"linucb", {{"alpha", 0.5}}},
      {"ucb1", {{"alpha", 0.6}}},
      {"eps-greedy", {{"epsilon", 0.03}}},
      {"random", {}},
      {"oracle", {}},
  };
  static const std::map<std::string, double> none;
  const auto it = table.find(kind);
  return it == table.end() ? none : it->second;
}

PolicySpec make_policy_spec(const std::string& label) {
  PolicySpec p;
  p.label = label;
  p.params = policy_defaults(p.kind());
  return p;
}

std::vector<PolicySpec> default_policies() {
  std::vector<PolicySpec> out;
  for (const auto& k : policy_kinds()) {
    if (k != "oracle") out.push_back(make_policy_spec(k));
  }
  return out;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::vector<PolicySpec> sections;
  std::vector<std::string> listed;
  bool have_list = false;

  enum class Section { None, Run, Environment, Policy } section = Section::None;
  PolicySpec* current = nullptr;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto hash = text.find_first_of("#;"); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text.back() != ']') throw ParseError("unterminated section header", line);
      const auto name = std::string(trim(text.substr(1, text.size() - 2)));
      current = nullptr;
      if (name == "run") {
        section = Section::Run;
      } else if (name == "environment") {
        section = Section::Environment;
      } else if (name.rfind("policies.", 0) == 0 && name.size() > 9) {
        section = Section::Policy;
        const auto label = name.substr(9);
        for (const auto& s : sections) {
          if (s.label == label) throw ParseError("duplicate section [" + name + "]", line);
        }
        sections.push_back(make_policy_spec(label));
        current = &sections.back();
      } else {
        throw ParseError("unknown section [" + name + "]", line);
      }
      continue;
    }

    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line);
    const auto key = std::string(trim(text.substr(0, eq)));
    const auto value = trim(text.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line);

    switch (section) {
      case Section::None:
        throw ParseError("key '" + key + "' outside any section", line);
      case Section::Run:
        if (key == "horizon") {
          cfg.run.horizon = parse_value<std::uint64_t>(value, line, key);
        } else if (key == "runs") {
          cfg.run.runs = parse_value<std::size_t>(value, line, key);
        } else if (key == "seed") {
          cfg.run.seed = parse_value<std::uint64_t>(value, line, key);
        } else if (key == "threads") {
          cfg.run.threads = parse_value<std::size_t>(value, line, key);
        } else if (key == "output") {
          cfg.run.output = std::string(value);
        } else if (key == "policies") {
          listed = split_list(value);
          have_list = true;
        } else {
          throw ParseError("unknown key '" + key + "' in [run]", line);
        }
        break;
      case Section::Environment: {
        auto& env = cfg.environment;
        if (key == "preset") {
          env.preset = std::string(value);
        } else if (key == "dataset") {
          env.dataset = std::string(value);
        } else if (key == "split") {
          env.split = std::string(value);
        } else if (key == "split_seed") {
          env.split_seed = parse_value<std::uint64_t>(value, line, key);
        } else if (key == "reward_change_points") {
          env.reward_change_points = parse_points(value, line, key);
        } else if (key == "cost_change_points") {
          env.cost_change_points = parse_points(value, line, key);
        } else if (key == "cost_min") {
          env.cost_min = parse_value<double>(value, line, key);
        } else if (key == "cost_max") {
          env.cost_max = parse_value<double>(value, line, key);
        } else if (key == "cost_means") {
          std::vector<double> means;
          for (const auto& item : split_list(value)) means.push_back(parse_value<double>(item, line, key));
          env.cost_means = std::move(means);
        } else if (key == "cost_sigma") {
          env.cost_sigma = parse_value<double>(value, line, key);
        } else {
          throw ParseError("unknown key '" + key + "' in [environment]", line);
        }
        break;
      }
      case Section::Policy:
        current->params[key] = parse_value<double>(value, line, key);
        break;
    }
  }

  if (have_list) {
    for (const auto& label : listed) {
      const auto it = std::find_if(sections.begin(), sections.end(), [&](const auto& s) { return s.label == label; });
      cfg.policies.push_back(it != sections.end() ? *it : make_policy_spec(label));
    }
  } else if (!sections.empty()) {
    cfg.policies = sections;
  } else {
    cfg.policies = default_policies();
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  return parse_config(in);
}

std::vector<ConfigIssue> validate_config(const ExperimentConfig& cfg, bool check_dataset) {
  std::vector<ConfigIssue> issues;
  const auto issue = [&](std::string field, std::string message) {
    issues.push_back({std::move(field), std::move(message)});
  };

  if (cfg.run.horizon == 0) issue("run.horizon", "must be at least 1");
  if (cfg.run.runs == 0) issue("run.runs", "must be at least 1");
  if (cfg.run.output.empty()) issue("run.output", "must not be empty");

  const auto& env = cfg.environment;
  const auto& presets = preset_names();
  const bool known_preset = std::find(presets.begin(), presets.end(), env.preset) != presets.end();
  if (!known_preset) {
    std::string names;
    for (const auto& p : presets) names += (names.empty() ? "" : ", ") + p;
    issue("environment.preset", "unknown preset '" + env.preset + "'; valid presets: " + names);
  } else if (check_dataset && preset_uses_dataset(env.preset)) {
    if (env.dataset.empty()) {
      issue("environment.dataset", "preset '" + env.preset + "' needs a dataset path");
    } else {
      std::error_code ec;
      if (!std::filesystem::is_regular_file(env.dataset, ec)) {
        issue("environment.dataset", "file not found: " + env.dataset);
      }
    }
    const auto split = effective_split(env);
    if (split != "train" && split != "validation" && split != "all") {
      issue("environment.split", "must be one of train, validation, all");
    } else if (split != "all") {
      const std::uint64_t rows = split == "train" ? kNurseryTrainRows : kNurseryValidationRows;
      if (cfg.run.horizon > rows) {
        issue("run.horizon", "exceeds the " + std::to_string(rows) + " rows of the " + split + " split");
      }
    }
  }
  const auto check_points = [&](const std::optional<std::vector<std::uint64_t>>& pts, const std::string& field) {
    if (!pts) return;
    for (std::size_t k = 0; k < pts->size(); ++k) {
      if ((*pts)[k] < 2) issue(field, "change points must be at least 2");
      if (k > 0 && (*pts)[k] <= (*pts)[k - 1]) issue(field, "change points must be strictly increasing");
    }
  };
  check_points(env.reward_change_points, "environment.reward_change_points");
  check_points(env.cost_change_points, "environment.cost_change_points");
  if (!(env.cost_min >= 0.0 && env.cost_min <= 1.0)) issue("environment.cost_min", "must lie in [0,1]");
  if (!(env.cost_max >= 0.0 && env.cost_max <= 1.0)) issue("environment.cost_max", "must lie in [0,1]");
  if (env.cost_min > env.cost_max) issue("environment.cost_min", "must not exceed cost_max");
  if (!(env.cost_sigma >= 0.0)) issue("environment.cost_sigma", "must be non-negative");
  if (env.cost_means) {
    for (double m : *env.cost_means) {
      if (!(m >= 0.0 && m <= 1.0)) issue("environment.cost_means", "every mean must lie in [0,1]");
    }
    if (known_preset) {
      const std::size_t d = preset_uses_dataset(env.preset) ? 5 : 2;
      if (env.cost_means->size() != d) issue("environment.cost_means", "needs " + std::to_string(d) + " values");
    }
  }

  if (cfg.policies.empty()) issue("run.policies", "no policies selected");
  const auto& kinds = policy_kinds();
  std::vector<std::string> seen;
  for (const auto& p : cfg.policies) {
    const std::string field = "policies." + p.label;
    if (std::find(seen.begin(), seen.end(), p.label) != seen.end()) issue(field, "listed more than once");
    seen.push_back(p.label);
    const auto kind = p.kind();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
      std::string names;
      for (const auto& k : kinds) names += (names.empty() ? "" : ", ") + k;
      issue(field, "unknown policy '" + kind + "'; valid names: " + names);
      continue;
    }
    const auto& defaults = policy_defaults(kind);
    for (const auto& [key, value] : p.params) {
      const std::string pf = field + "." + key;
      if (!defaults.contains(key)) {
        issue(pf, "unknown parameter for " + kind);
      } else if (key == "delta" && kind != "ps-linucb" && !(value > 0.0 && value < 1.0)) {
        issue(pf, "must lie in (0,1)");
      } else if (key == "delta" && kind == "ps-linucb" && !(value >= 0.0)) {
        issue(pf, "must be non-negative");
      } else if ((key == "window" || key == "omega") && !(value >= 1.0 && is_integer(value))) {
        issue(pf, "must be a positive integer");
      } else if (key == "alpha" && !(value >= 0.0)) {
        issue(pf, "must be non-negative");
      } else if (key == "epsilon" && !(value >= 0.0 && value <= 1.0)) {
        issue(pf, "must lie in [0,1]");
      }
    }
  }
  return issues;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[run]\n";
  out << "horizon = " << cfg.run.horizon << "\n";
  out << "runs = " << cfg.run.runs << "\n";
  out << "seed = " << cfg.run.seed << "\n";
  out << "output = " << cfg.run.output << "\n";
  out << "threads = " << cfg.run.threads << "\n";
  out << "policies = ";
  for (std::size_t k = 0; k < cfg.policies.size(); ++k) out << (k ? ", " : "") << cfg.policies[k].label;
  out << "\n\n[environment]\n";
  const auto& env = cfg.environment;
  out << "preset = " << env.preset << "\n";
  if (!env.dataset.empty()) out << "dataset = " << env.dataset << "\n";
  if (!env.split.empty()) out << "split = " << env.split << "\n";
  out << "split_seed = " << env.split_seed << "\n";
  if (env.reward_change_points) out << "reward_change_points = " << join_points(*env.reward_change_points) << "\n";
  if (env.cost_change_points) out << "cost_change_points = " << join_points(*env.cost_change_points) << "\n";
  out << "cost_min = " << format_double(env.cost_min) << "\n";
  out << "cost_max = " << format_double(env.cost_max) << "\n";
  out << "cost_sigma = " << format_double(env.cost_sigma) << "\n";
  if (env.cost_means) {
    out << "cost_means = ";
    for (std::size_t k = 0; k < env.cost_means->size(); ++k) {
      out << (k ? ", " : "") << format_double((*env.cost_means)[k]);
    }
    out << "\n";
  }
  for (const auto& p : cfg.policies) {
    out << "\n[policies." << p.label << "]\n";
    for (const auto& [key, value] : p.params) out << key << " = " << format_double(value) << "\n";
  }
  return out.str();
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::shared_ptr<const PartialCatalog> catalog,
                                    std::size_t action_count, std::uint64_t horizon, std::uint64_t seed,
                                    std::uint64_t run, std::shared_ptr<const OracleTable> oracle) {
  const auto kind = spec.kind();
  if (kind == "ncc-ucrl2") {
    return std::make_unique<NccUcrl2Policy>(std::move(catalog), action_count, horizon,
                                            static_cast<std::size_t>(spec.param("window")), spec.param("delta"));
  }
  if (kind == "sim-oos") {
    return std::make_unique<SimOosPolicy>(std::move(catalog), action_count, horizon, spec.param("delta"));
  }
  if (kind == "ps-linucb") {
    return std::make_unique<PsLinUcbPolicy>(std::move(catalog), action_count, spec.param("alpha"),
                                            static_cast<std::size_t>(spec.param("omega")), spec.param("delta"));
  }
  if (kind == "linucb") return std::make_unique<LinUcbPolicy>(std::move(catalog), action_count, spec.param("alpha"));
  if (kind == "ucb1") return std::make_unique<Ucb1Policy>(action_count, spec.param("alpha"));
  const std::uint64_t salt = fnv1a64(spec.label);
  if (kind == "eps-greedy") {
    auto rng = make_stream(seed, run, StreamPurpose::Policy, salt);
    return std::make_unique<EpsGreedyPolicy>(action_count, spec.param("epsilon"), rng());
  }
  if (kind == "random") {
    auto rng = make_stream(seed, run, StreamPurpose::Policy, salt);
    return std::make_unique<RandomPolicy>(action_count, rng());
  }
  if (kind == "oracle") {
    if (!oracle) throw std::invalid_argument("oracle policy needs the ground truth");
    return std::make_unique<OraclePolicy>(std::move(oracle));
  }
  throw std::invalid_argument("unknown policy '" + kind + "'");
}

}  // namespace ncc
