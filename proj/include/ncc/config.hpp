#pragma once

// Experiment configuration: a line-oriented key = value format with
// [environment], [policies.<label>] and [run] sections.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ncc/environment.hpp"
#include "ncc/policies.hpp"

namespace ncc {

/// A policy instance. `label` is the section suffix; the kind is the part
/// before an optional ':' so that one kind may appear with several settings.
struct PolicySpec {
  std::string label;
  std::map<std::string, double> params;
  std::string kind() const;
  double param(const std::string& key) const;
};

struct RunSettings {
  std::uint64_t horizon = 10000;
  std::size_t runs = 5;
  std::uint64_t seed = 0;
  std::string output = "results";
  std::size_t threads = 0;  // 0: hardware concurrency
};

struct ExperimentConfig {
  EnvironmentSpec environment;
  std::vector<PolicySpec> policies;
  RunSettings run;
};

struct ConfigIssue {
  std::string field;
  std::string message;
  friend bool operator==(const ConfigIssue&, const ConfigIssue&) = default;
};

const std::vector<std::string>& policy_kinds();
/// Defaults for every parameter a policy kind accepts.
const std::map<std::string, double>& policy_defaults(const std::string& kind);
std::vector<PolicySpec> default_policies();
PolicySpec make_policy_spec(const std::string& label);

/// Throws ParseError with the line on syntax errors; semantic checks are
/// left to validate_config.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Never throws; returns every violation with its field path. Dataset file
/// and split checks are skipped when `check_dataset` is false, e.g. when the
/// caller supplies the rows directly.
std::vector<ConfigIssue> validate_config(const ExperimentConfig& cfg, bool check_dataset = true);
/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& cfg);

/// Instantiates a policy. Policies with their own randomness draw from a
/// stream keyed by (seed, run, label).
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::shared_ptr<const PartialCatalog> catalog,
                                    std::size_t action_count, std::uint64_t horizon, std::uint64_t seed,
                                    std::uint64_t run, std::shared_ptr<const OracleTable> oracle);

}  // namespace ncc
