#include "ncc/dataio.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include <json.hpp>

#ifndef NCC_VERSION_STRING
#define NCC_VERSION_STRING "0.0.0"
#endif

namespace ncc {

namespace {

struct Column {
  std::string_view name;
  std::vector<std::string_view> values;
};

// Value lists in the order the dataset documentation gives them.
const std::array<Column, 8>& columns() {
  static const std::array<Column, 8> cols{{
      {"parents", {"usual", "pretentious", "great_pret"}},
      {"has_nurs", {"proper", "less_proper", "improper", "critical", "very_crit"}},
      {"form", {"complete", "completed", "incomplete", "foster"}},
      {"children", {"1", "2", "3", "more"}},
      {"housing", {"convenient", "less_conv", "critical"}},
      {"finance", {"convenient", "inconv"}},
      {"social", {"nonprob", "slightly_prob", "problematic"}},
      {"health", {"recommended", "priority", "not_recom"}},
  }};
  return cols;
}

// Feature k of a record is column kKept[k] of the file.
constexpr std::array<std::size_t, 5> kKept{2, 3, 5, 4, 7};
constexpr std::array<std::string_view, 3> kLabels{"not_recom", "priority", "spec_prior"};
constexpr std::array<std::string_view, 2> kDropped{"recommend", "very_recom"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::runtime_error io_error(const std::string& what, const std::filesystem::path& p) {
  return std::runtime_error(what + ": " + p.string());
}

}  // namespace

FeatureSpace nursery_space() { return FeatureSpace({4, 4, 2, 3, 3}); }

NurseryParse parse_nursery_detailed(std::istream& in) {
  NurseryParse out;
  const auto& cols = columns();
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != cols.size() + 1) {
      throw ParseError("expected 9 comma-separated fields, found " + std::to_string(fields.size()), line_no);
    }
    ++out.rows_read;

    std::array<StateIndex, 8> index{};
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& vals = cols[c].values;
      const auto it = std::find(vals.begin(), vals.end(), fields[c]);
      if (it == vals.end()) {
        throw ParseError("unknown value '" + std::string(fields[c]) + "' in column " + std::string(cols[c].name),
                         line_no);
      }
      index[c] = static_cast<StateIndex>(it - vals.begin());
    }

    const auto label = fields.back();
    if (std::find(kDropped.begin(), kDropped.end(), label) != kDropped.end()) {
      ++out.rows_dropped;
      continue;
    }
    const auto lit = std::find(kLabels.begin(), kLabels.end(), label);
    if (lit == kLabels.end()) throw ParseError("unknown label '" + std::string(label) + "'", line_no);

    NurseryRecord rec;
    rec.label = static_cast<std::size_t>(lit - kLabels.begin());
    rec.states.states.reserve(kKept.size());
    for (auto c : kKept) rec.states.states.push_back(index[c]);
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::vector<NurseryRecord> parse_nursery(std::istream& in) { return parse_nursery_detailed(in).records; }

std::vector<NurseryRecord> load_nursery_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open dataset", path);
  return parse_nursery(in);
}

std::string serialize_nursery(std::span<const NurseryRecord> records) {
  const auto& cols = columns();
  const FeatureSpace space = nursery_space();
  std::string out;
  for (const auto& rec : records) {
    space.require_valid(rec.states);
    if (rec.label >= kLabels.size()) throw std::invalid_argument("nursery label out of range");
    std::array<std::size_t, 8> index{};
    for (std::size_t k = 0; k < kKept.size(); ++k) index[kKept[k]] = static_cast<std::size_t>(rec.states[k]);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out += cols[c].values[index[c]];
      out += ',';
    }
    out += kLabels[rec.label];
    out += '\n';
  }
  return out;
}

std::pair<std::vector<NurseryRecord>, std::vector<NurseryRecord>> split_train_validation(
    std::span<const NurseryRecord> records, std::uint64_t seed) {
  const std::size_t need = kNurseryTrainRows + kNurseryValidationRows;
  if (records.size() < need) {
    throw std::invalid_argument("split needs at least " + std::to_string(need) + " records, got " +
                                std::to_string(records.size()));
  }
  std::vector<std::size_t> order(records.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<NurseryRecord> train;
  std::vector<NurseryRecord> validation;
  train.reserve(kNurseryTrainRows);
  validation.reserve(kNurseryValidationRows);
  for (std::size_t k = 0; k < kNurseryTrainRows; ++k) train.push_back(records[order[k]]);
  for (std::size_t k = kNurseryTrainRows; k < need; ++k) validation.push_back(records[order[k]]);
  return {std::move(train), std::move(validation)};
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf.data(), end);
}

namespace {

constexpr std::string_view kRoundsHeader =
    "run,t,policy,action,obs_set,reward,cost_paid,gain,expected_regret,realized_regret,cumulative_expected_regret";

template <typename T>
T parse_number(std::string_view s, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("bad number '" + std::string(s) + "'", line);
  }
  return v;
}

}  // namespace

void write_rounds_csv(std::ostream& out, const RunResult& result) {
  out << kRoundsHeader << '\n';
  for (const auto& r : result.rounds) {
    out << r.run << ',' << r.t << ',' << result.policies.at(r.policy) << ',' << r.action << ',' << r.obs_set << ','
        << format_double(r.reward) << ',' << format_double(r.cost_paid) << ',' << format_double(r.gain) << ','
        << format_double(r.expected_regret) << ',' << format_double(r.realized_regret) << ','
        << format_double(r.cumulative_expected_regret) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const RunResult& result) {
  out << "policy,run,total_reward,total_cost,total_gain,final_cumulative_regret";
  for (std::size_t k = 0; k <= result.feature_count; ++k) out << ",accuracy_at_" << k;
  out << '\n';
  for (const auto& s : result.summaries) {
    out << result.policies.at(s.policy) << ',' << s.run << ',' << format_double(s.total_reward) << ','
        << format_double(s.total_cost) << ',' << format_double(s.total_gain) << ','
        << format_double(s.final_cumulative_regret);
    for (std::size_t k = 0; k <= result.feature_count; ++k) {
      out << ',';
      if (k < s.accuracy_at_k.size() && s.accuracy_at_k[k]) out << format_double(*s.accuracy_at_k[k]);
    }
    out << '\n';
  }
}

std::vector<RoundRow> read_rounds_csv(std::istream& in, const std::vector<std::string>& policies) {
  std::string raw;
  std::size_t line = 1;
  if (!std::getline(in, raw) || trim(raw) != kRoundsHeader) throw ParseError("missing rounds header", line);
  std::vector<RoundRow> rows;
  while (std::getline(in, raw)) {
    ++line;
    if (trim(raw).empty()) continue;
    const auto f = split(trim(raw), ',');
    if (f.size() != 11) throw ParseError("expected 11 fields", line);
    const auto pit = std::find(policies.begin(), policies.end(), f[2]);
    if (pit == policies.end()) throw ParseError("unknown policy '" + std::string(f[2]) + "'", line);
    RoundRow r;
    r.run = parse_number<std::size_t>(f[0], line);
    r.t = parse_number<std::uint64_t>(f[1], line);
    r.policy = static_cast<std::size_t>(pit - policies.begin());
    r.action = parse_number<std::size_t>(f[3], line);
    r.obs_set = parse_number<std::uint32_t>(f[4], line);
    r.reward = parse_number<double>(f[5], line);
    r.cost_paid = parse_number<double>(f[6], line);
    r.gain = parse_number<double>(f[7], line);
    r.expected_regret = parse_number<double>(f[8], line);
    r.realized_regret = parse_number<double>(f[9], line);
    r.cumulative_expected_regret = parse_number<double>(f[10], line);
    rows.push_back(r);
  }
  return rows;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string version_string() { return NCC_VERSION_STRING; }

std::string manifest_json(const ManifestInfo& info) {
  std::ostringstream hash;
  hash << std::hex;
  hash.width(16);
  hash.fill('0');
  hash << fnv1a64(info.config_text);
  nlohmann::ordered_json j;
  j["version"] = version_string();
  j["config_hash"] = "fnv1a64:" + hash.str();
  j["seed"] = info.seed;
  j["runs"] = info.runs;
  j["policies"] = info.policies;
  j["config"] = info.config_text;
  return j.dump(2) + "\n";
}

void write_results(const RunResult& result, const ManifestInfo& info, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create output directory", dir);
  const auto write = [&](const std::filesystem::path& p, auto&& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw io_error("cannot open for writing", p);
    body(out);
    out.flush();
    if (!out) throw io_error("write failed", p);
  };
  write(dir / "rounds.csv", [&](std::ostream& o) { write_rounds_csv(o, result); });
  write(dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(o, result); });
  write(dir / "manifest.json", [&](std::ostream& o) { o << manifest_json(info); });
}

}  // namespace ncc
