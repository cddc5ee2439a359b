#pragma once

// Nursery dataset ingestion and result persistence.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ncc/feature_space.hpp"
#include "ncc/metrics.hpp"

namespace ncc {

inline constexpr std::size_t kNurseryActions = 3;
inline constexpr std::size_t kNurseryTrainRows = 10000;
inline constexpr std::size_t kNurseryValidationRows = 2630;

/// Kept columns, in feature order: form, children, finance, housing, health.
struct NurseryRecord {
  StateVector states;
  std::size_t label = 0;  // not_recom 0, priority 1, spec_prior 2
  friend bool operator==(const NurseryRecord&, const NurseryRecord&) = default;
};

/// {4, 4, 2, 3, 3}
FeatureSpace nursery_space();

struct NurseryParse {
  std::vector<NurseryRecord> records;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
};

/// Throws ParseError (with the 1-based line) on malformed lines or unknown values.
NurseryParse parse_nursery_detailed(std::istream& in);
std::vector<NurseryRecord> parse_nursery(std::istream& in);
std::vector<NurseryRecord> load_nursery_file(const std::filesystem::path& path);

/// One line per record; dropped columns carry their first documented value.
std::string serialize_nursery(std::span<const NurseryRecord> records);

/// Seeded shuffle, then the first 10000 rows train and the next 2630 validate.
std::pair<std::vector<NurseryRecord>, std::vector<NurseryRecord>> split_train_validation(
    std::span<const NurseryRecord> records, std::uint64_t seed);

// ---- results ---------------------------------------------------------------

/// Shortest round-trip decimal form.
std::string format_double(double v);

void write_rounds_csv(std::ostream& out, const RunResult& result);
void write_summary_csv(std::ostream& out, const RunResult& result);
/// Inverse of write_rounds_csv; policy names are resolved against `policies`.
std::vector<RoundRow> read_rounds_csv(std::istream& in, const std::vector<std::string>& policies);

struct ManifestInfo {
  std::string config_text;  // canonical serialized config
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::vector<std::string> policies;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string version_string();
std::string manifest_json(const ManifestInfo& info);

/// rounds.csv, summary.csv and manifest.json under `dir` (created if needed).
/// I/O failures throw std::runtime_error naming the path.
void write_results(const RunResult& result, const ManifestInfo& info, const std::filesystem::path& dir);

}  // namespace ncc
