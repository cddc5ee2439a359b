#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "brute_force.hpp"
#include "ncc/dataio.hpp"
#include "temp_dir.hpp"

using namespace ncc;

namespace {

const std::filesystem::path kSample = std::filesystem::path(NCC_TEST_DATA_DIR) / "nursery_format_sample.data";

std::vector<NurseryRecord> random_records(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto space = nursery_space();
  std::vector<NurseryRecord> out;
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back({testing::random_state(space, rng), std::uniform_int_distribution<std::size_t>(0, 2)(rng)});
  }
  return out;
}

RunResult tiny_result() {
  RunResult r;
  r.policies = {"ncc-ucrl2", "oracle"};
  r.runs = 1;
  r.horizon = 2;
  r.feature_count = 2;
  r.action_count = 2;
  r.reward_starts = {1};
  r.cost_starts = {1};
  r.rounds = {
      {0, 1, 0, 1, 3, 1.0, 0.08, 0.92, 0.1 + 0.2, 0.05, 0.3},
      {0, 2, 0, 0, 0, 0.0, 0.0, 0.0, 1.0 / 3.0, -0.25, 0.3 + 1.0 / 3.0},
      {0, 1, 1, 1, 1, 1.0, 0.03, 0.97, 0.0, 0.0, 0.0},
      {0, 2, 1, 0, 1, 1.0, 0.03, 0.97, 0.0, 0.0, 0.0},
  };
  r.summaries = {summarize(r.series(0, 0), 0, 0, 2), summarize(r.series(0, 1), 0, 1, 2)};
  return r;
}

}  // namespace

TEST_CASE("recommend rows are dropped") {
  std::istringstream in("usual,proper,complete,1,convenient,convenient,nonprob,recommended,recommend\n");
  const auto p = parse_nursery_detailed(in);
  CHECK(p.records.empty());
  CHECK(p.rows_read == 1);
  CHECK(p.rows_dropped == 1);
}

TEST_CASE("labels and kept columns map to indices") {
  std::istringstream in(
      "great_pret,very_crit,foster,more,critical,inconv,problematic,not_recom,not_recom\r\n"
      "usual,proper,completed,2,less_conv,convenient,nonprob,priority,spec_prior\n"
      "\n"
      "pretentious,improper,incomplete,3,convenient,inconv,slightly_prob,recommended,priority\n");
  const auto recs = parse_nursery(in);
  REQUIRE(recs.size() == 3);
  // form, children, finance, housing, health
  CHECK(recs[0].states == StateVector{{3, 3, 1, 2, 2}});
  CHECK(recs[0].label == 0);
  CHECK(recs[1].states == StateVector{{1, 1, 0, 1, 1}});
  CHECK(recs[1].label == 2);
  CHECK(recs[2].states == StateVector{{2, 2, 1, 0, 0}});
  CHECK(recs[2].label == 1);
}

TEST_CASE("malformed lines report their position") {
  std::istringstream short_line(
      "usual,proper,complete,1,convenient,convenient,nonprob,priority,priority\n"
      "usual,proper\n");
  try {
    parse_nursery(short_line);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream unknown("usual,proper,complete,1,convenient,cheap,nonprob,priority,priority\n");
  try {
    parse_nursery(unknown);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("cheap") != std::string::npos);
    CHECK(std::string(e.what()).find("finance") != std::string::npos);
  }
  std::istringstream bad_label("usual,proper,complete,1,convenient,convenient,nonprob,priority,maybe\n");
  CHECK_THROWS_AS(parse_nursery(bad_label), ParseError);
}

TEST_CASE("format fixture parses") {
  const auto recs = load_nursery_file(kSample);
  std::ifstream in(kSample);
  const auto p = parse_nursery_detailed(in);
  CHECK(p.rows_read == 200);
  CHECK(p.rows_dropped == 7);
  CHECK(recs.size() == 193);
  const auto space = nursery_space();
  for (const auto& r : recs) {
    CHECK(space.is_valid(r.states));
    CHECK(r.label < 3);
  }
  CHECK_THROWS_AS(load_nursery_file("/nonexistent/nursery.data"), std::runtime_error);
}

TEST_CASE("serialize then parse is the identity") {
  const auto recs = random_records(500, 3);
  std::istringstream in(serialize_nursery(recs));
  CHECK(parse_nursery(in) == recs);
  const auto sample = load_nursery_file(kSample);
  std::istringstream again(serialize_nursery(sample));
  CHECK(parse_nursery(again) == sample);
}

TEST_CASE("train and validation split") {
  const auto recs = random_records(12958, 5);
  const auto [train, validation] = split_train_validation(recs, 17);
  CHECK(train.size() == 10000);
  CHECK(validation.size() == 2630);

  // disjoint as multisets of source positions: tag each record by its index
  std::vector<NurseryRecord> tagged;
  for (std::size_t k = 0; k < 12630; ++k) {
    tagged.push_back({StateVector{{static_cast<StateIndex>(k % 4), static_cast<StateIndex>((k / 4) % 4),
                                   static_cast<StateIndex>((k / 16) % 2), static_cast<StateIndex>((k / 32) % 3),
                                   static_cast<StateIndex>((k / 96) % 3)}},
                      (k / 288) % 3});
  }
  const auto [a, b] = split_train_validation(tagged, 1);
  std::multiset<std::pair<std::vector<StateIndex>, std::size_t>> seen;
  for (const auto& r : a) seen.insert({r.states.states, r.label});
  for (const auto& r : b) seen.insert({r.states.states, r.label});
  std::multiset<std::pair<std::vector<StateIndex>, std::size_t>> all;
  for (const auto& r : tagged) all.insert({r.states.states, r.label});
  CHECK(seen == all);

  const auto [t2, v2] = split_train_validation(recs, 17);
  CHECK(t2 == train);
  CHECK(v2 == validation);
  const auto [t3, v3] = split_train_validation(recs, 18);
  CHECK(t3 != train);
  CHECK_THROWS_AS(split_train_validation(random_records(12629, 1), 1), std::invalid_argument);
}

TEST_CASE("rounds csv round-trips") {
  const auto r = tiny_result();
  std::ostringstream out;
  write_rounds_csv(out, r);
  std::istringstream in(out.str());
  CHECK(read_rounds_csv(in, r.policies) == r.rounds);
  CHECK(out.str().substr(0, out.str().find('\n')) ==
        "run,t,policy,action,obs_set,reward,cost_paid,gain,expected_regret,realized_regret,cumulative_expected_regret");
}

TEST_CASE("empty results give header-only files") {
  RunResult r;
  r.feature_count = 5;
  std::ostringstream rounds, summary;
  write_rounds_csv(rounds, r);
  write_summary_csv(summary, r);
  const auto text = rounds.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(summary.str() ==
        "policy,run,total_reward,total_cost,total_gain,final_cumulative_regret,accuracy_at_0,accuracy_at_1,"
        "accuracy_at_2,accuracy_at_3,accuracy_at_4,accuracy_at_5\n");
}

TEST_CASE("summary csv leaves absent accuracies empty") {
  const auto r = tiny_result();
  std::ostringstream out;
  write_summary_csv(out, r);
  std::istringstream lines(out.str());
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(first == "ncc-ucrl2,0,1,0.08,0.92," + format_double(0.3 + 1.0 / 3.0) + ",0,0,0.5");
  CHECK(second == "oracle,0,2,0.06,1.94,0,,1,1");
}

TEST_CASE("numbers use the shortest round-trip form") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.25) == "-0.25");
  const double x = 1.0 / 3.0;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("manifest records hash, seed and version") {
  ManifestInfo info{"[run]\nhorizon = 10\n", 7, 3, {"ncc-ucrl2", "ucb1"}};
  const auto text = manifest_json(info);
  CHECK(text == manifest_json(info));
  const auto j = nlohmann::json::parse(text);
  CHECK(j["seed"] == 7);
  CHECK(j["runs"] == 3);
  CHECK(j["policies"].size() == 2);
  CHECK(j["version"] == version_string());
  CHECK(j["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(j["config_hash"].get<std::string>().size() == 8 + 16);
  info.config_text += " ";
  CHECK(nlohmann::json::parse(manifest_json(info))["config_hash"] != j["config_hash"]);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("write_results creates the three files") {
  testing::TempDir dir;
  const auto r = tiny_result();
  write_results(r, ManifestInfo{"x", 1, 1, r.policies}, dir / "out");
  for (const char* name : {"rounds.csv", "summary.csv", "manifest.json"}) {
    CHECK(std::filesystem::exists(dir / "out" / name));
  }
  std::ifstream in(dir / "out" / "rounds.csv");
  CHECK(read_rounds_csv(in, r.policies) == r.rounds);

  std::ofstream blocker(dir / "file");
  blocker << "x";
  blocker.close();
  try {
    write_results(r, ManifestInfo{}, dir / "file" / "sub");
    FAIL("expected an I/O error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("file") != std::string::npos);
  }
}
