#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "fraudbench/error.hpp"
#include "fraudbench/graph.hpp"
#include "fraudbench/sim.hpp"

using namespace fraudbench;

namespace {

SimConfig balanced_config() {
  SimConfig cfg;
  cfg.legit_accounts = 500;
  cfg.illicit_accounts = 500;
  cfg.legit_transactions = 5000;
  cfg.illicit_transactions = 5000;
  cfg.months = 12;
  cfg.amount = {100.0, 100.0, 0.5};
  cfg.typologies = default_typology_mix(cfg.illicit_transactions, cfg.illicit_accounts);
  cfg.seed = 7;
  return cfg;
}

SimConfig imbalanced_config() {
  SimConfig cfg;
  cfg.legit_accounts = 950;
  cfg.illicit_accounts = 50;
  cfg.legit_transactions = 9500;
  cfg.illicit_transactions = 500;
  cfg.months = 12;
  cfg.amount = {100.0, 100.0, 0.5};
  cfg.typologies = default_typology_mix(cfg.illicit_transactions, cfg.illicit_accounts);
  cfg.seed = 7;
  return cfg;
}

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("balanced generation hits exact per-class counts") {
  const auto [log, accounts] = generate(balanced_config());
  CHECK(log.size() == 10000);
  std::int64_t illicit = 0;
  for (const auto& tx : log) illicit += tx.illicit ? 1 : 0;
  CHECK(illicit == 5000);
  CHECK(accounts.count_label(0) == 500);
  CHECK(accounts.count_label(1) == 500);
}

TEST_CASE("imbalanced generation matches configured counts and ratio") {
  const auto [log, accounts] = generate(imbalanced_config());
  CHECK(log.size() == 10000);
  std::int64_t illicit = 0;
  for (const auto& tx : log) illicit += tx.illicit ? 1 : 0;
  CHECK(illicit == 500);
  CHECK(accounts.count_label(0) == 950);
  CHECK(accounts.count_label(1) == 50);
  CHECK(imbalance_ratio(accounts.labels) == 19.0);
}

TEST_CASE("fraud-free config yields a clean log") {
  SimConfig cfg;
  cfg.legit_accounts = 20;
  cfg.illicit_accounts = 0;
  cfg.legit_transactions = 100;
  cfg.illicit_transactions = 0;
  cfg.seed = 1;
  const auto [log, accounts] = generate(cfg);
  CHECK(log.size() == 100);
  for (const auto& tx : log) CHECK_FALSE(tx.illicit);
  for (auto label : accounts.labels) CHECK(label == 0);
}

TEST_CASE("log invariants hold") {
  const auto [log, accounts] = generate(imbalanced_config());
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& tx = log[i];
    CHECK(tx.tx_id == static_cast<std::int64_t>(i));
    CHECK(tx.src != tx.dst);
    CHECK(tx.amount > 0.0);
    CHECK(tx.month >= 1);
    CHECK(tx.month <= 12);
    CHECK(tx.amount == doctest::Approx(std::round(tx.amount * 100) / 100).epsilon(1e-12));
    if (i) CHECK(log[i - 1].month <= tx.month);
  }
}

TEST_CASE("generation is a pure function of the config") {
  const auto a = generate(balanced_config());
  const auto b = generate(balanced_config());
  REQUIRE(a.first.size() == b.first.size());
  for (std::size_t i = 0; i < a.first.size(); ++i) {
    CHECK(a.first[i].src == b.first[i].src);
    CHECK(a.first[i].dst == b.first[i].dst);
    CHECK(a.first[i].amount == b.first[i].amount);
    CHECK(a.first[i].month == b.first[i].month);
    CHECK(a.first[i].illicit == b.first[i].illicit);
  }

  const auto dir = std::filesystem::temp_directory_path() / "fraudbench_det_test";
  std::filesystem::remove_all(dir);
  export_dataset(dir / "a", a.first, a.second);
  export_dataset(dir / "b", b.first, b.second);
  CHECK(slurp(dir / "a" / "transactions.csv") == slurp(dir / "b" / "transactions.csv"));
  CHECK(slurp(dir / "a" / "accounts.csv") == slurp(dir / "b" / "accounts.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("crossing schedule evaluates the linear formulas") {
  const auto schedule = default_crossing_schedule(12);
  CHECK(mean_at(schedule, 0, 1) == 100.0);
  CHECK(mean_at(schedule, 1, 1) == 640.0);
  CHECK(mean_at(schedule, 0, 8) == 415.0);
  CHECK(mean_at(schedule, 1, 8) == 395.0);
  CHECK(mean_at(schedule, 0, 12) == 595.0);
  CHECK(mean_at(schedule, 1, 12) == 255.0);
  CHECK_THROWS_AS(mean_at(schedule, 0, 13), RangeError);
  CHECK_THROWS_AS(mean_at(schedule, 0, 0), RangeError);
  CHECK_THROWS_AS(mean_at(schedule, 2, 1), RangeError);
}

TEST_CASE("crossing schedule changes sign exactly once, after month 7") {
  const auto schedule = default_crossing_schedule(12);
  int sign_changes = 0;
  for (int m = 1; m <= 12; ++m) {
    const double diff = mean_at(schedule, 0, m) - mean_at(schedule, 1, m);
    CHECK(diff != 0.0);
    if (m <= 7) CHECK(diff < 0.0);
    if (m >= 8) CHECK(diff > 0.0);
    if (m > 1) {
      const double prev = mean_at(schedule, 0, m - 1) - mean_at(schedule, 1, m - 1);
      if (prev < 0.0 && diff > 0.0) ++sign_changes;
    }
  }
  CHECK(sign_changes == 1);
}

TEST_CASE("crossing schedule rejects horizons that miss the crossing") {
  CHECK_THROWS_AS(default_crossing_schedule(7), RangeError);
}

TEST_CASE("monthly_means handles singleton and two-point cells") {
  TransactionLog log;
  log.push_back({0, 0, 1, 50.0, 3, 0, false});
  auto rows = monthly_means(log);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].month == 3);
  CHECK(rows[0].label_class == 0);
  CHECK(rows[0].mean_amount == 50.0);
  CHECK(rows[0].count == 1);

  log.clear();
  log.push_back({0, 0, 1, 10.0, 1, 0, false});
  log.push_back({1, 1, 2, 30.0, 1, 0, false});
  rows = monthly_means(log);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].mean_amount == 20.0);
  CHECK(rows[0].count == 2);

  CHECK_THROWS_AS(monthly_means(TransactionLog{}), EmptyLogError);
}

TEST_CASE("drifted generation tracks the schedule within 3 standard errors") {
  SimConfig cfg = imbalanced_config();
  cfg.drift = default_crossing_schedule(12);
  const auto [log, accounts] = generate(cfg);
  const auto rows = monthly_means(log);
  CHECK(rows.size() == 24);
  for (const auto& row : rows) {
    const double mean = mean_at(*cfg.drift, row.label_class, row.month);
    const double sigma = cfg.amount.cv * mean;
    const double limit = 3.0 * sigma / std::sqrt(static_cast<double>(row.count));
    CHECK(std::abs(row.mean_amount - mean) < limit);
  }
}

TEST_CASE("typology patterns have the advertised shapes") {
  auto single_typology = [](TypologyKind kind, int members, int tx_count) {
    SimConfig cfg;
    cfg.legit_accounts = 10;
    cfg.illicit_accounts = 12;
    cfg.legit_transactions = 0;
    cfg.illicit_transactions = tx_count;
    cfg.months = 12;
    cfg.seed = 3;
    cfg.typologies = {{kind, members, 1, false}};
    return generate(cfg).first;
  };

  SUBCASE("fan_in shares one destination across k-1 distinct sources") {
    const auto log = single_typology(TypologyKind::fan_in, 5, 4);
    REQUIRE(log.size() == 4);
    std::set<std::int32_t> sources;
    for (const auto& tx : log) {
      CHECK(tx.illicit);
      CHECK(tx.src >= 10);
      CHECK(tx.dst == log.front().dst);
      sources.insert(tx.src);
    }
    CHECK(sources.size() == 4);
    CHECK_FALSE(sources.count(log.front().dst));
  }

  SUBCASE("fan_out mirrors fan_in") {
    const auto log = single_typology(TypologyKind::fan_out, 5, 4);
    REQUIRE(log.size() == 4);
    std::set<std::int32_t> destinations;
    for (const auto& tx : log) {
      CHECK(tx.src == log.front().src);
      destinations.insert(tx.dst);
    }
    CHECK(destinations.size() == 4);
  }

  SUBCASE("cycle closes a directed loop through every member") {
    const auto log = single_typology(TypologyKind::cycle, 6, 6);
    REQUIRE(log.size() == 6);
    std::map<std::int32_t, std::int32_t> next;
    for (const auto& tx : log) {
      CHECK_FALSE(next.count(tx.src));  // out-degree 1
      next[tx.src] = tx.dst;
    }
    REQUIRE(next.size() == 6);
    auto node = next.begin()->first;
    std::set<std::int32_t> visited;
    for (int i = 0; i < 6; ++i) {
      CHECK_FALSE(visited.count(node));  // in-degree 1, no short loops
      visited.insert(node);
      node = next.at(node);
    }
    CHECK(node == next.begin()->first);
  }
}

TEST_CASE("burst instances land all transactions in one month") {
  SimConfig cfg;
  cfg.legit_accounts = 2;
  cfg.illicit_accounts = 8;
  cfg.legit_transactions = 0;
  cfg.illicit_transactions = 7;
  cfg.months = 12;
  cfg.seed = 11;
  cfg.typologies = {{TypologyKind::fan_in, 8, 1, true}};
  const auto [log, accounts] = generate(cfg);
  REQUIRE(log.size() == 7);
  for (const auto& tx : log) CHECK(tx.month == log.front().month);
}

TEST_CASE("configuration errors carry field names") {
  SimConfig cfg = balanced_config();
  cfg.legit_accounts = -1;
  CHECK_THROWS_WITH_AS(generate(cfg), doctest::Contains("legit_accounts"), ConfigError);

  cfg = balanced_config();
  cfg.amount.cv = 0.0;
  CHECK_THROWS_WITH_AS(generate(cfg), doctest::Contains("cv"), ConfigError);

  cfg = balanced_config();
  cfg.drift = DriftSchedule{{1.0}, {1.0}};
  CHECK_THROWS_WITH_AS(generate(cfg), doctest::Contains("drift"), ConfigError);

  cfg = balanced_config();
  cfg.typologies = {{TypologyKind::cycle, 2, 1, false}};
  CHECK_THROWS_AS(generate(cfg), ConfigError);

  cfg = balanced_config();
  cfg.illicit_transactions = 3;  // typology mix demands more than the budget
  cfg.typologies = {{TypologyKind::fan_in, 5, 1, false}};
  CHECK_THROWS_AS(generate(cfg), ConfigError);
}

TEST_CASE("typologies larger than the illicit population raise CapacityError") {
  SimConfig cfg;
  cfg.legit_accounts = 10;
  cfg.illicit_accounts = 3;
  cfg.illicit_transactions = 4;
  cfg.seed = 0;
  cfg.typologies = {{TypologyKind::fan_in, 5, 1, false}};
  CHECK_THROWS_AS(generate(cfg), CapacityError);
}

TEST_CASE("json codec is strict about keys") {
  CHECK_THROWS_AS(sim_config_from_json(R"({"legit_accounts": 1})"), ConfigError);
  CHECK_THROWS_AS(sim_config_from_json(R"({
    "legit_accounts": 10, "illicit_accounts": 5,
    "legit_transactions": 0, "illicit_transactions": 0,
    "seed": 1, "amount": {"legit_mean": 1.0, "illicit_mean": 1.0},
    "unexpected": true
  })"),
                  ConfigError);
  CHECK_THROWS_AS(sim_config_from_json("not json"), SchemaError);

  const auto cfg = sim_config_from_json(R"({
    "legit_accounts": 950, "illicit_accounts": 50,
    "legit_transactions": 9500, "illicit_transactions": 500,
    "seed": 7, "amount": {"legit_mean": 100.0, "illicit_mean": 100.0}
  })");
  CHECK(cfg.months == 12);
  CHECK(cfg.amount.cv == 0.5);
  CHECK_FALSE(cfg.drift.has_value());
  // Absent typologies select the default mix: 50 fan-in, 50 fan-out, 20 cycles.
  REQUIRE(cfg.typologies.size() == 3);
  CHECK(cfg.typologies[0].instances == 50);
  CHECK(cfg.typologies[1].instances == 50);
  CHECK(cfg.typologies[2].instances == 20);
  std::int64_t typology_tx = 0;
  for (const auto& t : cfg.typologies)
    typology_tx += static_cast<std::int64_t>(t.instances) *
                   (t.kind == TypologyKind::cycle ? t.member_count : t.member_count - 1);
  CHECK(typology_tx == 500);
}

TEST_CASE("json round trip preserves the config") {
  SimConfig cfg = imbalanced_config();
  cfg.drift = default_crossing_schedule(12);
  const auto parsed = sim_config_from_json(sim_config_to_json(cfg));
  CHECK(parsed.legit_accounts == cfg.legit_accounts);
  CHECK(parsed.illicit_accounts == cfg.illicit_accounts);
  CHECK(parsed.months == cfg.months);
  CHECK(parsed.seed == cfg.seed);
  CHECK(parsed.amount.cv == cfg.amount.cv);
  REQUIRE(parsed.drift.has_value());
  CHECK(parsed.drift->legit_means == cfg.drift->legit_means);
  REQUIRE(parsed.typologies.size() == cfg.typologies.size());
  for (std::size_t i = 0; i < cfg.typologies.size(); ++i) {
    CHECK(parsed.typologies[i].kind == cfg.typologies[i].kind);
    CHECK(parsed.typologies[i].member_count == cfg.typologies[i].member_count);
    CHECK(parsed.typologies[i].instances == cfg.typologies[i].instances);
  }
}
