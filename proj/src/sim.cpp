#include "fraudbench/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fraudbench/error.hpp"
#include "fraudbench/rng.hpp"
#include "json_util.hpp"

namespace fraudbench {

namespace {

int typology_tx_count(const TypologySpec& spec) {
  return spec.kind == TypologyKind::cycle ? spec.member_count : spec.member_count - 1;
}

void validate(const SimConfig& cfg) {
  if (cfg.legit_accounts < 0) throw ConfigError("legit_accounts", "must be >= 0");
  if (cfg.illicit_accounts < 0) throw ConfigError("illicit_accounts", "must be >= 0");
  if (cfg.legit_transactions < 0) throw ConfigError("legit_transactions", "must be >= 0");
  if (cfg.illicit_transactions < 0) throw ConfigError("illicit_transactions", "must be >= 0");
  if (cfg.months < 1) throw ConfigError("months", "must be >= 1");
  if (!(cfg.amount.cv > 0.0)) throw ConfigError("amount.cv", "must be > 0");
  if (!(cfg.amount.legit_mean > 0.0)) throw ConfigError("amount.legit_mean", "must be > 0");
  if (!(cfg.amount.illicit_mean > 0.0))
    throw ConfigError("amount.illicit_mean", "must be > 0");
  if (cfg.drift) {
    const auto& d = *cfg.drift;
    if (d.legit_means.size() != d.illicit_means.size())
      throw ConfigError("drift", "legit_means and illicit_means differ in length");
    if (static_cast<int>(d.legit_means.size()) != cfg.months)
      throw ConfigError("drift", "curves must span exactly 'months' entries");
    for (double v : d.legit_means)
      if (!(v > 0.0)) throw ConfigError("drift.legit_means", "entries must be > 0");
    for (double v : d.illicit_means)
      if (!(v > 0.0)) throw ConfigError("drift.illicit_means", "entries must be > 0");
  }
  for (const auto& t : cfg.typologies) {
    if (t.member_count < 2) throw ConfigError("typologies.member_count", "must be >= 2");
    if (t.kind == TypologyKind::cycle && t.member_count < 3)
      throw ConfigError("typologies.member_count", "cycle requires >= 3 members");
    if (t.instances < 1) throw ConfigError("typologies.instances", "must be >= 1");
  }
  if (cfg.legit_transactions > 0 && cfg.legit_accounts < 2)
    throw ConfigError("legit_accounts", "need >= 2 when legit_transactions > 0");
  for (const auto& t : cfg.typologies) {
    if (t.member_count > cfg.illicit_accounts)
      throw CapacityError("typology demands " + std::to_string(t.member_count) +
                          " members but only " + std::to_string(cfg.illicit_accounts) +
                          " illicit accounts exist");
  }
  std::int64_t typology_budget = 0;
  for (const auto& t : cfg.typologies)
    typology_budget += static_cast<std::int64_t>(t.instances) * typology_tx_count(t);
  if (typology_budget > cfg.illicit_transactions)
    throw ConfigError("typologies", "instances require " + std::to_string(typology_budget) +
                                        " transactions, budget is " +
                                        std::to_string(cfg.illicit_transactions));
  if (cfg.illicit_transactions > typology_budget) {
    if (cfg.illicit_accounts < 1)
      throw ConfigError("illicit_accounts", "need >= 1 when illicit_transactions > 0");
    if (cfg.legit_accounts + cfg.illicit_accounts < 2)
      throw ConfigError("illicit_accounts", "need >= 2 accounts overall for transactions");
  }
}

double class_mean(const SimConfig& cfg, int label_class, int month) {
  if (cfg.drift) return mean_at(*cfg.drift, label_class, month);
  return label_class == 1 ? cfg.amount.illicit_mean : cfg.amount.legit_mean;
}

double draw_amount(const SimConfig& cfg, Rng& rng, int label_class, int month) {
  const double mean = class_mean(cfg, label_class, month);
  const double raw = rng.lognormal(mean, cfg.amount.cv);
  const double cents = static_cast<double>(std::llround(raw * 100.0)) / 100.0;
  return cents < 0.01 ? 0.01 : cents;
}

// Uniform counterparty over all accounts except src.
std::int32_t draw_other(Rng& rng, std::int64_t total, std::int32_t src) {
  auto d = static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(total - 1)));
  if (d >= src) ++d;
  return static_cast<std::int32_t>(d);
}

// First k entries of a seed-shuffled selection from [base, base + n).
std::vector<std::int32_t> sample_distinct(Rng& rng, std::int64_t base, std::int64_t n,
                                          int k) {
  std::vector<std::int32_t> pool(n);
  for (std::int64_t i = 0; i < n; ++i) pool[i] = static_cast<std::int32_t>(base + i);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::int64_t>(
                           rng.uniform_int(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

std::int64_t AccountTable::count_label(int label) const {
  return std::count(labels.begin(), labels.end(), static_cast<std::int8_t>(label));
}

double mean_at(const DriftSchedule& schedule, int label_class, int month) {
  if (label_class != 0 && label_class != 1)
    throw RangeError("label_class must be 0 or 1, got " + std::to_string(label_class));
  if (month < 1 || month > schedule.months())
    throw RangeError("month " + std::to_string(month) + " outside schedule of " +
                     std::to_string(schedule.months()) + " months");
  const auto& curve = label_class == 1 ? schedule.illicit_means : schedule.legit_means;
  return curve[month - 1];
}

DriftSchedule default_crossing_schedule(int months) {
  // legit overtakes illicit between months 7 and 8 (difference root at 7.75),
  // so the horizon must reach month 8; past month 19 the illicit curve would
  // go non-positive.
  if (months < 8)
    throw RangeError("crossing schedule needs months >= 8, got " + std::to_string(months));
  if (months > 19)
    throw RangeError("crossing schedule supports at most 19 months, got " +
                     std::to_string(months));
  DriftSchedule schedule;
  schedule.legit_means.resize(months);
  schedule.illicit_means.resize(months);
  for (int m = 1; m <= months; ++m) {
    schedule.legit_means[m - 1] = 100.0 + 45.0 * (m - 1);
    schedule.illicit_means[m - 1] = 640.0 - 35.0 * (m - 1);
  }
  return schedule;
}

std::vector<TypologySpec> default_typology_mix(std::int64_t illicit_transactions,
                                               std::int64_t illicit_accounts) {
  std::vector<TypologySpec> mix;
  if (illicit_transactions <= 0 || illicit_accounts < 5) return mix;
  const std::int64_t fan_budget = illicit_transactions * 2 / 5;
  const std::int64_t cycle_budget = illicit_transactions / 5;
  const auto fan_instances = static_cast<int>(fan_budget / 4);   // 5 members, 4 tx
  const auto cycle_instances = static_cast<int>(cycle_budget / 5);
  if (fan_instances > 0)
    mix.push_back({TypologyKind::fan_in, 5, fan_instances, false});
  if (fan_instances > 0)
    mix.push_back({TypologyKind::fan_out, 5, fan_instances, false});
  if (cycle_instances > 0)
    mix.push_back({TypologyKind::cycle, 5, cycle_instances, false});
  return mix;
}

std::pair<TransactionLog, AccountTable> generate(const SimConfig& cfg) {
  validate(cfg);

  const std::int64_t legit = cfg.legit_accounts;
  const std::int64_t total_accounts = cfg.legit_accounts + cfg.illicit_accounts;

  AccountTable accounts;
  accounts.labels.assign(total_accounts, 0);
  for (std::int64_t i = legit; i < total_accounts; ++i) accounts.labels[i] = 1;

  Rng typology_rng(cfg.seed, streams::kTypologies);
  Rng month_rng(cfg.seed, streams::kMonths);
  Rng amount_rng(cfg.seed, streams::kAmounts);
  Rng counterparty_rng(cfg.seed, streams::kCounterparties);

  auto draw_month = [&] {
    return static_cast<std::int32_t>(
        1 + month_rng.uniform_int(static_cast<std::uint64_t>(cfg.months)));
  };

  TransactionLog log;
  log.reserve(cfg.legit_transactions + cfg.illicit_transactions);

  auto emit = [&](std::int32_t src, std::int32_t dst, std::int32_t month, bool illicit) {
    Transaction tx;
    tx.src = src;
    tx.dst = dst;
    tx.month = month;
    tx.amount = draw_amount(cfg, amount_rng, illicit ? 1 : 0, month);
    tx.illicit = illicit;
    log.push_back(tx);
  };

  // Typology instances first, on illicit accounts only.
  std::int64_t illicit_emitted = 0;
  for (const auto& t : cfg.typologies) {
    for (int instance = 0; instance < t.instances; ++instance) {
      const auto members =
          sample_distinct(typology_rng, legit, cfg.illicit_accounts, t.member_count);
      const std::int32_t burst_month = t.burst ? draw_month() : 0;
      auto member_month = [&] { return t.burst ? burst_month : draw_month(); };
      switch (t.kind) {
        case TypologyKind::fan_in:
          for (int i = 1; i < t.member_count; ++i)
            emit(members[i], members[0], member_month(), true);
          break;
        case TypologyKind::fan_out:
          for (int i = 1; i < t.member_count; ++i)
            emit(members[0], members[i], member_month(), true);
          break;
        case TypologyKind::cycle:
          for (int i = 0; i < t.member_count; ++i)
            emit(members[i], members[(i + 1) % t.member_count], member_month(), true);
          break;
      }
      illicit_emitted += typology_tx_count(t);
    }
  }

  // Remaining illicit budget: random illicit-source transactions.
  for (std::int64_t i = illicit_emitted; i < cfg.illicit_transactions; ++i) {
    const auto src = static_cast<std::int32_t>(
        legit + counterparty_rng.uniform_int(static_cast<std::uint64_t>(cfg.illicit_accounts)));
    emit(src, draw_other(counterparty_rng, total_accounts, src), draw_month(), true);
  }

  // Legitimate traffic.
  for (std::int64_t i = 0; i < cfg.legit_transactions; ++i) {
    const auto src = static_cast<std::int32_t>(
        counterparty_rng.uniform_int(static_cast<std::uint64_t>(legit)));
    emit(src, draw_other(counterparty_rng, total_accounts, src), draw_month(), false);
  }

  std::stable_sort(log.begin(), log.end(),
                   [](const Transaction& a, const Transaction& b) { return a.month < b.month; });
  for (std::size_t i = 0; i < log.size(); ++i) log[i].tx_id = static_cast<std::int64_t>(i);

  return {std::move(log), std::move(accounts)};
}

std::vector<MonthlyMeanRow> monthly_means(const TransactionLog& log) {
  if (log.empty()) throw EmptyLogError("monthly_means on an empty transaction log");
  std::map<std::pair<int, int>, std::pair<double, std::int64_t>> cells;
  for (const auto& tx : log) {
    auto& cell = cells[{tx.month, tx.illicit ? 1 : 0}];
    cell.first += tx.amount;
    cell.second += 1;
  }
  std::vector<MonthlyMeanRow> rows;
  rows.reserve(cells.size());
  for (const auto& [key, cell] : cells) {
    rows.push_back({key.first, key.second, cell.first / static_cast<double>(cell.second),
                    cell.second});
  }
  return rows;
}

namespace {

using detail::json;

TypologyKind typology_kind_from_string(const std::string& name) {
  if (name == "fan_in") return TypologyKind::fan_in;
  if (name == "fan_out") return TypologyKind::fan_out;
  if (name == "cycle") return TypologyKind::cycle;
  throw ConfigError("typologies.kind", "unknown kind '" + name + "'");
}

const char* to_string(TypologyKind kind) {
  switch (kind) {
    case TypologyKind::fan_in: return "fan_in";
    case TypologyKind::fan_out: return "fan_out";
    case TypologyKind::cycle: return "cycle";
  }
  return "fan_in";
}

}  // namespace

SimConfig sim_config_from_json(const std::string& text) {
  using namespace detail;
  const json root = parse_or_throw(text, "sim config");
  if (!root.is_object()) throw SchemaError("sim config: top level must be an object");
  reject_unknown_keys(root, "",
                      {"legit_accounts", "illicit_accounts", "legit_transactions",
                       "illicit_transactions", "months", "seed", "amount", "drift",
                       "typologies"});

  SimConfig cfg;
  cfg.legit_accounts = get_int(require(root, "", "legit_accounts"), "legit_accounts");
  cfg.illicit_accounts = get_int(require(root, "", "illicit_accounts"), "illicit_accounts");
  cfg.legit_transactions =
      get_int(require(root, "", "legit_transactions"), "legit_transactions");
  cfg.illicit_transactions =
      get_int(require(root, "", "illicit_transactions"), "illicit_transactions");
  if (const json* v = find(root, "months"))
    cfg.months = static_cast<int>(get_int(*v, "months"));
  cfg.seed = get_uint(require(root, "", "seed"), "seed");

  const json& amount = require(root, "", "amount");
  if (!amount.is_object()) throw ConfigError("amount", "expected an object");
  reject_unknown_keys(amount, "amount", {"legit_mean", "illicit_mean", "cv"});
  cfg.amount.legit_mean =
      get_number<double>(require(amount, "amount", "legit_mean"), "amount.legit_mean");
  cfg.amount.illicit_mean =
      get_number<double>(require(amount, "amount", "illicit_mean"), "amount.illicit_mean");
  if (const json* v = find(amount, "cv")) cfg.amount.cv = get_number<double>(*v, "amount.cv");

  if (const json* drift = find(root, "drift")) {
    if (!drift->is_object()) throw ConfigError("drift", "expected an object");
    reject_unknown_keys(*drift, "drift", {"enabled", "legit_means", "illicit_means"});
    if (get_bool(require(*drift, "drift", "enabled"), "drift.enabled")) {
      auto read_curve = [&](const char* key) {
        const json& arr = require(*drift, "drift", key);
        if (!arr.is_array())
          throw ConfigError(std::string("drift.") + key, "expected an array");
        std::vector<double> curve;
        for (const json& v : arr)
          curve.push_back(get_number<double>(v, std::string("drift.") + key));
        return curve;
      };
      DriftSchedule schedule;
      schedule.legit_means = read_curve("legit_means");
      schedule.illicit_means = read_curve("illicit_means");
      cfg.drift = std::move(schedule);
    }
  }

  if (const json* typologies = find(root, "typologies")) {
    if (!typologies->is_array()) throw ConfigError("typologies", "expected an array");
    for (const json& t : *typologies) {
      if (!t.is_object()) throw ConfigError("typologies", "entries must be objects");
      reject_unknown_keys(t, "typologies", {"kind", "member_count", "instances", "burst"});
      TypologySpec spec;
      spec.kind = typology_kind_from_string(
          get_string(require(t, "typologies", "kind"), "typologies.kind"));
      spec.member_count = static_cast<int>(
          get_int(require(t, "typologies", "member_count"), "typologies.member_count"));
      spec.instances = static_cast<int>(
          get_int(require(t, "typologies", "instances"), "typologies.instances"));
      if (const json* v = find(t, "burst")) spec.burst = get_bool(*v, "typologies.burst");
      cfg.typologies.push_back(spec);
    }
  } else {
    cfg.typologies = default_typology_mix(cfg.illicit_transactions, cfg.illicit_accounts);
  }
  return cfg;
}

SimConfig sim_config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sim_config_from_json(buffer.str());
}

std::string sim_config_to_json(const SimConfig& cfg) {
  nlohmann::ordered_json root;
  root["legit_accounts"] = cfg.legit_accounts;
  root["illicit_accounts"] = cfg.illicit_accounts;
  root["legit_transactions"] = cfg.legit_transactions;
  root["illicit_transactions"] = cfg.illicit_transactions;
  root["months"] = cfg.months;
  root["seed"] = cfg.seed;
  root["amount"] = {{"legit_mean", cfg.amount.legit_mean},
                    {"illicit_mean", cfg.amount.illicit_mean},
                    {"cv", cfg.amount.cv}};
  root["drift"]["enabled"] = cfg.drift.has_value();
  root["drift"]["legit_means"] = cfg.drift ? cfg.drift->legit_means : std::vector<double>{};
  root["drift"]["illicit_means"] =
      cfg.drift ? cfg.drift->illicit_means : std::vector<double>{};
  root["typologies"] = nlohmann::ordered_json::array();
  for (const auto& t : cfg.typologies) {
    root["typologies"].push_back({{"kind", to_string(t.kind)},
                                  {"member_count", t.member_count},
                                  {"instances", t.instances},
                                  {"burst", t.burst}});
  }
  return root.dump(2) + "\n";
}

}  // namespace fraudbench
