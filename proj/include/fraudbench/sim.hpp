#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fraudbench {

/// Per-class monthly mean transaction amounts. Entry m-1 is the mean for
/// month m; both curves span the same horizon.
struct DriftSchedule {
  std::vector<double> legit_means;
  std::vector<double> illicit_means;

  int months() const { return static_cast<int>(legit_means.size()); }
};

/// Stored monthly mean for one class; months are 1-based, no interpolation.
double mean_at(const DriftSchedule& schedule, int label_class, int month);

/// Linear schedules legit(m) = 100 + 45(m-1) and illicit(m) = 640 - 35(m-1).
/// The two curves cross once, between months 7 and 8, so any horizon of at
/// least 8 months realizes the crossing.
DriftSchedule default_crossing_schedule(int months);

enum class TypologyKind { fan_in, fan_out, cycle };

/// One structured fraud pattern to inject among illicit accounts.
/// fan_in: k-1 members pay one collector. fan_out: one source pays k-1
/// members. cycle: k payments forming a directed ring.
struct TypologySpec {
  TypologyKind kind = TypologyKind::fan_in;
  int member_count = 2;
  int instances = 1;
  bool burst = false;  // all transactions of an instance land in one month
};

struct AmountModel {
  double legit_mean = 100.0;
  double illicit_mean = 640.0;
  double cv = 0.5;  // coefficient of variation of the log-normal amount law
};

struct SimConfig {
  std::int64_t legit_accounts = 0;
  std::int64_t illicit_accounts = 0;
  std::int64_t legit_transactions = 0;
  std::int64_t illicit_transactions = 0;
  int months = 12;
  AmountModel amount;
  std::optional<DriftSchedule> drift;
  std::vector<TypologySpec> typologies;
  std::uint64_t seed = 0;
};

struct Transaction {
  std::int64_t tx_id = 0;
  std::int32_t src = 0;
  std::int32_t dst = 0;
  double amount = 0.0;  // rounded to 2 decimals, > 0
  std::int32_t month = 1;
  std::int32_t relation = 0;
  bool illicit = false;
};

using TransactionLog = std::vector<Transaction>;

/// Account id i carries labels[i]; 0 = legitimate, 1 = fraud.
struct AccountTable {
  std::vector<std::int8_t> labels;

  std::int64_t size() const { return static_cast<std::int64_t>(labels.size()); }
  std::int64_t count_label(int label) const;
};

/// Deterministic multi-agent generation: typology instances are realized
/// among illicit accounts first, the remaining illicit budget becomes
/// random illicit-source transactions, and legitimate traffic fills the
/// legit budget. Records are ordered by month, then by construction order.
/// Output is a pure function of the config, including the seed.
std::pair<TransactionLog, AccountTable> generate(const SimConfig& config);

/// 40% fan-in, 40% fan-out, 20% cycle instances of 5 members each (by
/// transaction budget, rounded down); whatever remains of the budget is
/// left to random illicit transactions. Empty when the budget is zero or
/// fewer than 5 illicit accounts exist.
std::vector<TypologySpec> default_typology_mix(std::int64_t illicit_transactions,
                                               std::int64_t illicit_accounts);

struct MonthlyMeanRow {
  int month = 0;
  int label_class = 0;  // transaction provenance: 0 legit, 1 illicit
  double mean_amount = 0.0;
  std::int64_t count = 0;
};

/// Observed per-(month, class) mean amounts, sorted by month then class.
/// Rows exist only for cells with at least one transaction.
std::vector<MonthlyMeanRow> monthly_means(const TransactionLog& log);

/// Strict JSON codec for SimConfig. Unknown keys are rejected; keys with
/// documented defaults (months, amount.cv, drift, typologies) may be
/// omitted. An absent typologies key selects default_typology_mix.
SimConfig sim_config_from_json(const std::string& text);
SimConfig sim_config_from_file(const std::string& path);
std::string sim_config_to_json(const SimConfig& config);

}  // namespace fraudbench
