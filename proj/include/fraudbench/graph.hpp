#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "fraudbench/sim.hpp"

namespace fraudbench {

/// Inclusive 1-based month range.
struct WindowSpec {
  int first_month = 1;
  int last_month = 1;

  bool contains(int month) const { return month >= first_month && month <= last_month; }
};

struct Edge {
  std::int32_t src = 0;
  std::int32_t dst = 0;
  std::int64_t weight = 1;  // transaction multiplicity within the window
};

/// Directed multi-relational graph over account nodes. Each relation holds
/// at most one edge per ordered (src, dst) pair, sorted by (src, dst).
struct MultiGraph {
  std::int64_t node_count = 0;
  std::vector<std::vector<Edge>> relations;

  int relation_count() const { return static_cast<int>(relations.size()); }
  std::int64_t total_edge_weight() const;
};

constexpr int kFeatureCount = 14;

/// Per-node feature matrix, static labels and window activity flags.
/// Feature order: in_count, out_count, total_in, total_out, mean_in,
/// mean_out, std_in, std_out, max_in, max_out, min_in, min_out,
/// distinct_counterparties, active_month_count. Empty aggregates are 0.
struct NodeTable {
  Eigen::MatrixXd features;
  std::vector<std::int8_t> labels;
  std::vector<char> active;
};

MultiGraph build_graph(const TransactionLog& log, const AccountTable& accounts,
                       WindowSpec window);

NodeTable extract_features(const TransactionLog& log, const AccountTable& accounts,
                           WindowSpec window);

/// Majority-over-minority label ratio |legitimate| / |fraud|. Throws
/// UndefinedRatioError when no fraud labels are present.
double imbalance_ratio(const std::vector<std::int8_t>& labels);

struct Dataset {
  TransactionLog log;
  AccountTable accounts;
  std::optional<NodeTable> features;
  int months = 0;  // largest month stamp seen in the log
};

/// Writes accounts.csv, transactions.csv and optionally features.csv.
/// Output is byte-deterministic for identical inputs.
void export_dataset(const std::filesystem::path& dir, const TransactionLog& log,
                    const AccountTable& accounts, const NodeTable* features = nullptr);

/// Strict loader for the CSV dataset schema; also accepts externally
/// converted datasets. Schema violations raise SchemaError with file and
/// line diagnostics.
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace fraudbench
