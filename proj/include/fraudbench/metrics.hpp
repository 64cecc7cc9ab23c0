#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace fraudbench {

/// Confusion counts and F1 family with fraud (label 1) as the positive
/// class. Degenerate 0/0 precision or recall evaluates to 0.
struct MetricsRecord {
  double f1_class0 = 0.0;
  double f1_class1 = 0.0;
  double f1_macro = 0.0;
  double f1_fraud = 0.0;  // identical to f1_class1 by construction
  std::optional<double> auc;
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

MetricsRecord classification_metrics(const std::vector<std::int8_t>& labels,
                                     const std::vector<std::int8_t>& predicted);

/// Rank-based AUC with mid-rank tie handling, O(n log n). Equals the
/// pairwise statistic (#{s_p > s_n} + 0.5 #{s_p = s_n}) / (P * N).
double auc(const std::vector<std::int8_t>& labels, const std::vector<double>& scores);

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
};

struct AggregateSummary {
  MetricSummary f1_class0, f1_class1, f1_macro, f1_fraud;
  std::optional<MetricSummary> auc;
  int runs = 0;
};

/// Mean and sample standard deviation per metric over two or more runs.
AggregateSummary aggregate_runs(const std::vector<MetricsRecord>& records);

}  // namespace fraudbench
