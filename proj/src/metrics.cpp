#include "fraudbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fraudbench/error.hpp"

namespace fraudbench {

namespace {

double f1_from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  const double precision =
      tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall =
      tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

}  // namespace

MetricsRecord classification_metrics(const std::vector<std::int8_t>& labels,
                                     const std::vector<std::int8_t>& predicted) {
  if (labels.empty() || labels.size() != predicted.size())
    throw LengthMismatchError("labels and predictions must have equal nonzero length");
  MetricsRecord record;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if ((labels[i] != 0 && labels[i] != 1) || (predicted[i] != 0 && predicted[i] != 1))
      throw ValueError("labels and predictions must be 0 or 1");
    if (labels[i] == 1)
      predicted[i] == 1 ? ++record.tp : ++record.fn;
    else
      predicted[i] == 1 ? ++record.fp : ++record.tn;
  }
  record.f1_class1 = f1_from_counts(record.tp, record.fp, record.fn);
  record.f1_class0 = f1_from_counts(record.tn, record.fn, record.fp);
  record.f1_macro = 0.5 * (record.f1_class0 + record.f1_class1);
  record.f1_fraud = record.f1_class1;
  return record;
}

double auc(const std::vector<std::int8_t>& labels, const std::vector<double>& scores) {
  if (labels.size() != scores.size())
    throw LengthMismatchError("labels and scores must have equal length");
  std::int64_t positives = 0, negatives = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw ValueError("labels must be 0 or 1");
    if (!std::isfinite(scores[i])) throw ValueError("scores must be finite");
    labels[i] == 1 ? ++positives : ++negatives;
  }
  if (positives == 0 || negatives == 0)
    throw OneClassError("AUC needs both classes present");

  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mid-rank over tie groups; ranks are 1-based.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) positive_rank_sum += mid_rank;
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

AggregateSummary aggregate_runs(const std::vector<MetricsRecord>& records) {
  if (records.size() < 2)
    throw TooFewRunsError("aggregation needs at least 2 runs, got " +
                          std::to_string(records.size()));

  auto summarize = [&](auto&& take) {
    MetricSummary s;
    const double n = static_cast<double>(records.size());
    for (const auto& r : records) s.mean += take(r);
    s.mean /= n;
    double ss = 0.0;
    for (const auto& r : records) {
      const double d = take(r) - s.mean;
      ss += d * d;
    }
    s.stddev = std::sqrt(ss / (n - 1.0));
    return s;
  };

  AggregateSummary agg;
  agg.runs = static_cast<int>(records.size());
  agg.f1_class0 = summarize([](const MetricsRecord& r) { return r.f1_class0; });
  agg.f1_class1 = summarize([](const MetricsRecord& r) { return r.f1_class1; });
  agg.f1_macro = summarize([](const MetricsRecord& r) { return r.f1_macro; });
  agg.f1_fraud = summarize([](const MetricsRecord& r) { return r.f1_fraud; });

  const bool any_auc =
      std::any_of(records.begin(), records.end(), [](const auto& r) { return r.auc.has_value(); });
  if (any_auc) {
    const bool all_auc = std::all_of(records.begin(), records.end(),
                                     [](const auto& r) { return r.auc.has_value(); });
    if (!all_auc) throw ValueError("auc set on some runs but not all");
    agg.auc = summarize([](const MetricsRecord& r) { return *r.auc; });
  }
  return agg;
}

}  // namespace fraudbench
