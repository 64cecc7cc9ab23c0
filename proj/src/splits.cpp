#include "fraudbench/splits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "fraudbench/error.hpp"
#include "fraudbench/rng.hpp"

namespace fraudbench {

const char* to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::train: return "train";
    case SplitTag::validation: return "validation";
    case SplitTag::test: return "test";
    case SplitTag::excluded: return "excluded";
  }
  return "excluded";
}

std::int64_t SplitAssignment::count(SplitTag tag) const {
  return std::count(tags.begin(), tags.end(), tag);
}

std::vector<char> SplitAssignment::mask(SplitTag tag) const {
  std::vector<char> m(tags.size(), 0);
  for (std::size_t i = 0; i < tags.size(); ++i) m[i] = tags[i] == tag ? 1 : 0;
  return m;
}

namespace {

// Largest-remainder apportionment of n into three parts. Remainder ties go
// to the earlier part (train, then validation, then test).
std::array<std::int64_t, 3> apportion(std::int64_t n, const std::array<double, 3>& ratios) {
  std::array<std::int64_t, 3> counts{};
  std::array<double, 3> remainders{};
  std::int64_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const double exact = static_cast<double>(n) * ratios[k];
    counts[k] = static_cast<std::int64_t>(std::floor(exact));
    remainders[k] = exact - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainders[a] > remainders[b]; });
  for (std::int64_t left = n - assigned, k = 0; left > 0; --left, ++k)
    ++counts[order[static_cast<std::size_t>(k % 3)]];
  return counts;
}

}  // namespace

SplitAssignment stratified_split(const std::vector<std::int8_t>& labels,
                                 const std::array<double, 3>& ratios, std::uint64_t seed) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw RatioError("split ratios must all be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw RatioError("split ratios must sum to 1");

  std::array<std::vector<std::int32_t>, 2> members;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw ValueError("labels must be 0 or 1");
    members[labels[i]].push_back(static_cast<std::int32_t>(i));
  }
  for (int c = 0; c < 2; ++c) {
    if (members[c].size() < 3)
      throw TinyClassError("class " + std::to_string(c) + " has only " +
                           std::to_string(members[c].size()) + " members, need >= 3");
  }

  SplitAssignment split;
  split.tags.resize(labels.size());
  for (int c = 0; c < 2; ++c) {
    Rng rng(seed, streams::kSplit + static_cast<std::uint64_t>(c));
    rng.shuffle(members[c]);
    const auto counts = apportion(static_cast<std::int64_t>(members[c].size()), ratios);
    std::size_t at = 0;
    const SplitTag order[3] = {SplitTag::train, SplitTag::validation, SplitTag::test};
    for (int k = 0; k < 3; ++k) {
      for (std::int64_t j = 0; j < counts[k]; ++j, ++at)
        split.tags[members[c][at]] = order[k];
    }
  }
  return split;
}

std::vector<WindowDataset> temporal_windows(const TransactionLog& log,
                                            const AccountTable& accounts, WindowSpec train,
                                            const std::vector<WindowSpec>& tests) {
  std::vector<WindowSpec> all;
  all.push_back(train);
  all.insert(all.end(), tests.begin(), tests.end());
  for (const auto& w : all) {
    if (w.first_month < 1 || w.first_month > w.last_month)
      throw RangeError("invalid window [" + std::to_string(w.first_month) + ", " +
                       std::to_string(w.last_month) + "]");
  }
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].first_month <= all[i - 1].last_month)
      throw OverlapError("windows [" + std::to_string(all[i - 1].first_month) + ", " +
                         std::to_string(all[i - 1].last_month) + "] and [" +
                         std::to_string(all[i].first_month) + ", " +
                         std::to_string(all[i].last_month) + "] must be ordered and disjoint");
  }

  std::vector<WindowDataset> datasets;
  datasets.reserve(all.size());
  for (const auto& w : all) {
    WindowDataset ds;
    ds.window = w;
    ds.graph = build_graph(log, accounts, w);
    ds.nodes = extract_features(log, accounts, w);
    datasets.push_back(std::move(ds));
  }
  return datasets;
}

void export_splits(const std::filesystem::path& file, const SplitAssignment& split) {
  std::FILE* out = std::fopen(file.string().c_str(), "wb");
  if (!out) throw IoError("cannot open for writing: " + file.string());
  std::fputs("node_id,tag\n", out);
  for (std::size_t i = 0; i < split.tags.size(); ++i) {
    std::fprintf(out, "%zu,%s\n", i, to_string(split.tags[i]));
  }
  std::fclose(out);
}

}  // namespace fraudbench
