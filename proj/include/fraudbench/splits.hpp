#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "fraudbench/graph.hpp"

namespace fraudbench {

enum class SplitTag : std::uint8_t { train = 0, validation = 1, test = 2, excluded = 3 };

const char* to_string(SplitTag tag);

struct SplitAssignment {
  std::vector<SplitTag> tags;

  std::int64_t count(SplitTag tag) const;
  std::vector<char> mask(SplitTag tag) const;
};

/// Class-stratified 3-way split. Within each class, node ids are shuffled
/// deterministically by the seed and cut with largest-remainder rounding,
/// so every part's per-class count is within 1 of the exact proportion.
SplitAssignment stratified_split(const std::vector<std::int8_t>& labels,
                                 const std::array<double, 3>& ratios, std::uint64_t seed);

struct WindowDataset {
  WindowSpec window;
  MultiGraph graph;
  NodeTable nodes;
};

/// One (graph, features) dataset per window, train first. Windows must be
/// ordered and disjoint. Labels are identical across windows; nodes
/// inactive in a window carry active = false there and are excluded from
/// evaluation.
std::vector<WindowDataset> temporal_windows(const TransactionLog& log,
                                            const AccountTable& accounts, WindowSpec train,
                                            const std::vector<WindowSpec>& tests);

void export_splits(const std::filesystem::path& file, const SplitAssignment& split);

}  // namespace fraudbench
