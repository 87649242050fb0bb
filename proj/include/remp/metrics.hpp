/// @file metrics.hpp
/// @brief Gold standards, match files and evaluation metrics.

#pragma once

#include "remp/candidates.hpp"

#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace remp {

/// A pair of entity names (KB1 side, KB2 side).
using NamedPair = std::pair<std::string, std::string>;
using NamedPairSet = std::set<NamedPair>;

/// Reads the first two tab-separated columns of every non-comment line.
/// Used for gold files and for prediction files alike.
NamedPairSet load_pair_file(const std::filesystem::path& file);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t true_positives = 0;
};

/// Precision is 0 for an empty prediction; recall is 0 for an empty gold set.
Metrics evaluate(const NamedPairSet& predicted, const NamedPairSet& gold);

/// 1 - retained / candidates (0 when there are no candidates).
double reduction_ratio(std::size_t retained, std::size_t candidates);

/// Fraction of gold pairs found in `pairs` (0 for an empty gold set).
double pair_completeness(std::span<const EntityPair> pairs, const KnowledgeBase& kb1,
                         const KnowledgeBase& kb2, const NamedPairSet& gold);

} // namespace remp
