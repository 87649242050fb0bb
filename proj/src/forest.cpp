#include "remp/forest.hpp"

#include "remp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace remp {

double DecisionTree::predict(std::span<const double> x) const {
  if (nodes_.empty()) return 0.0;
  int i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& n = nodes_[i];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes_[i].positive_fraction;
}

namespace {

struct Grower {
  const std::vector<std::vector<double>>& rows;
  std::span<const int> labels;
  const ForestParams& params;
  std::size_t max_features;
  std::mt19937_64& rng;
  std::vector<DecisionTree::Node>& nodes;

  double gini(std::size_t pos, std::size_t total) const {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
  }

  int grow(std::vector<std::size_t>& sample, std::size_t begin, std::size_t end,
           std::size_t depth) {
    const std::size_t count = end - begin;
    std::size_t positives = 0;
    for (std::size_t i = begin; i < end; ++i) positives += labels[sample[i]] != 0;
    const int id = static_cast<int>(nodes.size());
    nodes.push_back({});
    nodes[id].positive_fraction = static_cast<double>(positives) / static_cast<double>(count);
    if (positives == 0 || positives == count || count < params.min_samples_split ||
        depth >= params.max_depth)
      return id;

    const std::size_t d = rows[sample[begin]].size();
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), std::size_t{0});
    std::shuffle(features.begin(), features.end(), rng);

    const double parent = gini(positives, count);
    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, int>> column(count);
    std::size_t tried = 0;
    for (std::size_t f : features) {
      // Keep drawing past constant features until max_features usable ones
      // were evaluated, as long as any remain.
      if (tried >= max_features && best_feature >= 0) break;
      for (std::size_t i = 0; i < count; ++i)
        column[i] = {rows[sample[begin + i]][f], labels[sample[begin + i]]};
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;
      ++tried;
      std::size_t left_pos = 0;
      for (std::size_t i = 0; i + 1 < count; ++i) {
        left_pos += column[i].second != 0;
        if (column[i].first == column[i + 1].first) continue;
        const std::size_t nl = i + 1, nr = count - nl;
        const double child = (static_cast<double>(nl) * gini(left_pos, nl) +
                              static_cast<double>(nr) * gini(positives - left_pos, nr)) /
                             static_cast<double>(count);
        const double g = parent - child;
        if (g > best_gain) {
          best_gain = g;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (column[i].first + column[i + 1].first);
        }
      }
    }
    if (best_feature < 0) return id;

    auto mid = std::partition(sample.begin() + static_cast<std::ptrdiff_t>(begin),
                              sample.begin() + static_cast<std::ptrdiff_t>(end),
                              [&](std::size_t r) {
                                return rows[r][static_cast<std::size_t>(best_feature)] <=
                                       best_threshold;
                              });
    const auto split = static_cast<std::size_t>(mid - sample.begin());
    const int left = grow(sample, begin, split, depth + 1);
    const int right = grow(sample, split, end, depth + 1);
    nodes[id].feature = best_feature;
    nodes[id].threshold = best_threshold;
    nodes[id].left = left;
    nodes[id].right = right;
    return id;
  }
};

} // namespace

void RandomForest::fit(const std::vector<std::vector<double>>& rows, std::span<const int> labels,
                       const ForestParams& params) {
  if (rows.size() != labels.size()) throw InvalidArgument("forest: rows/labels size mismatch");
  trees_.clear();
  if (rows.empty()) return;
  const std::size_t d = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != d) throw InvalidArgument("forest: ragged feature rows");
  const std::size_t max_features =
      params.max_features > 0
          ? params.max_features
          : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
  trees_.resize(params.trees);
  for (auto& tree : trees_) {
    std::vector<std::size_t> sample(rows.size());
    for (auto& s : sample) s = pick(rng);
    Grower g{rows, labels, params, max_features, rng, tree.nodes_};
    if (d == 0) {
      std::size_t pos = 0;
      for (auto s : sample) pos += labels[s] != 0;
      tree.nodes_.push_back({-1, 0.0, -1, -1, static_cast<double>(pos) / sample.size()});
    } else {
      g.grow(sample, 0, sample.size(), 0);
    }
  }
}

double RandomForest::vote_fraction(std::span<const double> x) const {
  if (trees_.empty()) return 0.0;
  std::size_t votes = 0;
  for (const auto& t : trees_) votes += t.predict(x) > 0.5;
  return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

} // namespace remp
