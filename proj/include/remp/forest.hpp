/// @file forest.hpp
/// @brief Bagged CART ensemble (random forest) for binary classification.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace remp {

struct ForestParams {
  std::size_t trees = 100;
  /// Features tried per split; 0 means floor(sqrt(d)), at least 1.
  std::size_t max_features = 0;
  std::size_t min_samples_split = 2;
  std::size_t max_depth = 64;
  std::uint64_t seed = 42;
};

class DecisionTree {
public:
  struct Node {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double positive_fraction = 0.0;
  };

  /// Probability of the positive class as the leaf's positive fraction.
  double predict(std::span<const double> x) const;
  std::size_t node_count() const { return nodes_.size(); }

private:
  friend class RandomForest;
  std::vector<Node> nodes_;
};

/// Each tree is grown on a bootstrap sample with Gini splits over a random
/// feature subset; prediction is the majority vote of the trees.
class RandomForest {
public:
  RandomForest() = default;

  /// `rows` are feature vectors of equal length; labels are 0/1.
  void fit(const std::vector<std::vector<double>>& rows, std::span<const int> labels,
           const ForestParams& params = {});

  /// Fraction of trees voting positive.
  double vote_fraction(std::span<const double> x) const;
  /// Strict majority of positive votes.
  bool predict(std::span<const double> x) const { return vote_fraction(x) > 0.5; }
  std::size_t tree_count() const { return trees_.size(); }

private:
  std::vector<DecisionTree> trees_;
};

} // namespace remp
