/// @file text_sim.hpp
/// @brief Label normalization and literal similarity primitives.

#pragma once

#include "remp/kb.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace remp {

/// Sorted, duplicate-free token list.
using TokenSet = std::vector<std::string>;

/// Porter (1980) suffix-stripping stemmer. Input must be lowercase ASCII.
std::string porter_stem(std::string_view word);

/// Lowercases, splits on runs of non-alphanumeric characters, stems every
/// token and returns the distinct tokens in sorted order.
TokenSet normalize_label(std::string_view s);

/// |x ∩ y| / |x ∪ y| over two sorted duplicate-free ranges; 0 when both are
/// empty.
template <class T>
double jaccard(std::span<const T> x, std::span<const T> y) {
  if (x.empty() && y.empty()) return 0.0;
  std::size_t common = 0;
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) /
         static_cast<double>(x.size() + y.size() - common);
}

inline double jaccard(const TokenSet& x, const TokenSet& y) {
  return jaccard<std::string>(std::span(x), std::span(y));
}

/// Similarity of two literals in [0, 1]. Different kinds score 0.
double literal_sim(const TypedLiteral& a, const TypedLiteral& b);

/// Threshold applied when two literals count as "the same" inside value-set
/// comparisons.
inline constexpr double kLiteralThreshold = 0.9;

/// Extended Jaccard over two literal sets: literals pair up 1:1, greedily by
/// descending literal_sim, when their similarity is at least `threshold`.
/// Returns matched / (|a| + |b| - matched).
double extended_jaccard(std::span<const TypedLiteral> a, std::span<const TypedLiteral> b,
                        double threshold = kLiteralThreshold);

/// Same as above over literal ids of a pair of knowledge bases; string
/// literals are tokenized through `tokens`, which must be indexable by id.
class LiteralCache {
public:
  explicit LiteralCache(const KnowledgeBase& kb);
  const TypedLiteral& literal(LiteralId id) const { return kb_->literal(id); }
  const TokenSet& tokens(LiteralId id) const { return tokens_[id]; }

private:
  const KnowledgeBase* kb_;
  std::vector<TokenSet> tokens_;
};

double literal_sim(const LiteralCache& ca, LiteralId a, const LiteralCache& cb, LiteralId b);

double extended_jaccard(const LiteralCache& ca, std::span<const LiteralId> a,
                        const LiteralCache& cb, std::span<const LiteralId> b,
                        double threshold = kLiteralThreshold);

} // namespace remp
