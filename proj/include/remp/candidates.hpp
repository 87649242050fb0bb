/// @file candidates.hpp
/// @brief Candidate entity matches, attribute matching, similarity vectors and
///        partial-order pruning.

#pragma once

#include "remp/hungarian.hpp"
#include "remp/kb.hpp"
#include "remp/text_sim.hpp"

#include <compare>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace remp {

/// A candidate match (u1 in KB1, u2 in KB2) with its prior match probability.
struct EntityPair {
  EntityId u1 = 0;
  EntityId u2 = 0;
  double prior = 0.0;

  friend bool operator==(const EntityPair& a, const EntityPair& b) {
    return a.u1 == b.u1 && a.u2 == b.u2;
  }
  friend auto operator<=>(const EntityPair& a, const EntityPair& b) {
    if (auto c = a.u1 <=> b.u1; c != 0) return c;
    return a.u2 <=> b.u2;
  }
};

struct MatchSets {
  std::vector<EntityPair> candidates; // sorted by (u1, u2)
  std::vector<EntityPair> initial;    // exact-label subset of candidates
  std::vector<EntityPair> retained;   // filled by pruning
  std::size_t unlabeled1 = 0;         // entities without any label value
  std::size_t unlabeled2 = 0;
};

/// Label similarity threshold for candidate generation.
inline constexpr double kDefaultLabelThreshold = 0.3;

/// Token-set Jaccard blocking on entity labels. Entities with several label
/// values use the union of their tokens. Pairs whose normalized token sets
/// are identical form the initial matches.
MatchSets generate_candidates(const KnowledgeBase& kb1, std::optional<AttributeId> label1,
                              const KnowledgeBase& kb2, std::optional<AttributeId> label2,
                              double t_label = kDefaultLabelThreshold);

struct AttributeMatch {
  AttributeId a1 = 0;
  AttributeId a2 = 0;
  double score = 0.0;
};

/// Average extended-Jaccard similarity of two attributes over the initial
/// matches, counting only matches where at least one side has values.
double attribute_similarity(AttributeId a1, AttributeId a2, std::span<const EntityPair> initial,
                            const KnowledgeBase& kb1, const LiteralCache& c1,
                            const KnowledgeBase& kb2, const LiteralCache& c2);

/// Full |A1| x |A2| attribute similarity matrix.
ScoreMatrix attribute_similarity_matrix(std::span<const EntityPair> initial,
                                        const KnowledgeBase& kb1, const LiteralCache& c1,
                                        const KnowledgeBase& kb2, const LiteralCache& c2);

inline constexpr double kDefaultMinAttributeScore = 0.1;

/// 1:1 attribute matching by maximum-weight assignment; ties go to the lowest
/// (a1, a2) ids. Matches scoring below `s_min` are dropped afterwards. The
/// result is sorted by (a1, a2), which fixes similarity-vector slot order.
std::vector<AttributeMatch> match_attributes_1to1(std::span<const EntityPair> initial,
                                                  const KnowledgeBase& kb1,
                                                  const LiteralCache& c1,
                                                  const KnowledgeBase& kb2,
                                                  const LiteralCache& c2,
                                                  double s_min = kDefaultMinAttributeScore);

using SimilarityVector = std::vector<double>;

SimilarityVector build_similarity_vector(const EntityPair& p,
                                         std::span<const AttributeMatch> matches,
                                         const KnowledgeBase& kb1, const LiteralCache& c1,
                                         const KnowledgeBase& kb2, const LiteralCache& c2);

/// Componentwise >=. Aborts on length mismatch.
bool dominates(std::span<const double> s, std::span<const double> t);
/// dominates(s, t) and at least one component strictly greater.
bool strictly_dominates(std::span<const double> s, std::span<const double> t);

/// Number of pairs in `pairs` sharing u1 (side 1) or u2 (side 2) with
/// `pairs[p]` whose vectors strictly dominate it.
std::size_t min_rank_side(std::span<const EntityPair> pairs,
                          std::span<const SimilarityVector> vectors, std::size_t p, int side);
/// max over both sides.
std::size_t min_rank(std::span<const EntityPair> pairs,
                     std::span<const SimilarityVector> vectors, std::size_t p);

inline constexpr std::size_t kDefaultPruneK = 4;

/// Partial-order pruning: one pass over KB1 entities, then one over KB2
/// entities on the survivors. Returns the indices of retained pairs, sorted.
std::vector<std::size_t> prune(std::span<const EntityPair> pairs,
                               std::span<const SimilarityVector> vectors, std::size_t k);

void write_pairs_tsv(const std::filesystem::path& file, std::span<const EntityPair> pairs,
                     const KnowledgeBase& kb1, const KnowledgeBase& kb2);
void write_attribute_matches_tsv(const std::filesystem::path& file,
                                 std::span<const AttributeMatch> matches,
                                 const KnowledgeBase& kb1, const KnowledgeBase& kb2);

} // namespace remp
