/// @file propagation.hpp
/// @brief Relationship consistency estimation and relational match
///        propagation to neighbors and along paths.

#pragma once

#include "remp/candidates.hpp"
#include "remp/kb.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace remp {

inline constexpr double kEpsMin = 0.01;
inline constexpr double kEpsMax = 0.99;

/// Consistency of a relationship pair: ε1 is the chance that a neighbor of
/// u1 under r1 has a matching counterpart among u2's r2 neighbors; ε2 the
/// converse.
struct Consistency {
  double eps1 = kEpsMin;
  double eps2 = kEpsMin;
};

using RelationPair = std::pair<RelationId, RelationId>;

class ConsistencyTable {
public:
  void set(RelationPair label, Consistency c) { table_[label] = c; }
  /// (ε_min, ε_min) for unknown labels.
  Consistency get(RelationPair label) const;
  const std::map<RelationPair, Consistency>& entries() const { return table_; }
  std::size_t size() const { return table_.size(); }

  void write_tsv(const std::string& file, const KnowledgeBase& kb1,
                 const KnowledgeBase& kb2) const;

private:
  std::map<RelationPair, Consistency> table_;
};

/// Value-set sizes of one seed match under (r1, r2) and the range of the
/// latent neighbor-match count: at least the size of a maximum 1:1 matching
/// over known matches in N1 x N2, at most that over candidate pairs.
struct ConsistencyObservation {
  std::uint32_t n1 = 0;
  std::uint32_t n2 = 0;
  std::uint32_t max_latent = 0;
  std::uint32_t min_latent = 0;
};

/// Pair membership test used to bound the latent match counts.
using PairPredicate = std::function<bool(EntityId, EntityId)>;

/// One observation per seed where at least one value set is nonempty.
/// `is_known` marks pairs already taken as matches; pass an empty function
/// for none.
std::vector<ConsistencyObservation>
consistency_observations(RelationId r1, RelationId r2, std::span<const EntityPair> seeds,
                         const KnowledgeBase& kb1, const KnowledgeBase& kb2,
                         const PairPredicate& is_candidate, const PairPredicate& is_known = {});

/// Size of a maximum bipartite matching over the given pairs.
std::uint32_t max_matching_size(std::span<const std::pair<EntityId, EntityId>> pairs);

struct ConsistencyEstimate {
  double eps1 = kEpsMin;  // clamped
  double eps2 = kEpsMin;
  double raw_eps1 = 0.0;  // maximizer before clamping
  double raw_eps2 = 0.0;
  std::vector<std::uint32_t> latents;
  double log_likelihood = 0.0; // at the unclamped maximizer
};

/// log of the joint likelihood Π Pr[N1, N2, L] for the given parameters.
double consistency_log_likelihood(std::span<const ConsistencyObservation> obs, double eps1,
                                  double eps2, std::span<const std::uint32_t> latents);

/// Maximum-likelihood (ε1, ε2, L). For fixed L the optimum is closed form
/// (ε_i = ΣL / Σn_i); for fixed ε every L depends only on
/// ζ = ε1ε2 / ((1-ε1)(1-ε2)) and is piecewise constant in ζ. Every piece is
/// evaluated, then the best is polished by alternating updates. Degenerate
/// input (no observation with both sets nonempty) yields (ε_min, ε_min).
ConsistencyEstimate estimate_consistency(std::span<const ConsistencyObservation> obs);

/// Convenience wrapper computing the observations first.
Consistency estimate_consistency(RelationId r1, RelationId r2,
                                 std::span<const EntityPair> seeds, const KnowledgeBase& kb1,
                                 const KnowledgeBase& kb2, const PairPredicate& is_candidate,
                                 const PairPredicate& is_known = {});

/// Alternating maximization from (eps1, eps2). Returns the log-likelihood
/// after every half-step; the sequence is nondecreasing.
std::vector<double> consistency_fixed_point_trace(std::span<const ConsistencyObservation> obs,
                                                  double eps1, double eps2,
                                                  int max_iterations = 100);

struct NeighborCandidate {
  EntityId u1 = 0;
  EntityId u2 = 0;
  double prior = 0.0;
};

/// Candidates of one neighbor group: pairs in (N1 x N2) ∩ V of an anchor
/// under one relationship pair.
struct NeighborProblem {
  std::vector<NeighborCandidate> cand;
  std::uint32_t n1 = 0; // |N1|
  std::uint32_t n2 = 0; // |N2|
};

struct PropagationOptions {
  /// Restrict subsets to 1:1 matchings (no entity used twice).
  bool one_to_one = true;
  /// Groups larger than this keep only the highest-prior candidates.
  std::size_t max_enumerated = 12;
};

/// Unnormalized score f(M) g(M|N1) g(M|N2) of the subset given by `members`
/// (indices into prob.cand). Candidates outside the subset contribute
/// (1 - prior).
double subset_score(const NeighborProblem& prob, std::span<const std::size_t> members,
                    Consistency eps);

/// Posterior match probability of every candidate given the anchor matches,
/// by exhaustive subset enumeration. Output is index-aligned with prob.cand.
std::vector<double> neighbor_posteriors(const NeighborProblem& prob, Consistency eps,
                                        const PropagationOptions& options = {});

/// Chain-rule lower bound along a path: product of its edge probabilities.
double path_lower_bound(std::span<const double> edge_probs);

} // namespace remp
