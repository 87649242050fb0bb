/// @file selection.hpp
/// @brief Inferred-match discovery by distance-bounded shortest paths and
///        lazy greedy question selection.

#pragma once

#include "remp/er_graph.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace remp {

struct InferredEntry {
  std::size_t index = 0; // position in InferredSets::questions
  double dist = 0.0;
};

/// For each candidate question q (by position in `questions`), the pairs it
/// can infer together with their shortest-path distances; `backward` is the
/// transpose. Rows are sorted by index and every distance is <= ζ.
struct InferredSets {
  std::vector<VertexId> questions; // C, ascending vertex ids
  std::vector<std::vector<InferredEntry>> forward;
  std::vector<std::vector<InferredEntry>> backward;
};

/// ζ = -log τ for a precision threshold τ in (0, 1].
inline double distance_threshold(double tau) { return tau >= 1.0 ? 0.0 : -std::log(tau); }

/// Slack used when comparing path lengths against ζ.
inline constexpr double kDistanceSlack = 1e-12;

/// Shortest paths from every q in `questions` to the other members of
/// `questions`, restricted to the subgraph induced by `questions` and
/// truncated at ζ. q infers itself at distance 0.
InferredSets compute_inferred_sets(const ProbErGraph& pg, std::span<const VertexId> questions,
                                   double zeta);

/// True when some question infers an open pair other than itself.
bool can_propagate(const InferredSets& inf);

/// Distance from the nearest source over the whole graph, truncated at ζ;
/// unreached vertices get +inf. Sources have distance 0.
std::vector<double> distances_from_sources(const ProbErGraph& pg,
                                           std::span<const VertexId> sources, double zeta);

/// Expected number of inferred matches Σ_p 1 - Π_{q ∈ Q, p ∈ inferred(q)} (1 - prior(q)).
/// `selected` and `priors` are positions/values aligned with inf.questions.
double benefit(std::span<const std::size_t> selected, const InferredSets& inf,
               std::span<const double> priors);

struct SelectionProblem {
  double tau = 0.9;
  std::size_t mu = 10;
  double zeta() const { return distance_threshold(tau); }
};

/// Lazy greedy maximization of benefit under |Q| <= mu. Returns positions in
/// pick order. Ties go to the smaller vertex id; stops once no question adds
/// a positive gain.
std::vector<std::size_t> select_questions(const InferredSets& inf, std::span<const double> priors,
                                          std::size_t mu);

} // namespace remp
