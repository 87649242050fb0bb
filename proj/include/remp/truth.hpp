/// @file truth.hpp
/// @brief Fusion of noisy worker labels and classification of isolated pairs.

#pragma once

#include "remp/candidates.hpp"
#include "remp/er_graph.hpp"
#include "remp/forest.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace remp {

enum class Answer : std::uint8_t { Match, NonMatch, Unsure };

std::string_view to_string(Answer a);
std::optional<Answer> parse_answer(std::string_view s);

struct LabelRecord {
  VertexId question = 0;
  std::string worker;
  Answer answer = Answer::Unsure;
  std::int64_t timestamp = 0;
};

enum class ResolutionState : std::uint8_t { Unresolved, Match, NonMatch, Hard };

std::string_view to_string(ResolutionState s);

struct Resolution {
  VertexId question = 0;
  ResolutionState state = ResolutionState::Unresolved;
  double posterior = 0.0;
};

struct TruthThresholds {
  double high = 0.8;
  double low = 0.2;
};

/// prior / (prior + (1-prior) Π_{yes} (1-λ)/λ Π_{no} λ/(1-λ)).
/// Throws InvalidArgument for a quality outside (0, 1).
double posterior(double prior, std::span<const double> yes_qualities,
                 std::span<const double> no_qualities);

using QualityLookup = std::function<double(const std::string& worker)>;

/// Groups `records` by question (ascending) and classifies each one. A
/// question with fewer than `required` answers whose posterior is not yet
/// decisive stays unresolved; with all answers in, an undecided posterior
/// makes it hard. Unsure answers count towards `required` but carry no
/// evidence. Pure: the caller applies prior damping for hard questions.
std::vector<Resolution> resolve_labels(std::span<const LabelRecord> records,
                                       std::span<const double> priors,
                                       const QualityLookup& quality, std::size_t required,
                                       const TruthThresholds& thresholds = {});

enum class PairLabel : std::uint8_t { Unknown, Match, NonMatch };

/// Attribute matches with nonzero similarity for a pair (indices into the
/// vector).
std::vector<std::size_t> active_attributes(std::span<const double> v);

/// N_p: indices q with Jaccard(A_p, A_q) >= psi. Includes p itself.
std::vector<std::size_t> similar_neighborhood(std::size_t p,
                                              std::span<const SimilarityVector> vectors,
                                              double psi);

struct IsolatedClassifierOptions {
  double psi = 0.9;
  ForestParams forest;
};

/// Per-query random forest over N_p. Known matches are positives; known
/// non-matches and unresolved pairs are negatives. The query pair itself is
/// left out of its own training set. Without any positive the answer is
/// non-match.
class IsolatedClassifier {
public:
  IsolatedClassifier(std::span<const SimilarityVector> vectors, std::span<const PairLabel> labels,
                     IsolatedClassifierOptions options = {});

  /// Fraction of trees voting match; 0 without any positive in N_p.
  double match_probability(std::size_t p) const;
  bool predict(std::size_t p) const { return match_probability(p) > 0.5; }
  /// Training rows used for p, for inspection.
  std::size_t training_size(std::size_t p) const;

private:
  std::vector<std::size_t> training_rows(std::size_t p) const;

  std::span<const SimilarityVector> vectors_;
  std::span<const PairLabel> labels_;
  IsolatedClassifierOptions options_;
  std::vector<std::vector<std::size_t>> active_;
};

/// Appends one record per line in the label-log format.
void append_label_log(const std::filesystem::path& file, std::span<const LabelRecord> records,
                      const ErGraph& g, const KnowledgeBase& kb1, const KnowledgeBase& kb2);

} // namespace remp
