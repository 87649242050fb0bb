#include "remp/truth.hpp"

#include "remp/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>

namespace remp {

std::string_view to_string(Answer a) {
  switch (a) {
  case Answer::Match: return "match";
  case Answer::NonMatch: return "non_match";
  case Answer::Unsure: return "unsure";
  }
  return "unsure";
}

std::optional<Answer> parse_answer(std::string_view s) {
  if (s == "match") return Answer::Match;
  if (s == "non_match") return Answer::NonMatch;
  if (s == "unsure") return Answer::Unsure;
  return std::nullopt;
}

std::string_view to_string(ResolutionState s) {
  switch (s) {
  case ResolutionState::Unresolved: return "unresolved";
  case ResolutionState::Match: return "match";
  case ResolutionState::NonMatch: return "non_match";
  case ResolutionState::Hard: return "hard";
  }
  return "unresolved";
}

double posterior(double prior, std::span<const double> yes_qualities,
                 std::span<const double> no_qualities) {
  double factor = 1.0;
  for (double l : yes_qualities) {
    if (!(l > 0.0 && l < 1.0)) throw InvalidArgument("worker quality must lie in (0, 1)");
    factor *= (1.0 - l) / l;
  }
  for (double l : no_qualities) {
    if (!(l > 0.0 && l < 1.0)) throw InvalidArgument("worker quality must lie in (0, 1)");
    factor *= l / (1.0 - l);
  }
  const double denom = prior + (1.0 - prior) * factor;
  return denom > 0.0 ? prior / denom : 0.0;
}

std::vector<Resolution> resolve_labels(std::span<const LabelRecord> records,
                                       std::span<const double> priors,
                                       const QualityLookup& quality, std::size_t required,
                                       const TruthThresholds& thresholds) {
  std::map<VertexId, std::vector<const LabelRecord*>> by_question;
  for (const auto& r : records) by_question[r.question].push_back(&r);

  std::vector<Resolution> out;
  out.reserve(by_question.size());
  std::vector<double> yes, no;
  for (const auto& [q, recs] : by_question) {
    yes.clear();
    no.clear();
    for (const auto* r : recs) {
      if (r->answer == Answer::Match) yes.push_back(quality(r->worker));
      else if (r->answer == Answer::NonMatch) no.push_back(quality(r->worker));
    }
    Resolution res{q, ResolutionState::Unresolved, posterior(priors[q], yes, no)};
    if (res.posterior >= thresholds.high) res.state = ResolutionState::Match;
    else if (res.posterior <= thresholds.low) res.state = ResolutionState::NonMatch;
    else if (recs.size() >= required) res.state = ResolutionState::Hard;
    out.push_back(res);
  }
  return out;
}

std::vector<std::size_t> active_attributes(std::span<const double> v) {
  std::vector<std::size_t> a;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] > 0.0) a.push_back(i);
  return a;
}

namespace {

double index_jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else ++common, ++i, ++j;
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

} // namespace

std::vector<std::size_t> similar_neighborhood(std::size_t p,
                                              std::span<const SimilarityVector> vectors,
                                              double psi) {
  const auto ap = active_attributes(vectors[p]);
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < vectors.size(); ++q)
    if (index_jaccard(ap, active_attributes(vectors[q])) >= psi) out.push_back(q);
  return out;
}

IsolatedClassifier::IsolatedClassifier(std::span<const SimilarityVector> vectors,
                                       std::span<const PairLabel> labels,
                                       IsolatedClassifierOptions options)
    : vectors_(vectors), labels_(labels), options_(options) {
  if (vectors.size() != labels.size())
    throw InvalidArgument("classifier: one label per similarity vector required");
  active_.reserve(vectors.size());
  for (const auto& v : vectors) active_.push_back(active_attributes(v));
}

std::vector<std::size_t> IsolatedClassifier::training_rows(std::size_t p) const {
  std::vector<std::size_t> rows;
  for (std::size_t q = 0; q < vectors_.size(); ++q)
    if (q != p && index_jaccard(active_[p], active_[q]) >= options_.psi) rows.push_back(q);
  return rows;
}

std::size_t IsolatedClassifier::training_size(std::size_t p) const {
  return training_rows(p).size();
}

double IsolatedClassifier::match_probability(std::size_t p) const {
  const auto rows = training_rows(p);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  x.reserve(rows.size());
  bool any_positive = false;
  for (auto q : rows) {
    x.push_back(vectors_[q]);
    y.push_back(labels_[q] == PairLabel::Match ? 1 : 0);
    any_positive = any_positive || y.back() == 1;
  }
  if (!any_positive) return 0.0;
  RandomForest forest;
  forest.fit(x, y, options_.forest);
  return forest.vote_fraction(vectors_[p]);
}

void append_label_log(const std::filesystem::path& file, std::span<const LabelRecord> records,
                      const ErGraph& g, const KnowledgeBase& kb1, const KnowledgeBase& kb2) {
  std::ofstream out(file, std::ios::app);
  if (!out) throw IoError("cannot write " + file.string());
  for (const auto& r : records) {
    const auto& p = g.vertex(r.question);
    out << escape_field(kb1.entities().name(p.u1)) << '\t'
        << escape_field(kb2.entities().name(p.u2)) << '\t' << escape_field(r.worker) << '\t'
        << to_string(r.answer) << '\t' << r.timestamp << '\n';
  }
}

} // namespace remp
