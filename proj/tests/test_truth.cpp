#include "oracles.hpp"
#include "remp/error.hpp"
#include "remp/forest.hpp"
#include "remp/truth.hpp"

#include <doctest.h>

#include <random>

using namespace remp;

namespace {

std::vector<LabelRecord> votes(VertexId q, int yes, int no, int unsure = 0) {
  std::vector<LabelRecord> r;
  int w = 0;
  for (int i = 0; i < yes; ++i) r.push_back({q, "w" + std::to_string(w++), Answer::Match, 0});
  for (int i = 0; i < no; ++i) r.push_back({q, "w" + std::to_string(w++), Answer::NonMatch, 0});
  for (int i = 0; i < unsure; ++i) r.push_back({q, "w" + std::to_string(w++), Answer::Unsure, 0});
  return r;
}

QualityLookup constant(double l) {
  return [l](const std::string&) { return l; };
}

} // namespace

TEST_CASE("answers parse and print") {
  CHECK(parse_answer("match") == Answer::Match);
  CHECK(parse_answer("non_match") == Answer::NonMatch);
  CHECK(parse_answer("unsure") == Answer::Unsure);
  CHECK_FALSE(parse_answer("maybe"));
  CHECK_FALSE(parse_answer("non-match"));
  for (auto a : {Answer::Match, Answer::NonMatch, Answer::Unsure})
    CHECK(parse_answer(to_string(a)) == a);
}

TEST_CASE("posterior examples") {
  const std::vector<double> one{0.8}, none;
  CHECK(posterior(0.5, one, none) == doctest::Approx(0.8));
  CHECK(posterior(0.5, none, one) == doctest::Approx(0.2));
  CHECK(posterior(0.3, none, none) == doctest::Approx(0.3));
  CHECK(posterior(0.3, one, one) == doctest::Approx(0.3));
  CHECK(posterior(1.0, none, one) == doctest::Approx(1.0));
  CHECK(posterior(0.0, one, none) == doctest::Approx(0.0));
  const std::vector<double> bad{1.0};
  CHECK_THROWS_AS(posterior(0.5, bad, none), InvalidArgument);
  const std::vector<double> zero{0.0};
  CHECK_THROWS_AS(posterior(0.5, none, zero), InvalidArgument);
}

TEST_CASE("posterior agrees with Bayes' rule") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> prior(0.0, 1.0), lam(0.51, 0.99);
  std::uniform_int_distribution<int> count(0, 5);
  for (int iter = 0; iter < 1000; ++iter) {
    const double p = prior(rng);
    std::vector<double> yes(count(rng)), no(count(rng));
    for (auto& l : yes) l = lam(rng);
    for (auto& l : no) l = lam(rng);
    const double got = posterior(p, yes, no);
    CHECK(got == doctest::Approx(oracle::bayes(p, yes, no)));

    auto shuffled = yes;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(posterior(p, shuffled, no) == doctest::Approx(got));

    auto more = yes;
    more.push_back(lam(rng));
    CHECK(posterior(p, more, no) >= got - 1e-12);
    auto fewer = no;
    fewer.push_back(lam(rng));
    CHECK(posterior(p, yes, fewer) <= got + 1e-12);
  }
}

TEST_CASE("resolve_labels examples") {
  const std::vector<double> priors(4, 0.5);
  SUBCASE("unanimous votes") {
    auto recs = votes(0, 5, 0);
    const auto more = votes(1, 0, 5);
    recs.insert(recs.end(), more.begin(), more.end());
    const auto res = resolve_labels(recs, priors, constant(0.8), 5);
    REQUIRE(res.size() == 2);
    CHECK(res[0].state == ResolutionState::Match);
    CHECK(res[1].state == ResolutionState::NonMatch);
  }
  SUBCASE("a split vote at low quality is hard") {
    const auto res = resolve_labels(votes(2, 3, 2), priors, constant(0.6), 5);
    REQUIRE(res.size() == 1);
    CHECK(res[0].question == 2);
    CHECK(res[0].state == ResolutionState::Hard);
    CHECK(res[0].posterior == doctest::Approx(0.6));
  }
  SUBCASE("incomplete and undecided stays unresolved") {
    const auto res = resolve_labels(votes(0, 1, 1), priors, constant(0.6), 5);
    CHECK(res[0].state == ResolutionState::Unresolved);
  }
  SUBCASE("a decisive partial vote resolves early") {
    const auto res = resolve_labels(votes(0, 2, 0), priors, constant(0.9), 5);
    CHECK(res[0].state == ResolutionState::Match);
  }
  SUBCASE("unsure answers count but carry no evidence") {
    const auto res = resolve_labels(votes(3, 0, 0, 5), priors, constant(0.9), 5);
    CHECK(res[0].state == ResolutionState::Hard);
    CHECK(res[0].posterior == doctest::Approx(0.5));
  }
  SUBCASE("resolution is pure") {
    const auto recs = votes(1, 3, 2);
    const auto a = resolve_labels(recs, priors, constant(0.7), 5);
    const auto b = resolve_labels(recs, priors, constant(0.7), 5);
    REQUIRE(a.size() == b.size());
    CHECK(a[0].state == b[0].state);
    CHECK(a[0].posterior == b[0].posterior);
  }
}

TEST_CASE("wrong confirmed labels are rarer than a single worker's errors") {
  for (double e : {0.05, 0.1, 0.2, 0.3, 0.4}) {
    const std::vector<double> priors{0.5};
    double wrong = 0.0;
    for (std::uint32_t mask = 0; mask < 32; ++mask) {
      // truth is match; bit set = wrong answer
      const int bad = std::popcount(mask);
      const double pr = std::pow(e, bad) * std::pow(1.0 - e, 5 - bad);
      const auto res = resolve_labels(votes(0, 5 - bad, bad), priors, constant(1.0 - e), 5);
      if (res[0].state == ResolutionState::NonMatch) wrong += pr;
    }
    CHECK(wrong < e);
  }
}

TEST_CASE("similar neighborhoods") {
  const std::vector<SimilarityVector> v{{0.9, 0.8, 0.0}, {0.1, 0.5, 0.0}, {0.3, 0.0, 0.0},
                                        {0.0, 0.0, 0.0}};
  CHECK(active_attributes(v[0]) == std::vector<std::size_t>{0, 1});
  CHECK(similar_neighborhood(0, v, 0.9) == std::vector<std::size_t>{0, 1});
  CHECK(similar_neighborhood(2, v, 0.9) == std::vector<std::size_t>{2});
  CHECK(similar_neighborhood(2, v, 0.5) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("isolated classifier") {
  SUBCASE("separable neighborhood") {
    std::vector<SimilarityVector> v;
    std::vector<PairLabel> l;
    for (int i = 0; i < 10; ++i) {
      v.push_back({0.9 + 0.005 * i, 0.95});
      l.push_back(PairLabel::Match);
      v.push_back({0.1 + 0.01 * i, 0.2});
      l.push_back(PairLabel::NonMatch);
    }
    v.push_back({0.92, 0.9});
    l.push_back(PairLabel::Unknown);
    v.push_back({0.15, 0.25});
    l.push_back(PairLabel::Unknown);
    const IsolatedClassifier clf(v, l);
    CHECK(clf.predict(20));
    CHECK_FALSE(clf.predict(21));
    CHECK(clf.training_size(20) == 21);
  }
  SUBCASE("no positives in the neighborhood") {
    const std::vector<SimilarityVector> v{{0.9, 0.0}, {0.0, 0.9}, {0.0, 0.8}};
    const std::vector<PairLabel> l{PairLabel::Match, PairLabel::NonMatch, PairLabel::Unknown};
    const IsolatedClassifier clf(v, l);
    CHECK(clf.match_probability(2) == 0.0);
    CHECK_FALSE(clf.predict(2));
  }
  SUBCASE("noisy blobs") {
    std::mt19937_64 rng(73);
    std::normal_distribution<double> hi(0.8, 0.1), lo(0.35, 0.1);
    std::vector<SimilarityVector> v;
    std::vector<PairLabel> l;
    std::vector<bool> truth;
    for (int i = 0; i < 200; ++i) {
      const bool m = i % 2 == 0;
      SimilarityVector x(3);
      for (auto& f : x) f = std::clamp(m ? hi(rng) : lo(rng), 0.01, 1.0);
      v.push_back(x);
      l.push_back(m ? PairLabel::Match : PairLabel::NonMatch);
      truth.push_back(m);
    }
    const IsolatedClassifier clf(v, l);
    int right = 0;
    for (std::size_t p = 0; p < v.size(); ++p) right += clf.predict(p) == truth[p];
    CHECK(right >= 180);
  }
}

TEST_CASE("forest is deterministic for a seed") {
  std::mt19937_64 rng(75);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) {
    rows.push_back({u(rng), u(rng), u(rng)});
    labels.push_back(rows.back()[0] + rows.back()[1] > 1.0);
  }
  RandomForest a, b;
  a.fit(rows, labels);
  b.fit(rows, labels);
  CHECK(a.tree_count() == 100);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> x{u(rng), u(rng), u(rng)};
    CHECK(a.vote_fraction(x) == b.vote_fraction(x));
  }
  const std::vector<double> far_in{0.95, 0.95, 0.5}, far_out{0.05, 0.05, 0.5};
  CHECK(a.predict(far_in));
  CHECK_FALSE(a.predict(far_out));
}
