#include "oracles.hpp"
#include "remp/selection.hpp"

#include <doctest.h>

#include <random>

using namespace remp;

namespace {

ProbErGraph chain(double ab, double bc) {
  std::vector<std::vector<ProbEdge>> adj(3);
  adj[0].push_back({1, ab, -std::log(ab), 0, 0});
  adj[1].push_back({2, bc, -std::log(bc), 0, 0});
  return ProbErGraph(3, std::move(adj));
}

std::vector<double> random_priors(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<double> p(n);
  for (auto& x : p) x = u(rng);
  return p;
}

std::vector<std::size_t> random_subset(std::size_t n, std::mt19937_64& rng, double keep) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < n; ++i)
    if (u(rng) < keep) s.push_back(i);
  return s;
}

} // namespace

TEST_CASE("distance threshold") {
  CHECK(distance_threshold(1.0) == 0.0);
  CHECK(distance_threshold(0.9) == doctest::Approx(0.1053605));
}

TEST_CASE("edgeless graph infers only itself") {
  const ProbErGraph pg(4, std::vector<std::vector<ProbEdge>>(4));
  const std::vector<VertexId> q{0, 1, 2, 3};
  const auto inf = compute_inferred_sets(pg, q, distance_threshold(0.9));
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(inf.forward[i].size() == 1);
    CHECK(inf.forward[i][0].index == i);
    CHECK(inf.forward[i][0].dist == 0.0);
  }
  CHECK_FALSE(can_propagate(inf));
  const std::vector<double> priors{0.5, 0.5, 0.5, 0.5};
  CHECK(benefit(std::vector<std::size_t>{0, 1}, inf, priors) == doctest::Approx(1.0));
}

TEST_CASE("chains infer along paths above the threshold") {
  const std::vector<VertexId> q{0, 1, 2};
  const double zeta = distance_threshold(0.9);
  const auto yes = compute_inferred_sets(chain(0.95, 0.95), q, zeta);
  REQUIRE(yes.forward[0].size() == 3); // 0.95 * 0.95 = 0.9025
  CHECK(yes.forward[0][2].dist == doctest::Approx(-2.0 * std::log(0.95)));
  CHECK(can_propagate(yes));
  const auto no = compute_inferred_sets(chain(0.94, 0.95), q, zeta);
  CHECK(no.forward[0].size() == 2); // 0.893
  CHECK(no.forward[1].size() == 2);
  CHECK(no.forward[2].size() == 1);
  REQUIRE(no.backward[1].size() == 2);
  CHECK(no.backward[1][0].index == 0);

  SUBCASE("paths leave the question set") {
    const std::vector<VertexId> ends{0, 2};
    const auto inf = compute_inferred_sets(chain(1.0, 1.0), ends, 0.0);
    CHECK(inf.forward[0].size() == 1);
  }
}

TEST_CASE("inferred sets equal a per-source Dijkstra") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> tau(0.6, 1.0);
  for (int iter = 0; iter < 60; ++iter) {
    const std::size_t n = 30;
    const auto pg = oracle::random_prob_graph(n, 0.08, rng, iter % 2 ? 0.85 : 0.5);
    std::vector<VertexId> q;
    for (auto i : random_subset(n, rng, 0.7)) q.push_back(static_cast<VertexId>(i));
    const double zeta = distance_threshold(tau(rng));
    const auto inf = compute_inferred_sets(pg, q, zeta);
    const auto want = oracle::truncated_dijkstra(pg, q, zeta);
    REQUIRE(inf.forward.size() == q.size());
    CHECK(inf.questions == q);
    for (std::size_t s = 0; s < q.size(); ++s) {
      REQUIRE(inf.forward[s].size() == want[s].size());
      std::size_t k = 0;
      for (const auto& [t, d] : want[s]) {
        CHECK(inf.forward[s][k].index == t);
        CHECK(inf.forward[s][k].dist == doctest::Approx(d));
        CHECK(inf.forward[s][k].dist <= zeta + kDistanceSlack);
        ++k;
      }
    }
    // backward is the transpose
    std::size_t fw = 0, bw = 0;
    for (std::size_t s = 0; s < q.size(); ++s) {
      fw += inf.forward[s].size();
      for (const auto& e : inf.backward[s]) {
        ++bw;
        CHECK(want[e.index].count(s) == 1);
      }
    }
    CHECK(fw == bw);
    // triangle inequality over the inferred distances
    for (std::size_t a = 0; a < q.size(); ++a)
      for (const auto& [b, dab] : want[a])
        for (const auto& [c, dbc] : want[b])
          if (dab + dbc <= zeta) {
            REQUIRE(want[a].count(c) == 1);
            CHECK(want[a].at(c) <= dab + dbc + 1e-12);
          }
  }
}

TEST_CASE("distances from several sources") {
  std::mt19937_64 rng(53);
  for (int iter = 0; iter < 30; ++iter) {
    const std::size_t n = 25;
    const auto pg = oracle::random_prob_graph(n, 0.1, rng);
    std::vector<VertexId> all(n);
    std::iota(all.begin(), all.end(), VertexId{0});
    const double zeta = distance_threshold(0.8);
    const auto per = oracle::truncated_dijkstra(pg, all, zeta);
    std::vector<VertexId> sources;
    for (auto i : random_subset(n, rng, 0.2)) sources.push_back(static_cast<VertexId>(i));
    const auto got = distances_from_sources(pg, sources, zeta);
    REQUIRE(got.size() == n);
    for (std::size_t v = 0; v < n; ++v) {
      double best = std::numeric_limits<double>::infinity();
      for (auto s : sources)
        if (per[s].count(v)) best = std::min(best, per[s].at(v));
      if (std::isinf(best)) CHECK(std::isinf(got[v]));
      else CHECK(got[v] == doctest::Approx(best));
    }
  }
}

TEST_CASE("benefit examples") {
  InferredSets inf;
  inf.questions = {0, 1, 2, 3};
  inf.forward = {{{0, 0}, {1, 0.01}, {2, 0.02}}, {{1, 0}}, {{2, 0}, {3, 0.01}}, {{3, 0}}};
  inf.backward.assign(4, {});
  for (std::size_t q = 0; q < 4; ++q)
    for (const auto& e : inf.forward[q]) inf.backward[e.index].push_back({q, e.dist});
  const std::vector<double> priors{0.8, 0.5, 0.5, 0.5};
  CHECK(benefit(std::vector<std::size_t>{0}, inf, priors) == doctest::Approx(2.4));
  CHECK(benefit(std::vector<std::size_t>{1, 0}, inf, priors) ==
        doctest::Approx(0.8 + 0.9 + 0.8));
  CHECK(benefit(std::vector<std::size_t>{3, 2}, inf, priors) == doctest::Approx(0.5 + 0.75));
  CHECK(benefit(std::vector<std::size_t>{}, inf, priors) == 0.0);
  CHECK(can_propagate(inf));

  const auto picked = select_questions(inf, priors, 1);
  CHECK(picked == std::vector<std::size_t>{0});
}

TEST_CASE("benefit is the expected size of the inferred union") {
  std::mt19937_64 rng(55);
  for (int iter = 0; iter < 100; ++iter) {
    const auto inf = oracle::random_inferred_sets(8, rng);
    const auto priors = random_priors(8, rng);
    const auto chosen = random_subset(8, rng, 0.5);
    const auto cover = oracle::cover_of(inf);
    CHECK(benefit(chosen, inf, priors) ==
          doctest::Approx(oracle::benefit_by_outcomes(cover, priors, chosen)));
  }
}

TEST_CASE("benefit is monotone and submodular") {
  std::mt19937_64 rng(57);
  for (int iter = 0; iter < 300; ++iter) {
    const auto inf = oracle::random_inferred_sets(10, rng);
    const auto priors = random_priors(10, rng);
    const auto b = random_subset(10, rng, 0.6);
    std::vector<std::size_t> a;
    for (auto x : b)
      if (rng() % 2) a.push_back(x);
    for (std::size_t q = 0; q < 10; ++q) {
      if (std::find(b.begin(), b.end(), q) != b.end()) continue;
      auto aq = a, bq = b;
      aq.push_back(q);
      bq.push_back(q);
      const double ga = benefit(aq, inf, priors) - benefit(a, inf, priors);
      const double gb = benefit(bq, inf, priors) - benefit(b, inf, priors);
      CHECK(ga >= gb - 1e-12);
      CHECK(gb >= -1e-12);
    }
    CHECK(benefit(a, inf, priors) <= benefit(b, inf, priors) + 1e-12);
  }
}

TEST_CASE("lazy greedy equals plain greedy and meets the bound") {
  std::mt19937_64 rng(59);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t n = 12;
    const auto inf = oracle::random_inferred_sets(n, rng);
    const auto priors = random_priors(n, rng);
    const std::size_t mu = 1 + iter % 5;
    const auto cover = oracle::cover_of(inf);
    const auto got = select_questions(inf, priors, mu);
    CHECK(got == oracle::plain_greedy(cover, priors, mu));
    CHECK(got.size() <= mu);
    const double opt = oracle::brute_force_optimum(cover, priors, mu);
    CHECK(benefit(got, inf, priors) >= (1.0 - 1.0 / std::exp(1.0)) * opt - 1e-9);
  }
}

TEST_CASE("selection edge cases") {
  std::mt19937_64 rng(61);
  const auto inf = oracle::random_inferred_sets(6, rng);
  const auto priors = random_priors(6, rng);
  const auto cover = oracle::cover_of(inf);

  SUBCASE("mu = 1 is the single best question") {
    const auto got = select_questions(inf, priors, 1);
    REQUIRE(got.size() == 1);
    for (std::size_t q = 0; q < 6; ++q)
      CHECK(benefit(got, inf, priors) >=
            benefit(std::vector<std::size_t>{q}, inf, priors) - 1e-12);
  }
  SUBCASE("mu = 0 selects nothing") { CHECK(select_questions(inf, priors, 0).empty()); }
  SUBCASE("disjoint singletons are picked by prior") {
    const ProbErGraph pg(5, std::vector<std::vector<ProbEdge>>(5));
    const std::vector<VertexId> q{0, 1, 2, 3, 4};
    const auto single = compute_inferred_sets(pg, q, 0.1);
    const std::vector<double> p{0.2, 0.9, 0.5, 0.9, 0.1};
    CHECK(select_questions(single, p, 3) == std::vector<std::size_t>{1, 3, 2});
    CHECK(select_questions(single, p, 10).size() == 5);
  }
  SUBCASE("zero priors give no gain") {
    const std::vector<double> zero(6, 0.0);
    CHECK(select_questions(inf, zero, 3).empty());
  }
}
