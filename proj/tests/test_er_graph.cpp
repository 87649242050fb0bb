#include "remp/er_graph.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <tuple>

using namespace remp;
using testutil::eid;

namespace {

struct Fragment {
  KnowledgeBase kb1;
  KnowledgeBase kb2;
  std::vector<EntityPair> pairs;
  ErGraph g;
};

// Tim directed Cradle and Player on both sides; retained pairs are
// (Tim,Tim), (Cradle,Cradle), (Player,Player) and (Cradle,Player).
Fragment movie_fragment() {
  Fragment f;
  f.kb1 = testutil::make_kb({}, {{"y:Tim", "directed", "y:Cradle"},
                                 {"y:Tim", "directed", "y:Player"}});
  f.kb2 = testutil::make_kb({}, {{"d:Tim", "director_of", "d:Cradle"},
                                 {"d:Tim", "director_of", "d:Player"}});
  auto p = [&](const char* a, const char* b) {
    return EntityPair{eid(f.kb1, a), eid(f.kb2, b), 0.5};
  };
  f.pairs = {p("y:Tim", "d:Tim"), p("y:Cradle", "d:Cradle"), p("y:Player", "d:Player"),
             p("y:Cradle", "d:Player")};
  f.g = ErGraph::build(f.pairs, f.kb1, f.kb2);
  return f;
}

} // namespace

TEST_CASE("graph without relations has no edges") {
  const auto kb1 = testutil::make_kb({{"a", "label", "x", LiteralKind::String}}, {});
  const auto kb2 = testutil::make_kb({{"b", "label", "x", LiteralKind::String}}, {});
  const std::vector<EntityPair> v{{0, 0, 1.0}};
  const auto g = ErGraph::build(v, kb1, kb2);
  CHECK(g.vertex_count() == 1);
  CHECK(g.edge_count() == 0);
  CHECK(g.isolated(0));
  CHECK(neighbor_groups(g, 0).empty());
}

TEST_CASE("movie fragment edges and groups") {
  const auto f = movie_fragment();
  CHECK(f.g.vertex_count() == 4);
  CHECK(f.g.edge_count() == 3);
  const auto tim = *f.g.find(eid(f.kb1, "y:Tim"), eid(f.kb2, "d:Tim"));
  CHECK(f.g.out_edges(tim).size() == 3);
  CHECK_FALSE(f.g.isolated(tim));
  CHECK(f.g.in_degree(tim) == 0);
  CHECK_FALSE(f.g.find(eid(f.kb1, "y:Tim"), eid(f.kb2, "d:Cradle")));

  const auto groups = neighbor_groups(f.g, tim);
  REQUIRE(groups.size() == 1);
  const RelationPair label{*f.kb1.relations().find("directed"),
                           *f.kb2.relations().find("director_of")};
  REQUIRE(groups.count(label) == 1);
  CHECK(groups.at(label) == std::vector<VertexId>{1, 2, 3});

  const std::vector<double> priors(4, 0.5);
  const auto prob = make_neighbor_problem(f.g, tim, label, groups.at(label), priors, f.kb1, f.kb2);
  CHECK(prob.n1 == 2);
  CHECK(prob.n2 == 2);
  CHECK(prob.cand.size() == 3);
}

TEST_CASE("probabilistic graph on the movie fragment") {
  const auto f = movie_fragment();
  const RelationPair label{*f.kb1.relations().find("directed"),
                           *f.kb2.relations().find("director_of")};
  ConsistencyTable table;
  table.set(label, {0.95, 0.95});
  const std::vector<double> priors(4, 0.5);
  const auto pg = to_probabilistic(f.g, table, priors, f.kb1, f.kb2);
  CHECK(pg.vertex_count() == 4);
  CHECK(pg.edge_prob(0, 1) == doctest::Approx(0.9945).epsilon(1e-3));
  CHECK(pg.edge_prob(0, 2) == doctest::Approx(0.9945).epsilon(1e-3));
  CHECK(pg.edge_prob(0, 3) < 0.01);
  CHECK(pg.edge_prob(1, 0) == 0.0);
  for (const auto& e : pg.out_edges(0)) CHECK(e.length == doctest::Approx(-std::log(e.prob)));

  SUBCASE("a known non-match has no out-edges") {
    auto p = priors;
    p[0] = 0.0;
    CHECK(to_probabilistic(f.g, table, p, f.kb1, f.kb2).out_edges(0).empty());
  }
  SUBCASE("a prior-0 target is dropped") {
    auto p = priors;
    p[3] = 0.0;
    const auto pg0 = to_probabilistic(f.g, table, p, f.kb1, f.kb2);
    CHECK(pg0.edge_prob(0, 3) == 0.0);
    CHECK(pg0.out_edges(0).size() == 2);
  }
}

TEST_CASE("a forced single successor gets probability 1") {
  const auto kb1 = testutil::make_kb({}, {{"a", "r", "b"}});
  const auto kb2 = testutil::make_kb({}, {{"a", "s", "b"}});
  const std::vector<EntityPair> v{{eid(kb1, "a"), eid(kb2, "a"), 1.0},
                                  {eid(kb1, "b"), eid(kb2, "b"), 1.0}};
  const auto g = ErGraph::build(v, kb1, kb2);
  ConsistencyTable table;
  table.set({0, 0}, {0.99, 0.99});
  const std::vector<double> priors{1.0, 1.0};
  const auto pg = to_probabilistic(g, table, priors, kb1, kb2);
  CHECK(pg.edge_prob(0, 1) == 1.0);
  CHECK(pg.out_edges(0)[0].length == 0.0);
  CHECK_THROWS(to_probabilistic(g, table, std::vector<double>{1.0}, kb1, kb2));
}

TEST_CASE("edges agree with a join over random knowledge bases") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> ent(0, 7), rel(0, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int iter = 0; iter < 30; ++iter) {
    std::vector<testutil::Rel> r1, r2;
    for (int i = 0; i < 25; ++i) {
      r1.emplace_back("e" + std::to_string(ent(rng)), "r" + std::to_string(rel(rng)),
                      "e" + std::to_string(ent(rng)));
      r2.emplace_back("e" + std::to_string(ent(rng)), "s" + std::to_string(rel(rng)),
                      "e" + std::to_string(ent(rng)));
    }
    const auto kb1 = testutil::make_kb({}, r1);
    const auto kb2 = testutil::make_kb({}, r2);
    std::vector<EntityPair> v;
    for (EntityId a = 0; a < kb1.entity_count(); ++a)
      for (EntityId b = 0; b < kb2.entity_count(); ++b)
        if (u(rng) < 0.3) v.push_back({a, b, u(rng)});
    const auto g = ErGraph::build(v, kb1, kb2);

    std::set<std::tuple<VertexId, VertexId, RelationId, RelationId>> want, got;
    for (VertexId p = 0; p < v.size(); ++p)
      for (VertexId q = 0; q < v.size(); ++q)
        for (const auto& t1 : kb1.rel_triples()) {
          if (t1.head != v[p].u1 || t1.tail != v[q].u1) continue;
          for (const auto& t2 : kb2.rel_triples())
            if (t2.head == v[p].u2 && t2.tail == v[q].u2)
              want.insert({p, q, t1.relation, t2.relation});
        }
    for (const auto& e : g.edges()) got.insert({e.src, e.dst, e.r1, e.r2});
    CHECK(got == want);
    CHECK(got.size() == g.edge_count());

    for (VertexId p = 0; p < v.size(); ++p) {
      std::size_t in = 0;
      for (const auto& e : g.edges()) in += e.dst == p;
      CHECK(g.in_degree(p) == in);
      CHECK(*g.find(v[p].u1, v[p].u2) == p);
      for (const auto& e : g.out_edges(p)) CHECK(e.src == p);
    }

    std::vector<double> priors;
    for (const auto& p : v) priors.push_back(p.prior);
    ConsistencyTable table;
    for (RelationId a = 0; a < kb1.relation_count(); ++a)
      for (RelationId b = 0; b < kb2.relation_count(); ++b) table.set({a, b}, {u(rng), u(rng)});
    const auto pg = to_probabilistic(g, table, priors, kb1, kb2);
    for (VertexId p = 0; p < v.size(); ++p) {
      std::set<VertexId> dsts;
      for (const auto& e : pg.out_edges(p)) {
        CHECK(e.prob > 0.0);
        CHECK(e.prob <= 1.0);
        CHECK(e.length >= 0.0);
        CHECK(dsts.insert(e.dst).second);
        CHECK(std::any_of(g.out_edges(p).begin(), g.out_edges(p).end(),
                          [&](const ErEdge& x) { return x.dst == e.dst; }));
      }
    }

    std::vector<VertexId> removed;
    for (VertexId p = 0; p < v.size(); ++p)
      if (u(rng) < 0.3) removed.push_back(p);
    const auto h = g.without_vertices(removed);
    const std::set<VertexId> gone(removed.begin(), removed.end());
    CHECK(h.vertex_count() == v.size() - gone.size());
    std::set<std::tuple<EntityId, EntityId, EntityId, EntityId, RelationId, RelationId>> kept, hedges;
    for (const auto& e : g.edges())
      if (!gone.count(e.src) && !gone.count(e.dst))
        kept.insert({v[e.src].u1, v[e.src].u2, v[e.dst].u1, v[e.dst].u2, e.r1, e.r2});
    for (const auto& e : h.edges()) {
      const auto& s = h.vertex(e.src);
      const auto& d = h.vertex(e.dst);
      hedges.insert({s.u1, s.u2, d.u1, d.u2, e.r1, e.r2});
    }
    CHECK(kept == hedges);
  }
}
