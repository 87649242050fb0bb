// Acceptance suite: one PASS/FAIL line per primary criterion.

#include "oracles.hpp"
#include "remp/engine.hpp"
#include "remp/truth.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace remp;

namespace {

const std::filesystem::path kToy = std::filesystem::path(REMP_SOURCE_DIR) / "data" / "toy";

struct Outcome {
  bool ok = true;
  std::string detail;
};

bool near(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

Outcome worked_example() {
  const NeighborProblem prob{{{0, 0, 0.5}, {1, 1, 0.5}, {0, 1, 0.5}}, 2, 2};
  const Consistency eps{0.95, 0.95};
  const std::vector<std::size_t> both{0, 1}, cross{2};
  const double s_both = subset_score(prob, both, eps);
  const double s_cross = subset_score(prob, cross, eps);
  const auto post = neighbor_posteriors(prob, eps);
  Outcome o;
  o.ok = std::abs(s_both - 0.1018) <= 0.1 * 0.1018 && std::abs(s_cross - 0.00028) <= 0.1 * 0.00028 &&
         post[0] >= 0.97 && post[0] <= 1.0 && post[2] >= 0.0 && post[2] <= 0.03;
  std::ostringstream d;
  d << "score{CC,PP}=" << s_both << " score{CP}=" << s_cross << " Pr(CC)=" << post[0]
    << " Pr(CP)=" << post[2];
  o.detail = d.str();
  return o;
}

NeighborProblem random_problem(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ent(0, 4), extra(0, 2);
  std::uniform_int_distribution<std::size_t> count(1, 10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  NeighborProblem prob;
  std::set<std::pair<int, int>> seen;
  const std::size_t want = count(rng);
  while (prob.cand.size() < want) {
    const int a = ent(rng), b = ent(rng);
    if (!seen.insert({a, b}).second) continue;
    prob.cand.push_back({static_cast<EntityId>(a), static_cast<EntityId>(b), u(rng)});
  }
  std::set<EntityId> l, r;
  for (const auto& c : prob.cand) {
    l.insert(c.u1);
    r.insert(c.u2);
  }
  prob.n1 = static_cast<std::uint32_t>(l.size() + extra(rng));
  prob.n2 = static_cast<std::uint32_t>(r.size() + extra(rng));
  return prob;
}

// Blocks of up to 50 pairs: few KB1 entities against many KB2 entities.
void random_blocks(std::mt19937_64& rng, std::vector<EntityPair>& pairs,
                   std::vector<SimilarityVector>& vecs) {
  std::uniform_int_distribution<int> left_count(1, 4), right(0, 59), level(0, 4);
  const int left = left_count(rng);
  std::uniform_int_distribution<int> lpick(0, left - 1);
  std::set<std::pair<int, int>> seen;
  pairs.clear();
  vecs.clear();
  while (pairs.size() < 50) {
    const int a = lpick(rng), b = right(rng);
    if (!seen.insert({a, b}).second) continue;
    pairs.push_back({static_cast<EntityId>(a), static_cast<EntityId>(b), 0.5});
    SimilarityVector v(3);
    for (auto& x : v) x = level(rng) / 4.0;
    vecs.push_back(std::move(v));
  }
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0), e(kEpsMin, kEpsMax);
  std::size_t bad_neighbor = 0, bad_dijkstra = 0, bad_hungarian = 0, bad_prune = 0,
              bad_posterior = 0;

  for (int i = 0; i < 200; ++i) {
    const auto prob = random_problem(rng);
    const Consistency eps{e(rng), e(rng)};
    for (bool one : {true, false}) {
      auto want = oracle::subset_posteriors(prob, eps, one);
      if (one && want.z <= 0.0) want = oracle::subset_posteriors(prob, eps, false);
      const auto got = neighbor_posteriors(prob, eps, {one, 12});
      bool same = got.size() == want.marginals.size();
      for (std::size_t k = 0; same && k < got.size(); ++k) same = near(got[k], want.marginals[k]);
      bad_neighbor += !same;
    }
  }

  for (int i = 0; i < 100; ++i) {
    const auto pg = oracle::random_prob_graph(50, 0.05 + 0.05 * u(rng), rng, 0.8);
    std::vector<VertexId> q;
    for (VertexId v = 0; v < 50; ++v)
      if (u(rng) < 0.8) q.push_back(v);
    const double zeta = distance_threshold(0.7 + 0.3 * u(rng));
    const auto got = compute_inferred_sets(pg, q, zeta);
    const auto want = oracle::truncated_dijkstra(pg, q, zeta);
    bool same = got.forward.size() == want.size();
    for (std::size_t s = 0; same && s < want.size(); ++s) {
      same = got.forward[s].size() == want[s].size();
      std::size_t k = 0;
      for (const auto& [t, d] : want[s]) {
        if (!same) break;
        same = got.forward[s][k].index == t && near(got.forward[s][k].dist, d);
        ++k;
      }
    }
    bad_dijkstra += !same;
  }

  std::uniform_int_distribution<int> dim(1, 7), level(0, 5);
  for (int i = 0; i < 100; ++i) {
    const std::size_t r = dim(rng), c = dim(rng);
    ScoreMatrix m(r, c);
    for (auto& x : m.data) x = i % 2 ? u(rng) : level(rng) / 5.0;
    const auto brute = oracle::brute_assignment(m);
    const auto fast = max_weight_assignment(m);
    const auto lex = lexicographic_max_assignment(m);
    bool same = near(assignment_score(m, fast), brute.total) &&
                near(assignment_score(m, lex), brute.total);
    if (r == c) same = same && lex == brute.lexicographic;
    bad_hungarian += !same;
  }

  std::vector<EntityPair> pairs;
  std::vector<SimilarityVector> vecs;
  for (int i = 0; i < 100; ++i) {
    random_blocks(rng, pairs, vecs);
    bool same = true;
    for (std::size_t p = 0; same && p < pairs.size(); ++p)
      same = min_rank(pairs, vecs, p) == oracle::min_rank(pairs, vecs, p);
    for (std::size_t k : {1, 2, 4, 8}) same = same && prune(pairs, vecs, k) == oracle::prune(pairs, vecs, k);
    bad_prune += !same;
  }

  std::uniform_int_distribution<int> count(0, 5);
  std::uniform_real_distribution<double> lam(0.51, 0.99);
  for (int i = 0; i < 1000; ++i) {
    const double prior = u(rng);
    std::vector<double> yes(count(rng)), no(count(rng));
    for (auto& l : yes) l = lam(rng);
    for (auto& l : no) l = lam(rng);
    bad_posterior += !near(posterior(prior, yes, no), oracle::bayes(prior, yes, no));
  }

  Outcome o;
  o.ok = bad_neighbor + bad_dijkstra + bad_hungarian + bad_prune + bad_posterior == 0;
  std::ostringstream d;
  d << "mismatches: neighbor " << bad_neighbor << "/400, dijkstra " << bad_dijkstra
    << "/100, hungarian " << bad_hungarian << "/100, prune " << bad_prune
    << "/100, posterior " << bad_posterior << "/1000";
  o.detail = d.str();
  return o;
}

Outcome mle_quality() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::uint32_t> k(1, 5), n(0, 4);
  std::size_t done = 0, below = 0;
  double worst = std::numeric_limits<double>::infinity();
  while (done < 100) {
    std::vector<ConsistencyObservation> obs;
    for (auto i = k(rng); i > 0; --i) {
      ConsistencyObservation ob;
      ob.n1 = n(rng);
      ob.n2 = n(rng);
      if (ob.n1 + ob.n2 == 0) continue;
      ob.max_latent = std::uniform_int_distribution<std::uint32_t>(0, std::min(ob.n1, ob.n2))(rng);
      ob.min_latent = std::uniform_int_distribution<std::uint32_t>(0, ob.max_latent)(rng);
      obs.push_back(ob);
    }
    if (std::none_of(obs.begin(), obs.end(), [](const auto& x) { return x.n1 > 0 && x.n2 > 0; }))
      continue;
    ++done;
    const double grid = oracle::grid_mle_log_likelihood(obs, 1e-3);
    const double ll = estimate_consistency(obs).log_likelihood;
    const double margin = ll - (grid - 1e-6 * std::max(1.0, std::abs(grid)));
    worst = std::min(worst, ll - grid);
    below += margin < 0.0;
  }
  Outcome o;
  o.ok = below == 0;
  std::ostringstream d;
  d << "instances below grid: " << below << "/100, min(ll - grid) = " << worst;
  o.detail = d.str();
  return o;
}

std::vector<double> random_priors(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<double> p(n);
  for (auto& x : p) x = u(rng);
  return p;
}

Outcome greedy_guarantee() {
  std::mt19937_64 rng(88);
  std::uniform_int_distribution<std::size_t> size(3, 15), mu(1, 3);
  std::uniform_real_distribution<double> dens(0.05, 0.4);
  std::size_t bound_fail = 0, lazy_fail = 0;
  double worst_ratio = 1.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = size(rng), m = mu(rng);
    const auto inf = oracle::random_inferred_sets(n, rng, dens(rng));
    const auto priors = random_priors(n, rng);
    const auto cover = oracle::cover_of(inf);
    const auto lazy = select_questions(inf, priors, m);
    const auto plain = oracle::plain_greedy(cover, priors, m);
    lazy_fail += std::set<std::size_t>(lazy.begin(), lazy.end()) !=
                 std::set<std::size_t>(plain.begin(), plain.end());
    const double opt = oracle::brute_force_optimum(cover, priors, m);
    const double got = benefit(lazy, inf, priors);
    if (opt > 0.0) worst_ratio = std::min(worst_ratio, got / opt);
    bound_fail += got < (1.0 - 1.0 / std::exp(1.0)) * opt - 1e-12;
  }
  Outcome o;
  o.ok = bound_fail == 0 && lazy_fail == 0;
  std::ostringstream d;
  d << "bound violations " << bound_fail << "/100, lazy != plain " << lazy_fail
    << "/100, worst greedy/optimum " << worst_ratio;
  o.detail = d.str();
  return o;
}

Outcome submodularity() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t mono = 0, sub = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 12;
    const auto inf = oracle::random_inferred_sets(n, rng, 0.1 + 0.3 * u(rng));
    const auto priors = random_priors(n, rng);
    std::vector<std::size_t> q;
    for (std::size_t v = 0; v < n; ++v)
      if (u(rng) < 0.4) q.push_back(v);
    std::vector<std::size_t> rest;
    for (std::size_t v = 0; v < n; ++v)
      if (std::find(q.begin(), q.end(), v) == q.end()) rest.push_back(v);
    if (rest.size() < 2) {
      --i;
      continue;
    }
    std::shuffle(rest.begin(), rest.end(), rng);
    const std::size_t q1 = rest[0], q2 = rest[1];
    auto with1 = q, with2 = q, with12 = q;
    with1.push_back(q1);
    with2.push_back(q2);
    with12.push_back(q1);
    with12.push_back(q2);
    const double b = benefit(q, inf, priors), b1 = benefit(with1, inf, priors),
                 b2 = benefit(with2, inf, priors), b12 = benefit(with12, inf, priors);
    mono += b1 < b - 1e-12 || b12 < b1 - 1e-12;
    sub += b12 - b1 > b2 - b + 1e-12;
  }
  Outcome o;
  o.ok = mono == 0 && sub == 0;
  o.detail = "violations: monotonicity " + std::to_string(mono) + ", submodularity " +
             std::to_string(sub) + " over 1000 triples";
  return o;
}

EngineConfig toy_config() {
  EngineConfig c;
  c.kb1_attrs = kToy / "kb1_attrs.tsv";
  c.kb1_rels = kToy / "kb1_rels.tsv";
  c.kb2_attrs = kToy / "kb2_attrs.tsv";
  c.kb2_rels = kToy / "kb2_rels.tsv";
  c.gold = kToy / "gold.tsv";
  c.label_attr2 = "name";
  c.k = 4;
  c.tau = 0.9;
  c.mu = 10;
  c.assignments = 5;
  c.seed = 42;
  return c;
}

Outcome end_to_end() {
  const auto start = std::chrono::steady_clock::now();
  RunReport r[2];
  const double rates[2] = {0.0, 0.25};
  for (int i = 0; i < 2; ++i) {
    auto c = toy_config();
    c.error_rate = rates[i];
    Engine e(c);
    auto src = e.make_simulated_source();
    r[i] = e.run(*src);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome o;
  o.ok = r[0].metrics.f1 >= 0.90 && r[0].questions <= 40 &&
         std::abs(r[1].metrics.f1 - r[0].metrics.f1) <= 0.05 && secs < 30.0;
  std::ostringstream d;
  d.precision(4);
  d << "err 0: F1 " << r[0].metrics.f1 << " with " << r[0].questions << " questions; err 0.25: F1 "
    << r[1].metrics.f1 << " with " << r[1].questions << " questions; " << secs << " s";
  o.detail = d.str();
  return o;
}

Outcome pruning_monotonicity() {
  const auto kb1 = load_kb(kToy / "kb1_attrs.tsv", kToy / "kb1_rels.tsv");
  const auto kb2 = load_kb(kToy / "kb2_attrs.tsv", kToy / "kb2_rels.tsv");
  const auto gold = load_pair_file(kToy / "gold.tsv");
  auto c = toy_config();
  Outcome o;
  std::ostringstream d;
  d.precision(4);
  double prev = -1.0, rr4 = 0.0;
  for (std::size_t k : {1, 2, 4, 8}) {
    c.k = k;
    const auto pl = build_pipeline(kb1, kb2, c);
    const double pc = pair_completeness(pl.sets.retained, kb1, kb2, gold);
    if (pc < prev) o.ok = false;
    prev = pc;
    if (k == 4) rr4 = reduction_ratio(pl.sets.retained.size(), pl.sets.candidates.size());
    d << "PC(k=" << k << ")=" << pc << " ";
  }
  if (!(rr4 > 0.0)) o.ok = false;
  d << "RR(k=4)=" << rr4;
  o.detail = d.str();
  return o;
}

} // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double limit_s;
  };
  const std::vector<Criterion> criteria{
      {"worked example: Tim's films", worked_example, 1.0},
      {"oracle equivalence", oracle_equivalence, 120.0},
      {"MLE quality vs grid", mle_quality, 0.0},
      {"greedy guarantee", greedy_guarantee, 0.0},
      {"benefit submodularity/monotonicity", submodularity, 0.0},
      {"end-to-end toy run", end_to_end, 30.0},
      {"pruning monotonicity", pruning_monotonicity, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0.0 && secs >= c.limit_s) {
      o.ok = false;
      o.detail += " (over the " + std::to_string(c.limit_s) + " s limit)";
    }
    failed += !o.ok;
    std::printf("%s  %-36s %7.2f s  %s\n", o.ok ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
