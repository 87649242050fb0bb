#include "remp/selection.hpp"

#include "remp/error.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace remp {

InferredSets compute_inferred_sets(const ProbErGraph& pg, std::span<const VertexId> questions,
                                   double zeta) {
  if (zeta < 0.0) throw InvalidArgument("distance threshold must be non-negative");
  InferredSets inf;
  inf.questions.assign(questions.begin(), questions.end());
  std::sort(inf.questions.begin(), inf.questions.end());
  inf.questions.erase(std::unique(inf.questions.begin(), inf.questions.end()),
                      inf.questions.end());
  const std::size_t n = inf.questions.size();
  constexpr std::size_t absent = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> pos(pg.vertex_count(), absent);
  for (std::size_t i = 0; i < n; ++i) pos.at(inf.questions[i]) = i;

  inf.forward.assign(n, {});
  inf.backward.assign(n, {});
  const double limit = zeta + kDistanceSlack;
  constexpr double unreached = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, unreached);
  std::vector<std::size_t> touched;
  using Item = std::pair<double, std::size_t>;
  for (std::size_t s = 0; s < n; ++s) {
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[s] = 0.0;
    touched.assign(1, s);
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      const auto [d, i] = heap.top();
      heap.pop();
      if (d > dist[i]) continue;
      for (const auto& e : pg.out_edges(inf.questions[i])) {
        const std::size_t j = pos[e.dst];
        if (j == absent) continue;
        const double nd = d + e.length;
        if (nd > limit || nd >= dist[j]) continue;
        if (dist[j] == unreached) touched.push_back(j);
        dist[j] = nd;
        heap.emplace(nd, j);
      }
    }
    std::sort(touched.begin(), touched.end());
    for (auto j : touched) {
      inf.forward[s].push_back({j, dist[j]});
      inf.backward[j].push_back({s, dist[j]});
      dist[j] = unreached;
    }
  }
  return inf;
}

bool can_propagate(const InferredSets& inf) {
  for (const auto& row : inf.forward)
    if (row.size() > 1) return true;
  return false;
}

std::vector<double> distances_from_sources(const ProbErGraph& pg,
                                           std::span<const VertexId> sources, double zeta) {
  constexpr double unreached = std::numeric_limits<double>::infinity();
  std::vector<double> dist(pg.vertex_count(), unreached);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (auto s : sources) {
    dist.at(s) = 0.0;
    heap.emplace(0.0, s);
  }
  const double limit = zeta + kDistanceSlack;
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const auto& e : pg.out_edges(v)) {
      const double nd = d + e.length;
      if (nd > limit || nd >= dist[e.dst]) continue;
      dist[e.dst] = nd;
      heap.emplace(nd, e.dst);
    }
  }
  return dist;
}

double benefit(std::span<const std::size_t> selected, const InferredSets& inf,
               std::span<const double> priors) {
  std::vector<double> miss(inf.questions.size(), 1.0);
  for (auto q : selected)
    for (const auto& e : inf.forward.at(q)) miss[e.index] *= 1.0 - priors[q];
  double total = 0.0;
  for (double m : miss) total += 1.0 - m;
  return total;
}

std::vector<std::size_t> select_questions(const InferredSets& inf, std::span<const double> priors,
                                          std::size_t mu) {
  const std::size_t n = inf.questions.size();
  std::vector<std::size_t> picked;
  if (n == 0 || mu == 0) return picked;

  // b[p]: probability p is already inferred by the picked questions.
  std::vector<double> b(n, 0.0);
  auto gain = [&](std::size_t q) {
    double g = 0.0;
    for (const auto& e : inf.forward[q]) g += 1.0 - b[e.index];
    return g * priors[q];
  };

  struct Entry {
    double gain;
    std::size_t q;
  };
  // max-gain first; positions follow vertex order, so smaller q wins ties
  auto worse = [](const Entry& x, const Entry& y) {
    if (x.gain != y.gain) return x.gain < y.gain;
    return x.q > y.q;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> pq(worse);
  for (std::size_t q = 0; q < n; ++q) {
    const double g = gain(q);
    if (g > 0.0) pq.push({g, q});
  }

  while (picked.size() < mu && !pq.empty()) {
    const Entry top = pq.top();
    pq.pop();
    const double fresh = gain(top.q);
    if (fresh <= 0.0) continue; // gains only shrink
    const Entry candidate{fresh, top.q};
    if (pq.empty() || !worse(candidate, pq.top())) {
      picked.push_back(top.q);
      for (const auto& e : inf.forward[top.q]) b[e.index] += (1.0 - b[e.index]) * priors[top.q];
    } else {
      pq.push(candidate);
    }
  }
  return picked;
}

} // namespace remp
