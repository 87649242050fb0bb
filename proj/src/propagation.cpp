#include "remp/propagation.hpp"

#include "remp/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <tuple>

namespace remp {

Consistency ConsistencyTable::get(RelationPair label) const {
  if (auto it = table_.find(label); it != table_.end()) return it->second;
  return {};
}

void ConsistencyTable::write_tsv(const std::string& file, const KnowledgeBase& kb1,
                                 const KnowledgeBase& kb2) const {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file);
  for (const auto& [label, c] : table_)
    out << escape_field(kb1.relations().name(label.first)) << '\t'
        << escape_field(kb2.relations().name(label.second)) << '\t' << c.eps1 << '\t' << c.eps2
        << '\n';
}

std::uint32_t max_matching_size(std::span<const std::pair<EntityId, EntityId>> pairs) {
  // Kuhn's augmenting paths over compacted left/right ids.
  std::vector<EntityId> left, right;
  for (const auto& [a, b] : pairs) {
    left.push_back(a);
    right.push_back(b);
  }
  std::sort(left.begin(), left.end());
  left.erase(std::unique(left.begin(), left.end()), left.end());
  std::sort(right.begin(), right.end());
  right.erase(std::unique(right.begin(), right.end()), right.end());
  std::vector<std::vector<std::size_t>> adj(left.size());
  for (const auto& [a, b] : pairs) {
    const auto i = static_cast<std::size_t>(std::lower_bound(left.begin(), left.end(), a) - left.begin());
    const auto j = static_cast<std::size_t>(std::lower_bound(right.begin(), right.end(), b) - right.begin());
    adj[i].push_back(j);
  }
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> match_right(right.size(), none);
  std::vector<bool> seen;
  std::function<bool(std::size_t)> augment = [&](std::size_t i) {
    for (auto j : adj[i]) {
      if (seen[j]) continue;
      seen[j] = true;
      if (match_right[j] == none || augment(match_right[j])) {
        match_right[j] = i;
        return true;
      }
    }
    return false;
  };
  std::uint32_t size = 0;
  for (std::size_t i = 0; i < left.size(); ++i) {
    seen.assign(right.size(), false);
    if (augment(i)) ++size;
  }
  return size;
}

std::vector<ConsistencyObservation>
consistency_observations(RelationId r1, RelationId r2, std::span<const EntityPair> seeds,
                         const KnowledgeBase& kb1, const KnowledgeBase& kb2,
                         const PairPredicate& is_candidate, const PairPredicate& is_known) {
  std::vector<ConsistencyObservation> obs;
  std::vector<std::pair<EntityId, EntityId>> cand, known;
  for (const auto& s : seeds) {
    const auto n1 = kb1.neighbors(s.u1, r1);
    const auto n2 = kb2.neighbors(s.u2, r2);
    if (n1.empty() && n2.empty()) continue;
    cand.clear();
    known.clear();
    for (auto a : n1)
      for (auto b : n2) {
        const bool k = is_known && is_known(a, b);
        if (k) known.emplace_back(a, b);
        if (k || is_candidate(a, b)) cand.emplace_back(a, b);
      }
    obs.push_back({static_cast<std::uint32_t>(n1.size()), static_cast<std::uint32_t>(n2.size()),
                   max_matching_size(cand), max_matching_size(known)});
  }
  return obs;
}

namespace {

double log_choose(std::uint32_t n, std::uint32_t k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// x log p with 0 log 0 = 0
double xlogp(double x, double p) {
  if (x == 0.0) return 0.0;
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  return x * std::log(p);
}

struct Totals {
  double n1 = 0.0;
  double n2 = 0.0;
};

Totals totals(std::span<const ConsistencyObservation> obs) {
  Totals t;
  for (const auto& o : obs) {
    t.n1 += o.n1;
    t.n2 += o.n2;
  }
  return t;
}

double latent_term(const ConsistencyObservation& o, std::uint32_t l) {
  return log_choose(o.n1, l) + log_choose(o.n2, l);
}

// argmax over L of log c(L) + L log ζ; ties go to the smaller L.
std::uint32_t best_latent(const ConsistencyObservation& o, double log_zeta) {
  if (std::isinf(log_zeta)) return log_zeta > 0 ? o.max_latent : o.min_latent;
  std::uint32_t best = o.min_latent;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::uint32_t l = o.min_latent; l <= o.max_latent; ++l) {
    const double v = latent_term(o, l) + l * log_zeta;
    if (v > best_val) {
      best_val = v;
      best = l;
    }
  }
  return best;
}

double log_zeta_of(double eps1, double eps2) {
  auto logit = [](double e) {
    if (e <= 0.0) return -std::numeric_limits<double>::infinity();
    if (e >= 1.0) return std::numeric_limits<double>::infinity();
    return std::log(e) - std::log1p(-e);
  };
  return logit(eps1) + logit(eps2);
}

std::pair<double, double> closed_form_eps(std::span<const ConsistencyObservation> obs,
                                          std::span<const std::uint32_t> latents, Totals t) {
  double sum_l = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) sum_l += latents[i];
  return {t.n1 > 0 ? sum_l / t.n1 : 0.0, t.n2 > 0 ? sum_l / t.n2 : 0.0};
}

std::vector<std::uint32_t> latents_for(std::span<const ConsistencyObservation> obs,
                                       double log_zeta) {
  std::vector<std::uint32_t> l(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) l[i] = best_latent(obs[i], log_zeta);
  return l;
}

} // namespace

double consistency_log_likelihood(std::span<const ConsistencyObservation> obs, double eps1,
                                  double eps2, std::span<const std::uint32_t> latents) {
  double sum_l = 0.0, ll = 0.0;
  const Totals t = totals(obs);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    ll += latent_term(obs[i], latents[i]);
    sum_l += latents[i];
  }
  ll += xlogp(sum_l, eps1) + xlogp(t.n1 - sum_l, 1.0 - eps1);
  ll += xlogp(sum_l, eps2) + xlogp(t.n2 - sum_l, 1.0 - eps2);
  return ll;
}

std::vector<double> consistency_fixed_point_trace(std::span<const ConsistencyObservation> obs,
                                                  double eps1, double eps2,
                                                  int max_iterations) {
  std::vector<double> trace;
  if (obs.empty()) return trace;
  const Totals t = totals(obs);
  auto latents = latents_for(obs, log_zeta_of(eps1, eps2));
  trace.push_back(consistency_log_likelihood(obs, eps1, eps2, latents));
  for (int it = 0; it < max_iterations; ++it) {
    std::tie(eps1, eps2) = closed_form_eps(obs, latents, t);
    trace.push_back(consistency_log_likelihood(obs, eps1, eps2, latents));
    auto next = latents_for(obs, log_zeta_of(eps1, eps2));
    trace.push_back(consistency_log_likelihood(obs, eps1, eps2, next));
    if (next == latents) break;
    latents = std::move(next);
  }
  return trace;
}

ConsistencyEstimate estimate_consistency(std::span<const ConsistencyObservation> obs) {
  ConsistencyEstimate est;
  const bool informative = std::any_of(obs.begin(), obs.end(), [](const auto& o) {
    return o.n1 > 0 && o.n2 > 0;
  });
  if (!informative) return est;

  const Totals t = totals(obs);
  // Breakpoints in log ζ where two latent values of one observation tie.
  std::vector<double> cuts;
  for (const auto& o : obs)
    for (std::uint32_t a = o.min_latent; a <= o.max_latent; ++a)
      for (std::uint32_t b = a + 1; b <= o.max_latent; ++b)
        cuts.push_back((latent_term(o, a) - latent_term(o, b)) / static_cast<double>(b - a));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> probes;
  if (cuts.empty()) {
    probes.push_back(0.0);
  } else {
    probes.push_back(cuts.front() - 1.0);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) probes.push_back(0.5 * (cuts[i] + cuts[i + 1]));
    probes.push_back(cuts.back() + 1.0);
  }

  double best_ll = -std::numeric_limits<double>::infinity();
  for (double log_zeta : probes) {
    auto latents = latents_for(obs, log_zeta);
    const auto [e1, e2] = closed_form_eps(obs, latents, t);
    const double ll = consistency_log_likelihood(obs, e1, e2, latents);
    if (ll > best_ll) {
      best_ll = ll;
      est.raw_eps1 = e1;
      est.raw_eps2 = e2;
      est.latents = std::move(latents);
    }
  }

  // Alternating polish; never accepts a worse point.
  for (int it = 0; it < 100; ++it) {
    auto next = latents_for(obs, log_zeta_of(est.raw_eps1, est.raw_eps2));
    const auto [e1, e2] = closed_form_eps(obs, next, t);
    const double ll = consistency_log_likelihood(obs, e1, e2, next);
    if (!(ll > best_ll + 1e-12)) break;
    best_ll = ll;
    est.raw_eps1 = e1;
    est.raw_eps2 = e2;
    est.latents = std::move(next);
  }

  est.log_likelihood = best_ll;
  est.eps1 = std::clamp(est.raw_eps1, kEpsMin, kEpsMax);
  est.eps2 = std::clamp(est.raw_eps2, kEpsMin, kEpsMax);
  return est;
}

Consistency estimate_consistency(RelationId r1, RelationId r2,
                                 std::span<const EntityPair> seeds, const KnowledgeBase& kb1,
                                 const KnowledgeBase& kb2, const PairPredicate& is_candidate,
                                 const PairPredicate& is_known) {
  const auto obs = consistency_observations(r1, r2, seeds, kb1, kb2, is_candidate, is_known);
  const auto est = estimate_consistency(obs);
  return {est.eps1, est.eps2};
}

namespace {

double group_factor(double eps, std::uint32_t n, std::uint32_t used) {
  return std::pow(eps, used) * std::pow(1.0 - eps, static_cast<double>(n) - used);
}

// Enumeration state over a compacted candidate list.
struct Enumerator {
  const std::vector<NeighborCandidate>& cand;
  std::vector<std::uint32_t> left;  // compact u1 index per candidate
  std::vector<std::uint32_t> right; // compact u2 index per candidate
  std::vector<std::uint32_t> left_use, right_use;
  std::uint32_t n1, n2;
  Consistency eps;
  bool one_to_one;
  double z = 0.0;
  std::vector<double> mass;
  std::vector<bool> chosen;
  std::uint32_t distinct_left = 0, distinct_right = 0;

  Enumerator(const std::vector<NeighborCandidate>& c, std::uint32_t n1_, std::uint32_t n2_,
             Consistency e, bool one)
      : cand(c), n1(n1_), n2(n2_), eps(e), one_to_one(one), mass(c.size(), 0.0),
        chosen(c.size(), false) {
    auto compact = [&](auto key, std::vector<std::uint32_t>& out, std::vector<std::uint32_t>& use) {
      std::vector<EntityId> ids;
      for (const auto& x : cand) ids.push_back(key(x));
      std::vector<EntityId> uniq = ids;
      std::sort(uniq.begin(), uniq.end());
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      for (auto id : ids)
        out.push_back(static_cast<std::uint32_t>(
            std::lower_bound(uniq.begin(), uniq.end(), id) - uniq.begin()));
      use.assign(uniq.size(), 0);
    };
    compact([](const NeighborCandidate& x) { return x.u1; }, left, left_use);
    compact([](const NeighborCandidate& x) { return x.u2; }, right, right_use);
  }

  void run(std::size_t i, double f) {
    if (f == 0.0) return;
    if (i == cand.size()) {
      const double w = f * group_factor(eps.eps1, n1, distinct_left) *
                       group_factor(eps.eps2, n2, distinct_right);
      z += w;
      for (std::size_t j = 0; j < cand.size(); ++j)
        if (chosen[j]) mass[j] += w;
      return;
    }
    const double p = cand[i].prior;
    run(i + 1, f * (1.0 - p));
    if (one_to_one && (left_use[left[i]] > 0 || right_use[right[i]] > 0)) return;
    chosen[i] = true;
    if (left_use[left[i]]++ == 0) ++distinct_left;
    if (right_use[right[i]]++ == 0) ++distinct_right;
    run(i + 1, f * p);
    if (--left_use[left[i]] == 0) --distinct_left;
    if (--right_use[right[i]] == 0) --distinct_right;
    chosen[i] = false;
  }
};

} // namespace

double subset_score(const NeighborProblem& prob, std::span<const std::size_t> members,
                    Consistency eps) {
  std::vector<bool> in(prob.cand.size(), false);
  for (auto m : members) in.at(m) = true;
  double f = 1.0;
  std::vector<EntityId> lefts, rights;
  for (std::size_t i = 0; i < prob.cand.size(); ++i) {
    if (in[i]) {
      f *= prob.cand[i].prior;
      lefts.push_back(prob.cand[i].u1);
      rights.push_back(prob.cand[i].u2);
    } else {
      f *= 1.0 - prob.cand[i].prior;
    }
  }
  std::sort(lefts.begin(), lefts.end());
  std::sort(rights.begin(), rights.end());
  const auto d1 = static_cast<std::uint32_t>(std::unique(lefts.begin(), lefts.end()) - lefts.begin());
  const auto d2 = static_cast<std::uint32_t>(std::unique(rights.begin(), rights.end()) - rights.begin());
  return f * group_factor(eps.eps1, prob.n1, d1) * group_factor(eps.eps2, prob.n2, d2);
}

std::vector<double> neighbor_posteriors(const NeighborProblem& prob, Consistency eps,
                                        const PropagationOptions& options) {
  std::vector<double> out(prob.cand.size(), 0.0);
  if (prob.cand.empty()) return out;

  // Keep the highest-prior candidates; the rest are fixed non-matches.
  std::vector<std::size_t> order(prob.cand.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (order.size() > options.max_enumerated) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return prob.cand[a].prior > prob.cand[b].prior;
    });
    order.resize(options.max_enumerated);
    std::sort(order.begin(), order.end());
  }
  std::vector<NeighborCandidate> kept;
  for (auto i : order) kept.push_back(prob.cand[i]);

  auto enumerate = [&](bool one_to_one) {
    Enumerator e(kept, prob.n1, prob.n2, eps, one_to_one);
    e.run(0, 1.0);
    return std::make_pair(e.z, std::move(e.mass));
  };
  auto [z, mass] = enumerate(options.one_to_one);
  if (z <= 0.0 && options.one_to_one) {
    // Conflicting certain matches admit no 1:1 subset.
    std::tie(z, mass) = enumerate(false);
  }
  if (z <= 0.0) return out;
  for (std::size_t k = 0; k < order.size(); ++k)
    out[order[k]] = std::clamp(mass[k] / z, 0.0, 1.0);
  return out;
}

double path_lower_bound(std::span<const double> edge_probs) {
  double p = 1.0;
  for (double e : edge_probs) p *= e;
  return p;
}

} // namespace remp
