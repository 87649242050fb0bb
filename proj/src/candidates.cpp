#include "remp/candidates.hpp"

#include "remp/error.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <tuple>
#include <unordered_map>

namespace remp {

namespace {

std::vector<TokenSet> label_tokens(const KnowledgeBase& kb, std::optional<AttributeId> label,
                                   const LiteralCache& cache) {
  std::vector<TokenSet> out(kb.entity_count());
  if (!label) return out;
  for (EntityId u = 0; u < kb.entity_count(); ++u) {
    TokenSet& t = out[u];
    for (auto lid : kb.attr_value_ids(u, *label)) {
      const auto& lt = cache.literal(lid).kind == LiteralKind::String
                           ? cache.tokens(lid)
                           : normalize_label(cache.literal(lid).raw);
      t.insert(t.end(), lt.begin(), lt.end());
    }
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
  }
  return out;
}

} // namespace

MatchSets generate_candidates(const KnowledgeBase& kb1, std::optional<AttributeId> label1,
                              const KnowledgeBase& kb2, std::optional<AttributeId> label2,
                              double t_label) {
  if (!(t_label > 0.0 && t_label <= 1.0))
    throw InvalidArgument("label threshold must lie in (0, 1]");
  const LiteralCache c1(kb1), c2(kb2);
  const auto tok1 = label_tokens(kb1, label1, c1);
  const auto tok2 = label_tokens(kb2, label2, c2);

  MatchSets out;
  std::unordered_map<std::string, std::vector<EntityId>> index;
  for (EntityId u = 0; u < kb2.entity_count(); ++u) {
    if (tok2[u].empty()) {
      ++out.unlabeled2;
      continue;
    }
    for (const auto& t : tok2[u]) index[t].push_back(u);
  }

  std::vector<std::uint32_t> shared(kb2.entity_count(), 0);
  std::vector<EntityId> touched;
  for (EntityId u1 = 0; u1 < kb1.entity_count(); ++u1) {
    const auto& a = tok1[u1];
    if (a.empty()) {
      ++out.unlabeled1;
      continue;
    }
    touched.clear();
    for (const auto& t : a) {
      auto it = index.find(t);
      if (it == index.end()) continue;
      for (auto u2 : it->second) {
        if (shared[u2]++ == 0) touched.push_back(u2);
      }
    }
    std::sort(touched.begin(), touched.end());
    for (auto u2 : touched) {
      const std::size_t common = shared[u2];
      shared[u2] = 0;
      const std::size_t uni = a.size() + tok2[u2].size() - common;
      const double sim = static_cast<double>(common) / static_cast<double>(uni);
      if (sim < t_label) continue;
      EntityPair p{u1, u2, sim};
      out.candidates.push_back(p);
      if (common == a.size() && common == tok2[u2].size()) out.initial.push_back(p);
    }
  }
  return out;
}

double attribute_similarity(AttributeId a1, AttributeId a2, std::span<const EntityPair> initial,
                            const KnowledgeBase& kb1, const LiteralCache& c1,
                            const KnowledgeBase& kb2, const LiteralCache& c2) {
  double total = 0.0;
  std::size_t nonempty = 0;
  for (const auto& p : initial) {
    const auto v1 = kb1.attr_value_ids(p.u1, a1);
    const auto v2 = kb2.attr_value_ids(p.u2, a2);
    if (v1.empty() && v2.empty()) continue;
    ++nonempty;
    total += extended_jaccard(c1, v1, c2, v2, kLiteralThreshold);
  }
  return nonempty == 0 ? 0.0 : total / static_cast<double>(nonempty);
}

ScoreMatrix attribute_similarity_matrix(std::span<const EntityPair> initial,
                                        const KnowledgeBase& kb1, const LiteralCache& c1,
                                        const KnowledgeBase& kb2, const LiteralCache& c2) {
  ScoreMatrix m(kb1.attribute_count(), kb2.attribute_count());
  // Only attribute pairs co-occurring on some initial match can score above 0.
  std::vector<std::uint32_t> counts(m.data.size(), 0);
  std::vector<double> sums(m.data.size(), 0.0);
  for (const auto& p : initial) {
    const auto attrs1 = kb1.attributes_of(p.u1);
    const auto attrs2 = kb2.attributes_of(p.u2);
    for (AttributeId a1 = 0; a1 < m.rows; ++a1) {
      const bool has1 = std::binary_search(attrs1.begin(), attrs1.end(), a1);
      for (AttributeId a2 = 0; a2 < m.cols; ++a2) {
        const bool has2 = std::binary_search(attrs2.begin(), attrs2.end(), a2);
        if (!has1 && !has2) continue;
        const std::size_t idx = a1 * m.cols + a2;
        ++counts[idx];
        if (has1 && has2)
          sums[idx] += extended_jaccard(c1, kb1.attr_value_ids(p.u1, a1), c2,
                                        kb2.attr_value_ids(p.u2, a2), kLiteralThreshold);
      }
    }
  }
  for (std::size_t i = 0; i < m.data.size(); ++i)
    m.data[i] = counts[i] == 0 ? 0.0 : sums[i] / counts[i];
  return m;
}

std::vector<AttributeMatch> match_attributes_1to1(std::span<const EntityPair> initial,
                                                  const KnowledgeBase& kb1,
                                                  const LiteralCache& c1,
                                                  const KnowledgeBase& kb2,
                                                  const LiteralCache& c2, double s_min) {
  const auto m = attribute_similarity_matrix(initial, kb1, c1, kb2, c2);
  const auto assignment = lexicographic_max_assignment(m);
  std::vector<AttributeMatch> out;
  for (std::size_t a1 = 0; a1 < assignment.size(); ++a1) {
    if (assignment[a1] < 0) continue;
    const auto a2 = static_cast<std::size_t>(assignment[a1]);
    const double score = m(a1, a2);
    if (score < s_min) continue;
    out.push_back({static_cast<AttributeId>(a1), static_cast<AttributeId>(a2), score});
  }
  std::sort(out.begin(), out.end(), [](const AttributeMatch& x, const AttributeMatch& y) {
    return std::tie(x.a1, x.a2) < std::tie(y.a1, y.a2);
  });
  return out;
}

SimilarityVector build_similarity_vector(const EntityPair& p,
                                         std::span<const AttributeMatch> matches,
                                         const KnowledgeBase& kb1, const LiteralCache& c1,
                                         const KnowledgeBase& kb2, const LiteralCache& c2) {
  SimilarityVector s(matches.size(), 0.0);
  for (std::size_t i = 0; i < matches.size(); ++i)
    s[i] = extended_jaccard(c1, kb1.attr_value_ids(p.u1, matches[i].a1), c2,
                            kb2.attr_value_ids(p.u2, matches[i].a2), kLiteralThreshold);
  return s;
}

bool dominates(std::span<const double> s, std::span<const double> t) {
  if (s.size() != t.size()) {
    std::fprintf(stderr, "dominates: similarity vector length mismatch\n");
    std::abort();
  }
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] < t[i]) return false;
  return true;
}

bool strictly_dominates(std::span<const double> s, std::span<const double> t) {
  if (!dominates(s, t)) return false;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] > t[i]) return true;
  return false;
}

std::size_t min_rank_side(std::span<const EntityPair> pairs,
                          std::span<const SimilarityVector> vectors, std::size_t p, int side) {
  std::size_t rank = 0;
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const bool same = side == 1 ? pairs[q].u1 == pairs[p].u1 : pairs[q].u2 == pairs[p].u2;
    if (same && strictly_dominates(vectors[q], vectors[p])) ++rank;
  }
  return rank;
}

std::size_t min_rank(std::span<const EntityPair> pairs,
                     std::span<const SimilarityVector> vectors, std::size_t p) {
  return std::max(min_rank_side(pairs, vectors, p, 1), min_rank_side(pairs, vectors, p, 2));
}

namespace {

// PruningInOneWay over the entities of one side. `members` holds indices into
// pairs/vectors; returns the retained subset.
std::vector<std::size_t> prune_one_way(std::span<const EntityPair> pairs,
                                       std::span<const SimilarityVector> vectors,
                                       std::vector<std::size_t> members, int side,
                                       std::size_t k) {
  auto entity = [&](std::size_t i) { return side == 1 ? pairs[i].u1 : pairs[i].u2; };
  std::stable_sort(members.begin(), members.end(),
                   [&](std::size_t a, std::size_t b) { return entity(a) < entity(b); });

  std::vector<std::size_t> kept;
  kept.reserve(members.size());
  std::vector<std::size_t> block;
  std::vector<bool> removed;
  for (std::size_t start = 0; start < members.size();) {
    std::size_t end = start;
    while (end < members.size() && entity(members[end]) == entity(members[start])) ++end;
    block.assign(members.begin() + static_cast<std::ptrdiff_t>(start),
                 members.begin() + static_cast<std::ptrdiff_t>(end));
    start = end;
    if (block.size() <= k) {
      kept.insert(kept.end(), block.begin(), block.end());
      continue;
    }
    // The strict dominators of a surviving pair are never removed, so ranks
    // computed on the whole block stay exact as the block shrinks.
    const std::size_t n = block.size();
    removed.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (removed[i]) continue;
      std::size_t rank = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && strictly_dominates(vectors[block[j]], vectors[block[i]])) ++rank;
      if (rank < k) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (dominates(vectors[block[i]], vectors[block[j]])) removed[j] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!removed[i]) kept.push_back(block[i]);
  }
  return kept;
}

} // namespace

std::vector<std::size_t> prune(std::span<const EntityPair> pairs,
                               std::span<const SimilarityVector> vectors, std::size_t k) {
  if (k < 1) throw InvalidArgument("prune: k must be at least 1");
  std::vector<std::size_t> all(pairs.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  auto pass1 = prune_one_way(pairs, vectors, std::move(all), 1, k);
  auto pass2 = prune_one_way(pairs, vectors, std::move(pass1), 2, k);
  std::sort(pass2.begin(), pass2.end());
  return pass2;
}

void write_pairs_tsv(const std::filesystem::path& file, std::span<const EntityPair> pairs,
                     const KnowledgeBase& kb1, const KnowledgeBase& kb2) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  for (const auto& p : pairs)
    out << escape_field(kb1.entities().name(p.u1)) << '\t'
        << escape_field(kb2.entities().name(p.u2)) << '\t' << p.prior << '\n';
}

void write_attribute_matches_tsv(const std::filesystem::path& file,
                                 std::span<const AttributeMatch> matches,
                                 const KnowledgeBase& kb1, const KnowledgeBase& kb2) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  for (const auto& m : matches)
    out << escape_field(kb1.attributes().name(m.a1)) << '\t'
        << escape_field(kb2.attributes().name(m.a2)) << '\t' << m.score << '\n';
}

} // namespace remp
