#include "remp/text_sim.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace remp {

namespace {

bool is_token_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c >= 0x80;
}

bool ascii_word(std::string_view t) {
  return std::all_of(t.begin(), t.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

} // namespace

TokenSet normalize_label(std::string_view s) {
  TokenSet tokens;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    tokens.push_back(ascii_word(cur) ? porter_stem(cur) : cur);
    cur.clear();
  };
  for (unsigned char c : s) {
    if (is_token_char(c)) {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  std::erase_if(tokens, [](const std::string& t) { return t.empty(); });
  return tokens;
}

namespace {

double numeric_sim(double a, double b) {
  const double denom = std::max(std::abs(a), std::abs(b));
  if (denom == 0.0) return 1.0;
  return std::clamp(1.0 - std::abs(a - b) / denom, 0.0, 1.0);
}

double sim_with_tokens(const TypedLiteral& a, const TokenSet& ta, const TypedLiteral& b,
                       const TokenSet& tb) {
  if (a.kind != b.kind) return 0.0;
  if (a.kind == LiteralKind::String) return jaccard(ta, tb);
  return numeric_sim(a.value, b.value);
}

// Greedy 1:1 pairing by descending similarity. Ties are ordered by the
// unordered pair of literal contents so the result does not depend on
// argument order.
struct Candidate {
  double sim;
  std::size_t i, j;
};

template <class KeyA, class KeyB>
std::size_t greedy_match_count(std::vector<Candidate>& cands, std::size_t na, std::size_t nb,
                               KeyA&& key_a, KeyB&& key_b) {
  std::sort(cands.begin(), cands.end(), [&](const Candidate& x, const Candidate& y) {
    if (x.sim != y.sim) return x.sim > y.sim;
    const auto& xa = key_a(x.i);
    const auto& xb = key_b(x.j);
    const auto& ya = key_a(y.i);
    const auto& yb = key_b(y.j);
    const auto xlo = std::min(xa, xb), xhi = std::max(xa, xb);
    const auto ylo = std::min(ya, yb), yhi = std::max(ya, yb);
    if (xlo != ylo) return xlo < ylo;
    if (xhi != yhi) return xhi < yhi;
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });
  std::vector<bool> used_a(na), used_b(nb);
  std::size_t matched = 0;
  for (const auto& c : cands) {
    if (used_a[c.i] || used_b[c.j]) continue;
    used_a[c.i] = used_b[c.j] = true;
    ++matched;
  }
  return matched;
}

std::pair<int, std::string_view> content_key(const TypedLiteral& l) {
  return {static_cast<int>(l.kind), l.raw};
}

double ratio(std::size_t matched, std::size_t na, std::size_t nb) {
  if (na + nb == 0) return 0.0;
  return static_cast<double>(matched) / static_cast<double>(na + nb - matched);
}

} // namespace

double literal_sim(const TypedLiteral& a, const TypedLiteral& b) {
  if (a.kind != b.kind) return 0.0;
  if (a.kind == LiteralKind::String)
    return jaccard(normalize_label(a.raw), normalize_label(b.raw));
  return numeric_sim(a.value, b.value);
}

double extended_jaccard(std::span<const TypedLiteral> a, std::span<const TypedLiteral> b,
                        double threshold) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<TokenSet> ta(a.size()), tb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].kind == LiteralKind::String) ta[i] = normalize_label(a[i].raw);
  for (std::size_t j = 0; j < b.size(); ++j)
    if (b[j].kind == LiteralKind::String) tb[j] = normalize_label(b[j].raw);
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double s = sim_with_tokens(a[i], ta[i], b[j], tb[j]);
      if (s >= threshold) cands.push_back({s, i, j});
    }
  const auto matched = greedy_match_count(
      cands, a.size(), b.size(), [&](std::size_t i) { return content_key(a[i]); },
      [&](std::size_t j) { return content_key(b[j]); });
  return ratio(matched, a.size(), b.size());
}

LiteralCache::LiteralCache(const KnowledgeBase& kb) : kb_(&kb), tokens_(kb.literal_count()) {
  for (LiteralId id = 0; id < kb.literal_count(); ++id) {
    const auto& lit = kb.literal(id);
    if (lit.kind == LiteralKind::String) tokens_[id] = normalize_label(lit.raw);
  }
}

double literal_sim(const LiteralCache& ca, LiteralId a, const LiteralCache& cb, LiteralId b) {
  return sim_with_tokens(ca.literal(a), ca.tokens(a), cb.literal(b), cb.tokens(b));
}

double extended_jaccard(const LiteralCache& ca, std::span<const LiteralId> a,
                        const LiteralCache& cb, std::span<const LiteralId> b,
                        double threshold) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double s = literal_sim(ca, a[i], cb, b[j]);
      if (s >= threshold) cands.push_back({s, i, j});
    }
  const auto matched = greedy_match_count(
      cands, a.size(), b.size(), [&](std::size_t i) { return content_key(ca.literal(a[i])); },
      [&](std::size_t j) { return content_key(cb.literal(b[j])); });
  return ratio(matched, a.size(), b.size());
}

} // namespace remp
