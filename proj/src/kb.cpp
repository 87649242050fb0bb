#include "remp/kb.hpp"

#include "remp/error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>

namespace remp {

std::string_view to_string(LiteralKind kind) {
  switch (kind) {
  case LiteralKind::String: return "string";
  case LiteralKind::Number: return "number";
  case LiteralKind::Date: return "date";
  }
  return "string";
}

std::optional<LiteralKind> parse_literal_kind(std::string_view s) {
  if (s == "string") return LiteralKind::String;
  if (s == "number") return LiteralKind::Number;
  if (s == "date") return LiteralKind::Date;
  return std::nullopt;
}

std::optional<std::int64_t> parse_iso_date(std::string_view s) {
  // YYYY-MM-DD, optionally with a leading minus on the year
  if (s.size() < 10) return std::nullopt;
  const auto dash2 = s.size() - 3;
  const auto dash1 = s.size() - 6;
  if (s[dash1] != '-' || s[dash2] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  auto parse = [](std::string_view part, auto& out) {
    if (part.empty()) return false;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    return ec == std::errc{} && ptr == part.data() + part.size();
  };
  if (!parse(s.substr(0, dash1), y) || !parse(s.substr(dash1 + 1, 2), m) ||
      !parse(s.substr(dash2 + 1, 2), d))
    return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd}.time_since_epoch().count();
}

std::optional<TypedLiteral> TypedLiteral::make(std::string raw, LiteralKind kind) {
  TypedLiteral lit;
  lit.kind = kind;
  switch (kind) {
  case LiteralKind::String:
    break;
  case LiteralKind::Number: {
    std::string_view sv = raw;
    if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (sv.empty() || ec != std::errc{} || ptr != sv.data() + sv.size() ||
        !std::isfinite(v))
      return std::nullopt;
    lit.value = v;
    break;
  }
  case LiteralKind::Date: {
    auto days = parse_iso_date(raw);
    if (!days) return std::nullopt;
    lit.value = static_cast<double>(*days);
    break;
  }
  }
  lit.raw = std::move(raw);
  return lit;
}

TypedLiteral TypedLiteral::string(std::string raw) {
  return TypedLiteral{std::move(raw), LiteralKind::String, 0.0};
}

std::uint32_t Interner::intern(std::string_view name) {
  if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> Interner::find(std::string_view name) const {
  if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
  return std::nullopt;
}

bool KnowledgeBaseBuilder::add_attribute(std::string_view entity,
                                         std::string_view attribute,
                                         std::string_view literal,
                                         LiteralKind kind) {
  auto parsed = TypedLiteral::make(std::string(literal), kind);
  const bool ok = parsed.has_value();
  TypedLiteral lit = ok ? std::move(*parsed) : TypedLiteral::string(std::string(literal));

  std::string key;
  key.reserve(lit.raw.size() + 2);
  key.push_back(static_cast<char>('0' + static_cast<int>(lit.kind)));
  key.push_back('\x1f');
  key += lit.raw;
  LiteralId lid;
  if (auto it = literal_ids_.find(key); it != literal_ids_.end()) {
    lid = it->second;
  } else {
    lid = static_cast<LiteralId>(literals_.size());
    literals_.push_back(std::move(lit));
    literal_ids_.emplace(std::move(key), lid);
  }
  const auto e = entities_.intern(entity);
  const auto a = attributes_.intern(attribute);
  attr_triples_.push_back({e, a, lid});
  return ok;
}

void KnowledgeBaseBuilder::add_relation(std::string_view head,
                                        std::string_view relation,
                                        std::string_view tail) {
  const auto h = entities_.intern(head);
  const auto r = relations_.intern(relation);
  const auto t = entities_.intern(tail);
  rel_triples_.push_back({h, r, t});
}

KnowledgeBase KnowledgeBaseBuilder::build(std::size_t* duplicates) && {
  KnowledgeBase kb;
  const std::size_t before = attr_triples_.size() + rel_triples_.size();
  std::sort(attr_triples_.begin(), attr_triples_.end());
  attr_triples_.erase(std::unique(attr_triples_.begin(), attr_triples_.end()),
                      attr_triples_.end());
  std::sort(rel_triples_.begin(), rel_triples_.end());
  rel_triples_.erase(std::unique(rel_triples_.begin(), rel_triples_.end()),
                     rel_triples_.end());
  if (duplicates) *duplicates = before - attr_triples_.size() - rel_triples_.size();

  const std::size_t n = entities_.size();
  std::vector<std::array<std::uint32_t, 3>> rows;
  rows.reserve(rel_triples_.size());
  for (const auto& t : rel_triples_) rows.push_back({t.head, t.relation, t.tail});
  kb.out_ = KnowledgeBase::build_index(n, rows);
  rows.clear();
  for (const auto& t : rel_triples_) rows.push_back({t.tail, t.relation, t.head});
  kb.in_ = KnowledgeBase::build_index(n, std::move(rows));
  rows = {};
  for (const auto& t : attr_triples_) rows.push_back({t.entity, t.attribute, t.literal});
  kb.attrs_ = KnowledgeBase::build_index(n, std::move(rows));

  kb.entities_ = std::move(entities_);
  kb.attributes_ = std::move(attributes_);
  kb.relations_ = std::move(relations_);
  kb.literals_ = std::move(literals_);
  kb.attr_triples_ = std::move(attr_triples_);
  kb.rel_triples_ = std::move(rel_triples_);
  return kb;
}

KnowledgeBase::KeyedIndex
KnowledgeBase::build_index(std::size_t entity_count,
                           std::vector<std::array<std::uint32_t, 3>> rows) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  KeyedIndex idx;
  idx.key_offsets.assign(entity_count + 1, 0);
  idx.values.reserve(rows.size());
  std::size_t i = 0;
  for (std::uint32_t u = 0; u < entity_count; ++u) {
    idx.key_offsets[u] = static_cast<std::uint32_t>(idx.keys.size());
    while (i < rows.size() && rows[i][0] == u) {
      const auto key = rows[i][1];
      Slice slice{static_cast<std::uint32_t>(idx.values.size()), 0};
      while (i < rows.size() && rows[i][0] == u && rows[i][1] == key)
        idx.values.push_back(rows[i++][2]);
      slice.end = static_cast<std::uint32_t>(idx.values.size());
      idx.keys.push_back(key);
      idx.slices.push_back(slice);
    }
  }
  idx.key_offsets[entity_count] = static_cast<std::uint32_t>(idx.keys.size());
  return idx;
}

std::span<const std::uint32_t> KnowledgeBase::KeyedIndex::keys_of(std::uint32_t u) const {
  if (u + 1 >= key_offsets.size()) return {};
  return std::span(keys).subspan(key_offsets[u], key_offsets[u + 1] - key_offsets[u]);
}

std::span<const std::uint32_t> KnowledgeBase::KeyedIndex::lookup(std::uint32_t u,
                                                                 std::uint32_t key) const {
  if (u + 1 >= key_offsets.size()) return {};
  const auto first = keys.begin() + key_offsets[u];
  const auto last = keys.begin() + key_offsets[u + 1];
  const auto it = std::lower_bound(first, last, key);
  if (it == last || *it != key) return {};
  const auto& s = slices[static_cast<std::size_t>(it - keys.begin())];
  return std::span(values).subspan(s.begin, s.end - s.begin);
}

std::span<const EntityId> KnowledgeBase::neighbors(EntityId u, RelationId r) const {
  return out_.lookup(u, r);
}

std::span<const EntityId> KnowledgeBase::inverse_neighbors(EntityId u, RelationId r) const {
  return in_.lookup(u, r);
}

std::span<const RelationId> KnowledgeBase::out_relations(EntityId u) const {
  return out_.keys_of(u);
}

std::span<const LiteralId> KnowledgeBase::attr_value_ids(EntityId u, AttributeId a) const {
  return attrs_.lookup(u, a);
}

std::vector<TypedLiteral> KnowledgeBase::attr_values(EntityId u, AttributeId a) const {
  std::vector<TypedLiteral> out;
  for (auto id : attr_value_ids(u, a)) out.push_back(literals_[id]);
  return out;
}

std::span<const AttributeId> KnowledgeBase::attributes_of(EntityId u) const {
  return attrs_.keys_of(u);
}

std::string unescape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      switch (s[i + 1]) {
      case 't': out.push_back('\t'); ++i; continue;
      case 'n': out.push_back('\n'); ++i; continue;
      case '\\': out.push_back('\\'); ++i; continue;
      default: break;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

std::string escape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
    case '\t': out += "\\t"; break;
    case '\n': out += "\\n"; break;
    case '\\': out += "\\\\"; break;
    default: out.push_back(c);
    }
  }
  return out;
}

void KnowledgeBase::export_tsv(const std::filesystem::path& attr_file,
                               const std::filesystem::path& rel_file) const {
  std::ofstream attrs(attr_file), rels(rel_file);
  if (!attrs || !rels) throw IoError("cannot write KB export files");
  for (const auto& t : attr_triples_) {
    const auto& lit = literals_[t.literal];
    attrs << escape_field(entities_.name(t.entity)) << '\t'
          << escape_field(attributes_.name(t.attribute)) << '\t' << escape_field(lit.raw)
          << '\t' << to_string(lit.kind) << '\n';
  }
  for (const auto& t : rel_triples_) {
    rels << escape_field(entities_.name(t.head)) << '\t'
         << escape_field(relations_.name(t.relation)) << '\t'
         << escape_field(entities_.name(t.tail)) << '\n';
  }
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cols;
}

template <class Fn>
void for_each_line(const std::filesystem::path& file, Fn&& fn) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    fn(std::string_view(line));
  }
}

} // namespace

KnowledgeBase load_kb(const std::filesystem::path& attr_file,
                      const std::filesystem::path& rel_file, LoadStats* stats) {
  LoadStats local;
  KnowledgeBaseBuilder builder;
  for_each_line(attr_file, [&](std::string_view line) {
    auto cols = split_tabs(line);
    if (cols.size() != 4 || cols[0].empty() || cols[1].empty()) {
      ++local.malformed_lines;
      return;
    }
    ++local.attr_lines;
    auto kind = parse_literal_kind(cols[3]);
    if (!kind) ++local.kind_fallbacks;
    const bool parsed = builder.add_attribute(unescape_field(cols[0]), unescape_field(cols[1]),
                                              unescape_field(cols[2]),
                                              kind.value_or(LiteralKind::String));
    if (kind && !parsed) ++local.kind_fallbacks;
  });
  for_each_line(rel_file, [&](std::string_view line) {
    auto cols = split_tabs(line);
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty() || cols[2].empty()) {
      ++local.malformed_lines;
      return;
    }
    ++local.rel_lines;
    builder.add_relation(unescape_field(cols[0]), unescape_field(cols[1]),
                         unescape_field(cols[2]));
  });
  auto kb = std::move(builder).build(&local.duplicates);
  if (stats) *stats = local;
  return kb;
}

} // namespace remp
