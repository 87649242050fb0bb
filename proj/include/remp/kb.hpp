/// @file kb.hpp
/// @brief In-memory knowledge base: interned ids, typed literals, triple
///        storage and adjacency indexes.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace remp {

using EntityId = std::uint32_t;
using AttributeId = std::uint32_t;
using RelationId = std::uint32_t;
using LiteralId = std::uint32_t;

enum class LiteralKind : std::uint8_t { String, Number, Date };

std::string_view to_string(LiteralKind kind);
std::optional<LiteralKind> parse_literal_kind(std::string_view s);

/// A literal together with its declared kind. Numbers carry their parsed
/// value; dates carry days since 1970-01-01.
struct TypedLiteral {
  std::string raw;
  LiteralKind kind = LiteralKind::String;
  double value = 0.0;

  /// Builds a literal of the requested kind. Returns nullopt when `raw` does
  /// not parse as that kind (finite decimal, ISO-8601 calendar date).
  static std::optional<TypedLiteral> make(std::string raw, LiteralKind kind);
  static TypedLiteral string(std::string raw);

  friend bool operator==(const TypedLiteral& a, const TypedLiteral& b) {
    return a.kind == b.kind && a.raw == b.raw;
  }
};

/// Parses `YYYY-MM-DD` into days since the Unix epoch.
std::optional<std::int64_t> parse_iso_date(std::string_view s);

/// Bidirectional string <-> dense id table.
class Interner {
public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct AttrTriple {
  EntityId entity;
  AttributeId attribute;
  LiteralId literal;
  friend auto operator<=>(const AttrTriple&, const AttrTriple&) = default;
};

struct RelTriple {
  EntityId head;
  RelationId relation;
  EntityId tail;
  friend auto operator<=>(const RelTriple&, const RelTriple&) = default;
};

/// Counters reported by the TSV loader.
struct LoadStats {
  std::size_t attr_lines = 0;
  std::size_t rel_lines = 0;
  std::size_t malformed_lines = 0;
  std::size_t kind_fallbacks = 0;
  std::size_t duplicates = 0;
};

class KnowledgeBase;

/// Accumulates triples, then freezes them into an immutable KnowledgeBase.
class KnowledgeBaseBuilder {
public:
  /// Returns false when the literal did not parse as `kind` and was stored
  /// as a string instead.
  bool add_attribute(std::string_view entity, std::string_view attribute,
                     std::string_view literal, LiteralKind kind);
  void add_relation(std::string_view head, std::string_view relation,
                    std::string_view tail);

  /// Deduplicates triples; `duplicates` receives the number dropped.
  KnowledgeBase build(std::size_t* duplicates = nullptr) &&;

private:
  friend class KnowledgeBase;
  Interner entities_;
  Interner attributes_;
  Interner relations_;
  std::vector<TypedLiteral> literals_;
  std::unordered_map<std::string, LiteralId> literal_ids_;
  std::vector<AttrTriple> attr_triples_;
  std::vector<RelTriple> rel_triples_;
};

/// Immutable after construction; safe for concurrent reads.
class KnowledgeBase {
public:
  KnowledgeBase() = default;

  std::size_t entity_count() const { return entities_.size(); }
  std::size_t attribute_count() const { return attributes_.size(); }
  std::size_t relation_count() const { return relations_.size(); }
  std::size_t literal_count() const { return literals_.size(); }

  const Interner& entities() const { return entities_; }
  const Interner& attributes() const { return attributes_; }
  const Interner& relations() const { return relations_; }

  const TypedLiteral& literal(LiteralId id) const { return literals_.at(id); }
  std::span<const AttrTriple> attr_triples() const { return attr_triples_; }
  std::span<const RelTriple> rel_triples() const { return rel_triples_; }

  /// Objects of (u, r, ·), sorted ascending. Unknown ids give an empty span.
  std::span<const EntityId> neighbors(EntityId u, RelationId r) const;
  /// Subjects of (·, r, u), sorted ascending.
  std::span<const EntityId> inverse_neighbors(EntityId u, RelationId r) const;
  /// Distinct relationships with at least one (u, r, ·) triple.
  std::span<const RelationId> out_relations(EntityId u) const;

  /// Literal ids of (u, a, ·), sorted ascending.
  std::span<const LiteralId> attr_value_ids(EntityId u, AttributeId a) const;
  std::vector<TypedLiteral> attr_values(EntityId u, AttributeId a) const;
  /// Distinct attributes with at least one (u, a, ·) triple.
  std::span<const AttributeId> attributes_of(EntityId u) const;

  /// Writes the triples back out in the loader's TSV format.
  void export_tsv(const std::filesystem::path& attr_file,
                  const std::filesystem::path& rel_file) const;

private:
  friend class KnowledgeBaseBuilder;

  struct Slice {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
  };
  // Per-entity index: a sorted list of keys with a slice into a value pool.
  struct KeyedIndex {
    std::vector<std::uint32_t> key_offsets; // size = entities + 1
    std::vector<std::uint32_t> keys;
    std::vector<Slice> slices;
    std::vector<std::uint32_t> values;

    std::span<const std::uint32_t> keys_of(std::uint32_t u) const;
    std::span<const std::uint32_t> lookup(std::uint32_t u, std::uint32_t key) const;
  };

  // rows are (owner, key, value) triples
  static KeyedIndex build_index(std::size_t entity_count,
                                std::vector<std::array<std::uint32_t, 3>> rows);

  Interner entities_;
  Interner attributes_;
  Interner relations_;
  std::vector<TypedLiteral> literals_;
  std::vector<AttrTriple> attr_triples_;
  std::vector<RelTriple> rel_triples_;
  KeyedIndex out_;
  KeyedIndex in_;
  KeyedIndex attrs_;
};

/// Loads a KB from the attribute and relationship TSV files. Malformed lines
/// are skipped and counted in `stats`.
KnowledgeBase load_kb(const std::filesystem::path& attr_file,
                      const std::filesystem::path& rel_file,
                      LoadStats* stats = nullptr);

/// Undoes the `\t`, `\n` and `\\` escapes used in literal columns.
std::string unescape_field(std::string_view s);
std::string escape_field(std::string_view s);

} // namespace remp
