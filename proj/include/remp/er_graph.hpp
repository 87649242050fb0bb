/// @file er_graph.hpp
/// @brief ER graph over retained entity pairs and its probabilistic variant.

#pragma once

#include "remp/candidates.hpp"
#include "remp/propagation.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace remp {

using VertexId = std::uint32_t;

struct ErEdge {
  VertexId src = 0;
  VertexId dst = 0;
  RelationId r1 = 0;
  RelationId r2 = 0;
  friend auto operator<=>(const ErEdge&, const ErEdge&) = default;
};

/// Directed edge-labeled multigraph. Edge (p, p', r1, r2) exists iff
/// (u1, r1, u1') is in KB1 and (u2, r2, u2') is in KB2. Vertex ids are dense
/// and follow the order of the pairs passed to build(); out-edges are stored
/// in CSR form sorted by (src, r1, r2, dst).
class ErGraph {
public:
  ErGraph() = default;

  static ErGraph build(std::span<const EntityPair> vertices, const KnowledgeBase& kb1,
                       const KnowledgeBase& kb2);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const EntityPair& vertex(VertexId v) const { return vertices_.at(v); }
  std::span<const EntityPair> vertices() const { return vertices_; }
  std::optional<VertexId> find(EntityId u1, EntityId u2) const;

  std::span<const ErEdge> out_edges(VertexId v) const;
  std::span<const ErEdge> edges() const { return edges_; }
  std::size_t in_degree(VertexId v) const { return in_degree_.at(v); }
  /// No incident edge in either direction.
  bool isolated(VertexId v) const { return in_degree(v) == 0 && out_edges(v).empty(); }

  /// Copy of the graph without the given vertices; remaining vertices keep
  /// their relative order and are renumbered densely.
  ErGraph without_vertices(std::span<const VertexId> removed) const;

private:
  static std::uint64_t key(EntityId u1, EntityId u2) {
    return (static_cast<std::uint64_t>(u1) << 32) | u2;
  }
  void index_edges();

  std::vector<EntityPair> vertices_;
  std::unordered_map<std::uint64_t, VertexId> lookup_;
  std::vector<ErEdge> edges_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> in_degree_;
};

/// Successors of `v` grouped by edge label.
std::map<RelationPair, std::vector<VertexId>> neighbor_groups(const ErGraph& g, VertexId v);

struct ProbEdge {
  VertexId dst = 0;
  double prob = 0.0;
  double length = 0.0; // -log(prob)
  RelationId r1 = 0;   // label of the strongest parallel edge
  RelationId r2 = 0;
};

/// One weighted edge per ordered vertex pair. Rebuilt, never mutated.
class ProbErGraph {
public:
  ProbErGraph() = default;
  ProbErGraph(std::size_t vertex_count, std::vector<std::vector<ProbEdge>> adjacency);

  std::size_t vertex_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const ProbEdge> out_edges(VertexId v) const;
  /// Probability of the edge v -> w, 0 when absent.
  double edge_prob(VertexId v, VertexId w) const;

private:
  std::vector<std::uint32_t> offsets_;
  std::vector<ProbEdge> edges_;
};

/// Turns the ER graph into a probabilistic one: for every vertex and every
/// neighbor group the edge probability is the group's posterior marginal
/// given the source matches. Parallel edges keep the maximum probability,
/// zero-probability edges are dropped, and a vertex with prior 0 (a known
/// non-match) gets no out-edges.
ProbErGraph to_probabilistic(const ErGraph& g, const ConsistencyTable& consistency,
                             std::span<const double> priors, const KnowledgeBase& kb1,
                             const KnowledgeBase& kb2, const PropagationOptions& options = {});

/// The neighbor problem of one group, using `priors` for the candidates.
NeighborProblem make_neighbor_problem(const ErGraph& g, VertexId v, RelationPair label,
                                      std::span<const VertexId> members,
                                      std::span<const double> priors, const KnowledgeBase& kb1,
                                      const KnowledgeBase& kb2);

void write_graph_tsv(const std::filesystem::path& file, const ErGraph& g,
                     const ProbErGraph& pg, const KnowledgeBase& kb1, const KnowledgeBase& kb2);

} // namespace remp
