#include "remp/er_graph.hpp"

#include "remp/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace remp {

ErGraph ErGraph::build(std::span<const EntityPair> vertices, const KnowledgeBase& kb1,
                       const KnowledgeBase& kb2) {
  ErGraph g;
  g.vertices_.assign(vertices.begin(), vertices.end());
  g.lookup_.reserve(vertices.size());
  for (VertexId v = 0; v < g.vertices_.size(); ++v)
    g.lookup_.emplace(key(g.vertices_[v].u1, g.vertices_[v].u2), v);

  for (VertexId v = 0; v < g.vertices_.size(); ++v) {
    const auto& p = g.vertices_[v];
    for (auto r1 : kb1.out_relations(p.u1)) {
      const auto n1 = kb1.neighbors(p.u1, r1);
      for (auto r2 : kb2.out_relations(p.u2)) {
        const auto n2 = kb2.neighbors(p.u2, r2);
        for (auto a : n1)
          for (auto b : n2)
            if (auto w = g.find(a, b)) g.edges_.push_back({v, *w, r1, r2});
      }
    }
  }
  g.index_edges();
  return g;
}

void ErGraph::index_edges() {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  offsets_.assign(vertices_.size() + 1, 0);
  in_degree_.assign(vertices_.size(), 0);
  for (const auto& e : edges_) {
    ++offsets_[e.src + 1];
    ++in_degree_[e.dst];
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) offsets_[i + 1] += offsets_[i];
}

std::optional<VertexId> ErGraph::find(EntityId u1, EntityId u2) const {
  if (auto it = lookup_.find(key(u1, u2)); it != lookup_.end()) return it->second;
  return std::nullopt;
}

std::span<const ErEdge> ErGraph::out_edges(VertexId v) const {
  if (v + 1 >= offsets_.size()) return {};
  return std::span(edges_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
}

ErGraph ErGraph::without_vertices(std::span<const VertexId> removed) const {
  std::vector<bool> drop(vertices_.size(), false);
  for (auto v : removed) drop.at(v) = true;
  std::vector<VertexId> remap(vertices_.size(), 0);
  ErGraph g;
  for (VertexId v = 0; v < vertices_.size(); ++v) {
    if (drop[v]) continue;
    remap[v] = static_cast<VertexId>(g.vertices_.size());
    g.lookup_.emplace(key(vertices_[v].u1, vertices_[v].u2), remap[v]);
    g.vertices_.push_back(vertices_[v]);
  }
  for (const auto& e : edges_)
    if (!drop[e.src] && !drop[e.dst]) g.edges_.push_back({remap[e.src], remap[e.dst], e.r1, e.r2});
  g.index_edges();
  return g;
}

std::map<RelationPair, std::vector<VertexId>> neighbor_groups(const ErGraph& g, VertexId v) {
  std::map<RelationPair, std::vector<VertexId>> groups;
  for (const auto& e : g.out_edges(v)) groups[{e.r1, e.r2}].push_back(e.dst);
  return groups;
}

ProbErGraph::ProbErGraph(std::size_t vertex_count, std::vector<std::vector<ProbEdge>> adjacency) {
  offsets_.assign(vertex_count + 1, 0);
  for (std::size_t v = 0; v < vertex_count; ++v) {
    auto& list = adjacency[v];
    std::sort(list.begin(), list.end(),
              [](const ProbEdge& a, const ProbEdge& b) { return a.dst < b.dst; });
    edges_.insert(edges_.end(), list.begin(), list.end());
    offsets_[v + 1] = static_cast<std::uint32_t>(edges_.size());
  }
}

std::span<const ProbEdge> ProbErGraph::out_edges(VertexId v) const {
  if (v + 1 >= offsets_.size()) return {};
  return std::span(edges_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
}

double ProbErGraph::edge_prob(VertexId v, VertexId w) const {
  const auto out = out_edges(v);
  auto it = std::lower_bound(out.begin(), out.end(), w,
                             [](const ProbEdge& e, VertexId x) { return e.dst < x; });
  return it != out.end() && it->dst == w ? it->prob : 0.0;
}

NeighborProblem make_neighbor_problem(const ErGraph& g, VertexId v, RelationPair label,
                                      std::span<const VertexId> members,
                                      std::span<const double> priors, const KnowledgeBase& kb1,
                                      const KnowledgeBase& kb2) {
  const auto& anchor = g.vertex(v);
  NeighborProblem prob;
  prob.n1 = static_cast<std::uint32_t>(kb1.neighbors(anchor.u1, label.first).size());
  prob.n2 = static_cast<std::uint32_t>(kb2.neighbors(anchor.u2, label.second).size());
  for (auto w : members) {
    const auto& p = g.vertex(w);
    prob.cand.push_back({p.u1, p.u2, priors[w]});
  }
  return prob;
}

ProbErGraph to_probabilistic(const ErGraph& g, const ConsistencyTable& consistency,
                             std::span<const double> priors, const KnowledgeBase& kb1,
                             const KnowledgeBase& kb2, const PropagationOptions& options) {
  if (priors.size() != g.vertex_count())
    throw InvalidArgument("to_probabilistic: one prior per vertex required");
  std::vector<std::vector<ProbEdge>> adjacency(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (priors[v] <= 0.0) continue;
    auto& out = adjacency[v];
    for (const auto& [label, members] : neighbor_groups(g, v)) {
      const auto prob = make_neighbor_problem(g, v, label, members, priors, kb1, kb2);
      const auto post = neighbor_posteriors(prob, consistency.get(label), options);
      for (std::size_t i = 0; i < members.size(); ++i) {
        const VertexId w = members[i];
        if (w == v || post[i] <= 0.0) continue;
        auto it = std::find_if(out.begin(), out.end(),
                               [w](const ProbEdge& e) { return e.dst == w; });
        if (it == out.end()) {
          out.push_back({w, post[i], -std::log(post[i]), label.first, label.second});
        } else if (post[i] > it->prob) {
          *it = {w, post[i], -std::log(post[i]), label.first, label.second};
        }
      }
    }
    for (auto& e : out) e.length = std::max(0.0, e.length);
  }
  return ProbErGraph(g.vertex_count(), std::move(adjacency));
}

void write_graph_tsv(const std::filesystem::path& file, const ErGraph& g,
                     const ProbErGraph& pg, const KnowledgeBase& kb1, const KnowledgeBase& kb2) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  auto name = [&](VertexId v) {
    const auto& p = g.vertex(v);
    return escape_field(kb1.entities().name(p.u1)) + "," + escape_field(kb2.entities().name(p.u2));
  };
  for (VertexId v = 0; v < pg.vertex_count(); ++v)
    for (const auto& e : pg.out_edges(v))
      out << name(v) << '\t' << name(e.dst) << '\t' << escape_field(kb1.relations().name(e.r1))
          << '\t' << escape_field(kb2.relations().name(e.r2)) << '\t' << e.prob << '\n';
}

} // namespace remp
