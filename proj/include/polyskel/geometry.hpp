#pragma once

#include <optional>
#include <string>
#include <vector>

namespace polyskel {

using VertexId = std::size_t;
using EdgeId = std::size_t;
using FacetId = std::size_t;

struct PrismType {
  std::vector<int> groups;

  std::size_t strategies() const;
  std::size_t dimension() const { return strategies() - groups.size(); }
  std::size_t vertex_count() const;
  // Strategy index range [begin, end) of each group.
  std::vector<std::pair<std::size_t, std::size_t>> ranges() const;
  std::size_t group_of(std::size_t strategy) const;
  void validate() const;
};

struct Edge {
  VertexId a;
  VertexId b;
};

struct FaceRef {
  enum class Kind { vertex, edge };
  Kind kind;
  std::size_t index;
};

struct SectorSupport {
  FaceRef face;
  std::vector<FacetId> coords;  // sorted facet indices
};

struct Corner {
  VertexId vertex;
  EdgeId edge;
  FacetId facet;
};

// Combinatorial simple polytope: vertices with their facet sets, edges, corners.
class Polytope {
 public:
  static Polytope prism(const PrismType& type);
  static Polytope simplex(int n) { return prism(PrismType{{n}}); }
  // General simple polytope from vertex-facet incidence. Edges are derived
  // (two vertices are adjacent iff they share d-1 facets) and validated.
  static Polytope from_incidence(std::size_t dim, std::size_t facet_count,
                                 std::vector<std::vector<FacetId>> vertex_facets);

  std::size_t dim() const { return dim_; }
  std::size_t facet_count() const { return facet_count_; }
  std::size_t vertex_count() const { return vertex_facets_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<FacetId>& facets_of(VertexId v) const { return vertex_facets_.at(v); }
  bool incident(VertexId v, FacetId s) const;
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const std::vector<EdgeId>& edges_at(VertexId v) const { return vertex_edges_.at(v); }
  VertexId other_end(EdgeId e, VertexId v) const;
  std::optional<EdgeId> find_edge(VertexId v, VertexId w) const;

  // The facet sigma with edge ∩ sigma = {v}.
  FacetId corner_facet(VertexId v, EdgeId e) const;
  // The edge at v leaving the facet s (s must contain v).
  EdgeId corner_edge(VertexId v, FacetId s) const;
  std::vector<Corner> corners() const;

  SectorSupport dual_support_vertex(VertexId v) const;
  SectorSupport dual_support_edge(EdgeId e) const;

  const std::optional<PrismType>& prism_type() const { return prism_; }
  // Active strategy (0-based, global index) per group, prisms only.
  const std::vector<std::size_t>& vertex_tuple(VertexId v) const { return tuples_.at(v); }

  static std::string vertex_name(VertexId v) { return "v" + std::to_string(v + 1); }
  static std::string edge_name(EdgeId e) { return "g" + std::to_string(e + 1); }
  static std::string facet_name(FacetId s) { return "s" + std::to_string(s + 1); }
  // Accepts "g5", "G5", "γ5" or a plain 1-based number.
  std::optional<EdgeId> parse_edge(const std::string& name) const;

 private:
  void build_adjacency();
  void validate() const;

  std::size_t dim_ = 0;
  std::size_t facet_count_ = 0;
  std::vector<std::vector<FacetId>> vertex_facets_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> vertex_edges_;
  std::optional<PrismType> prism_;
  std::vector<std::vector<std::size_t>> tuples_;
};

}  // namespace polyskel
