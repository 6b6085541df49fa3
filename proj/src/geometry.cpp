#include "polyskel/geometry.hpp"

#include <algorithm>
#include <numeric>

#include "polyskel/rational.hpp"

namespace polyskel {

std::size_t PrismType::strategies() const {
  std::size_t n = 0;
  for (int g : groups) n += static_cast<std::size_t>(g);
  return n;
}

std::size_t PrismType::vertex_count() const {
  std::size_t c = 1;
  for (int g : groups) c *= static_cast<std::size_t>(g);
  return c;
}

std::vector<std::pair<std::size_t, std::size_t>> PrismType::ranges() const {
  std::vector<std::pair<std::size_t, std::size_t>> r;
  std::size_t b = 0;
  for (int g : groups) {
    r.emplace_back(b, b + static_cast<std::size_t>(g));
    b += static_cast<std::size_t>(g);
  }
  return r;
}

std::size_t PrismType::group_of(std::size_t strategy) const {
  std::size_t b = 0;
  for (std::size_t a = 0; a < groups.size(); ++a) {
    b += static_cast<std::size_t>(groups[a]);
    if (strategy < b) return a;
  }
  throw std::out_of_range("strategy index out of range");
}

void PrismType::validate() const {
  if (groups.empty()) throw ValidationError("prism type needs at least one group");
  for (int g : groups)
    if (g < 1) throw ValidationError("group sizes must be >= 1");
}

Polytope Polytope::prism(const PrismType& type) {
  type.validate();
  Polytope p;
  p.prism_ = type;
  p.facet_count_ = type.strategies();
  p.dim_ = type.dimension();
  const auto ranges = type.ranges();
  const std::size_t groups = ranges.size();

  // Vertices in lexicographic order of their strategy tuples.
  std::vector<std::size_t> tuple(groups);
  for (std::size_t a = 0; a < groups; ++a) tuple[a] = ranges[a].first;
  for (;;) {
    p.tuples_.push_back(tuple);
    std::vector<FacetId> f;
    for (std::size_t i = 0; i < p.facet_count_; ++i)
      if (std::find(tuple.begin(), tuple.end(), i) == tuple.end()) f.push_back(i);
    p.vertex_facets_.push_back(std::move(f));
    std::size_t a = groups;
    while (a-- > 0) {
      if (++tuple[a] < ranges[a].second) break;
      tuple[a] = ranges[a].first;
    }
    if (a == static_cast<std::size_t>(-1)) break;
  }

  // Edges: last group first; inside a group, pairs in lexicographic order.
  const std::size_t nv = p.vertex_facets_.size();
  for (std::size_t a = groups; a-- > 0;) {
    for (VertexId v = 0; v < nv; ++v)
      for (VertexId w = v + 1; w < nv; ++w) {
        std::size_t diff = 0, where = 0;
        for (std::size_t b = 0; b < groups; ++b)
          if (p.tuples_[v][b] != p.tuples_[w][b]) {
            ++diff;
            where = b;
          }
        if (diff == 1 && where == a) p.edges_.push_back({v, w});
      }
  }
  p.build_adjacency();
  p.validate();
  return p;
}

Polytope Polytope::from_incidence(std::size_t dim, std::size_t facet_count,
                                  std::vector<std::vector<FacetId>> vertex_facets) {
  Polytope p;
  p.dim_ = dim;
  p.facet_count_ = facet_count;
  for (auto& f : vertex_facets) {
    std::sort(f.begin(), f.end());
    if (std::adjacent_find(f.begin(), f.end()) != f.end())
      throw ValidationError("repeated facet in a vertex incidence list");
    for (FacetId s : f)
      if (s >= facet_count) throw ValidationError("facet index out of range");
  }
  p.vertex_facets_ = std::move(vertex_facets);
  const std::size_t nv = p.vertex_facets_.size();
  for (VertexId v = 0; v < nv; ++v)
    for (VertexId w = v + 1; w < nv; ++w) {
      std::vector<FacetId> common;
      std::set_intersection(p.vertex_facets_[v].begin(), p.vertex_facets_[v].end(),
                            p.vertex_facets_[w].begin(), p.vertex_facets_[w].end(),
                            std::back_inserter(common));
      if (common.size() + 1 == dim) p.edges_.push_back({v, w});
    }
  p.build_adjacency();
  p.validate();
  return p;
}

void Polytope::build_adjacency() {
  vertex_edges_.assign(vertex_facets_.size(), {});
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    vertex_edges_[edges_[e].a].push_back(e);
    vertex_edges_[edges_[e].b].push_back(e);
  }
}

void Polytope::validate() const {
  if (vertex_facets_.empty()) throw ValidationError("polytope without vertices");
  for (VertexId v = 0; v < vertex_facets_.size(); ++v) {
    if (vertex_facets_[v].size() != dim_)
      throw ValidationError("vertex " + vertex_name(v) + " is not simple: " +
                            std::to_string(vertex_facets_[v].size()) + " facets, d = " +
                            std::to_string(dim_));
    if (vertex_edges_[v].size() != dim_)
      throw ValidationError("vertex " + vertex_name(v) + " has " +
                            std::to_string(vertex_edges_[v].size()) + " edges, d = " +
                            std::to_string(dim_));
    for (VertexId w = v + 1; w < vertex_facets_.size(); ++w)
      if (vertex_facets_[v] == vertex_facets_[w])
        throw ValidationError("vertices " + vertex_name(v) + " and " + vertex_name(w) +
                              " share all facets");
  }
  for (VertexId v = 0; v < vertex_facets_.size(); ++v) {
    std::vector<FacetId> seen;
    for (EdgeId e : vertex_edges_[v]) seen.push_back(corner_facet(v, e));
    std::sort(seen.begin(), seen.end());
    if (seen != vertex_facets_[v])
      throw ValidationError("corner structure broken at " + vertex_name(v));
  }
}

bool Polytope::incident(VertexId v, FacetId s) const {
  const auto& f = vertex_facets_.at(v);
  return std::binary_search(f.begin(), f.end(), s);
}

VertexId Polytope::other_end(EdgeId e, VertexId v) const {
  const Edge& g = edges_.at(e);
  if (g.a == v) return g.b;
  if (g.b == v) return g.a;
  throw std::invalid_argument(vertex_name(v) + " is not an endpoint of " + edge_name(e));
}

std::optional<EdgeId> Polytope::find_edge(VertexId v, VertexId w) const {
  for (EdgeId e : vertex_edges_.at(v))
    if (other_end(e, v) == w) return e;
  return std::nullopt;
}

FacetId Polytope::corner_facet(VertexId v, EdgeId e) const {
  VertexId w = other_end(e, v);
  for (FacetId s : vertex_facets_[v])
    if (!incident(w, s)) return s;
  throw std::logic_error("edge without corner facet");
}

EdgeId Polytope::corner_edge(VertexId v, FacetId s) const {
  for (EdgeId e : vertex_edges_.at(v))
    if (corner_facet(v, e) == s) return e;
  throw std::invalid_argument(facet_name(s) + " does not contain " + vertex_name(v));
}

std::vector<Corner> Polytope::corners() const {
  std::vector<Corner> out;
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    out.push_back({edges_[e].a, e, corner_facet(edges_[e].a, e)});
    out.push_back({edges_[e].b, e, corner_facet(edges_[e].b, e)});
  }
  return out;
}

SectorSupport Polytope::dual_support_vertex(VertexId v) const {
  return {{FaceRef::Kind::vertex, v}, vertex_facets_.at(v)};
}

SectorSupport Polytope::dual_support_edge(EdgeId e) const {
  const Edge& g = edges_.at(e);
  std::vector<FacetId> common;
  std::set_intersection(vertex_facets_[g.a].begin(), vertex_facets_[g.a].end(),
                        vertex_facets_[g.b].begin(), vertex_facets_[g.b].end(),
                        std::back_inserter(common));
  return {{FaceRef::Kind::edge, e}, common};
}

std::optional<EdgeId> Polytope::parse_edge(const std::string& name) const {
  std::string digits = name;
  if (!digits.empty() && (digits[0] == 'g' || digits[0] == 'G')) digits = digits.substr(1);
  else if (digits.rfind("\xce\xb3", 0) == 0) digits = digits.substr(2);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) return std::nullopt;
  std::size_t k = std::stoul(digits);
  if (k < 1 || k > edges_.size()) return std::nullopt;
  return k - 1;
}

}  // namespace polyskel
