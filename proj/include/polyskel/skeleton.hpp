#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyskel/games.hpp"
#include "polyskel/geometry.hpp"
#include "polyskel/linalg.hpp"

namespace polyskel {

enum class VertexType { repelling, attractive, saddle };
std::string to_string(VertexType t);

VertexType classify_vertex(const SkeletonField& chi, const Polytope& poly, VertexId v);

struct EdgeClass {
  enum class Kind { flowing, neutral, attracting, repelling, undefined };
  Kind kind = Kind::neutral;
  VertexId source = 0;  // meaningful for flowing edges
  VertexId target = 0;
};
std::string to_string(EdgeClass::Kind k);

EdgeClass classify_edge(const SkeletonField& chi, const Polytope& poly, EdgeId e);

class FlowGraph {
 public:
  FlowGraph(const Polytope& poly, std::vector<EdgeClass> classes);

  const Polytope& polytope() const { return *poly_; }
  const std::vector<EdgeClass>& classes() const { return classes_; }
  const EdgeClass& edge_class(EdgeId e) const { return classes_.at(e); }
  bool is_arc(EdgeId e) const { return classes_.at(e).kind == EdgeClass::Kind::flowing; }
  VertexId source(EdgeId e) const { return classes_.at(e).source; }
  VertexId target(EdgeId e) const { return classes_.at(e).target; }
  const std::vector<EdgeId>& arcs() const { return arcs_; }
  const std::vector<EdgeId>& out_arcs(VertexId v) const { return out_.at(v); }
  const std::vector<EdgeId>& in_arcs(VertexId v) const { return in_.at(v); }
  bool regular() const { return undefined_.empty(); }
  const std::vector<EdgeId>& undefined_edges() const { return undefined_; }

  // A directed cycle (as arc list) avoiding the removed arcs, if any.
  std::optional<std::vector<EdgeId>> find_cycle(const std::vector<EdgeId>& removed = {}) const;

 private:
  const Polytope* poly_;
  std::vector<EdgeClass> classes_;
  std::vector<EdgeId> arcs_, undefined_;
  std::vector<std::vector<EdgeId>> out_, in_;
};

// Throws HypothesisError naming undefined edges when strict and non-regular.
FlowGraph build_flow_graph(const SkeletonField& chi, const Polytope& poly, bool strict = false);

// Cone {u != 0 : u_k >= 0 on the support, a.u > 0 for every row}. Rows are
// full |F|-length vectors vanishing off the support, primitive integers.
struct ConeDomain {
  SectorSupport support;
  std::vector<RationalVector> rows;
  bool empty = false;

  // Row restricted to the support coordinates.
  RationalVector restricted_row(std::size_t k) const;
  bool contains(const RationalVector& u) const;
  // Float membership with margin tol on every row (rows scaled to unit
  // max-norm, u to unit sum).
  bool contains(const std::vector<double>& u, double tol) const;
  // Smallest row slack, or the most negative coordinate; +inf without rows.
  double row_slack(const std::vector<double>& u) const;
  // Smallest slack over coordinates and rows (distance-like to the boundary
  // of the open cone, negative when outside).
  double slack(const std::vector<double>& u) const;
};

struct TransitionMatrix {
  RationalMatrix matrix;  // |F| x |F|
  FacetId pivot = 0;
  EdgeId from = 0, to = 0;
  VertexId vertex = 0;
};

struct Transition {
  ConeDomain domain;
  TransitionMatrix map;
};

Transition transition_map(const SkeletonField& chi, const FlowGraph& graph, EdgeId in, EdgeId out);

struct StructuralSetSearch {
  std::vector<std::vector<EdgeId>> sets;  // sorted by size then lexicographically
  bool truncated = false;
  bool acyclic = false;
};

// Inclusion-minimal arc sets meeting every directed cycle. Every returned set
// passes is_structural_set.
StructuralSetSearch find_structural_sets(const FlowGraph& graph, std::size_t limit = 1000);

struct StructuralCertificate {
  bool acyclic_after_removal = false;
  std::optional<std::vector<EdgeId>> witness_cycle;  // when not acyclic
  std::vector<bool> member_needed;                   // per member of S
  bool valid() const;
};
StructuralCertificate certify_structural_set(const FlowGraph& graph, const std::vector<EdgeId>& s);

using Itinerary = std::vector<EdgeId>;

// All flowing paths from S to S with no interior S-edge. Ordered by source
// edge, target edge, then the edge sequence.
std::vector<Itinerary> enumerate_branches(const FlowGraph& graph, const std::vector<EdgeId>& s);

struct Branch {
  std::string name;  // "xi1", ...
  Itinerary itinerary;
  ConeDomain domain;  // on the source edge sector
  RationalMatrix matrix;
  EdgeId source = 0, target = 0;

  RationalMatrix restricted_matrix(const Polytope& poly) const;
};

// Product of transition matrices along the itinerary and the pulled-back
// domain, reduced to a minimal primitive inequality system.
Branch branch_map(const SkeletonField& chi, const FlowGraph& graph, const Itinerary& xi);

struct PoincareStep {
  enum class Status { ok, boundary, outside };
  Status status = Status::outside;
  std::size_t branch = 0;
  EdgeId edge = 0;
  RationalVector image;
};

struct PoincareStepD {
  PoincareStep::Status status = PoincareStep::Status::outside;
  std::size_t branch = 0;
  EdgeId edge = 0;
  std::vector<double> image;
};

class PiecewiseLinearMap {
 public:
  PiecewiseLinearMap() = default;
  static PiecewiseLinearMap build(const SkeletonField& chi, const FlowGraph& graph,
                                  const std::vector<EdgeId>& s);

  const std::vector<EdgeId>& structural_set() const { return s_; }
  const std::vector<Branch>& branches() const { return branches_; }
  const std::vector<Itinerary>& empty_branches() const { return empty_; }
  const Polytope& polytope() const { return *poly_; }
  std::optional<std::size_t> find_branch(const std::string& name) const;

  // u is a full |F| vector supported on the sector of `edge`.
  PoincareStep apply(EdgeId edge, const RationalVector& u) const;
  PoincareStepD apply(EdgeId edge, const std::vector<double>& u, double tol = 1e-12) const;

 private:
  const Polytope* poly_ = nullptr;
  std::vector<EdgeId> s_;
  std::vector<Branch> branches_;
  std::vector<Itinerary> empty_;
};

PoincareStep s_poincare(const PiecewiseLinearMap& plm, EdgeId edge, const RationalVector& u);

struct IterateResult {
  std::vector<std::pair<EdgeId, RationalVector>> points;  // includes the start
  std::vector<std::size_t> branches;                      // branch used at each step
  bool completed = false;
  std::size_t stop_step = 0;
  PoincareStep::Status stop_reason = PoincareStep::Status::ok;
};

enum class Direction { forward, backward };

// Backward iteration uses the map built from -chi with the same structural
// set, which inverts the forward one branch by branch.
IterateResult iterate(const PiecewiseLinearMap& forward, const PiecewiseLinearMap& backward,
                      EdgeId edge, const RationalVector& u, std::size_t steps, Direction dir);

// Vertex-type and edge-type hypotheses under which the branch domains cover
// the sections up to measure zero.
struct PartitionHypotheses {
  bool all_saddles = true;
  bool no_attracting_or_repelling_edges = true;
  bool holds() const { return all_saddles && no_attracting_or_repelling_edges; }
};
PartitionHypotheses check_partition_hypotheses(const SkeletonField& chi, const FlowGraph& graph);

}  // namespace polyskel
