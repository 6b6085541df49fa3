#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyskel/cycles.hpp"
#include "polyskel/flow.hpp"
#include "polyskel/verify.hpp"

namespace polyskel {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchemaId = "polyskel.report/1";

// 17 significant digits.
std::string format_double(double x);
json rational_json(const Rational& q);
json rational_json(const RationalVector& v);
json matrix_json(const RationalMatrix& m);
json complex_json(const std::complex<double>& z);
Rational rational_from_json(const json& j);

json skeleton_json(const SkeletonField& chi, const Polytope& poly);
json graph_json(const FlowGraph& graph, const SkeletonField& chi);
json structural_sets_json(const FlowGraph& graph, const StructuralSetSearch& search);
json branches_json(const PiecewiseLinearMap& plm);
json chart_json(const ProjectiveMap& pm);
json cycles_json(const std::vector<CycleReport>& cycles, const Polytope& poly);
json equilibria_json(const std::vector<FaceEquilibrium>& eqs);
json error_table_json(const ErrorTable& t);
json agreement_json(const AgreementReport& r, const PiecewiseLinearMap& plm);

// Table with one row per vertex: name, vertex type, characters, then orders.
void write_skeleton_table(std::ostream& os, const SkeletonField& chi, const Polytope& poly);
void write_branch_table(std::ostream& os, const PiecewiseLinearMap& plm);
void write_chart_table(std::ostream& os, const ProjectiveMap& pm);
void write_cycles_table(std::ostream& os, const std::vector<CycleReport>& cycles);
void write_equilibria_table(std::ostream& os, const std::vector<FaceEquilibrium>& eqs);
void write_error_table(std::ostream& os, const ErrorTable& t);

void write_dot(std::ostream& os, const FlowGraph& graph, const std::vector<EdgeId>& highlight = {});

// eps,sample,error,status
void write_error_csv(std::ostream& os, const ErrorTable& t);
// t,x1..xn,event
void write_trajectory_csv(std::ostream& os, const Trajectory& tr, const std::vector<EventSpec>& events);
// step,x,branch
void write_orbit_csv(std::ostream& os, const ChartOrbit& orbit, const ProjectiveMap& pm);

}  // namespace polyskel
