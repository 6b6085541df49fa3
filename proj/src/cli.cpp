#include "polyskel/cli.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "polyskel/batch.hpp"

namespace polyskel {

GameModel parse_game_json(const json& j) {
  if (!j.is_object()) throw ValidationError("game file must hold a JSON object");
  if (!j.contains("payoff")) throw ValidationError("game file lacks \"payoff\"");
  const json& p = j.at("payoff");
  if (!p.is_array() || p.empty()) throw ValidationError("\"payoff\" must be a non-empty array of rows");
  std::vector<RationalVector> rows;
  for (const auto& r : p) {
    if (!r.is_array()) throw ValidationError("\"payoff\" rows must be arrays");
    RationalVector row;
    for (const auto& x : r) row.push_back(rational_from_json(x));
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  for (const auto& r : rows)
    if (r.size() != n) throw ValidationError("payoff matrix must be square");
  PrismType type;
  if (j.contains("groups")) {
    for (const auto& g : j.at("groups")) {
      if (!g.is_number_integer()) throw ValidationError("group sizes must be integers");
      type.groups.push_back(g.get<int>());
    }
  } else {
    type.groups = {static_cast<int>(n)};
  }
  type.validate();
  if (type.strategies() != n)
    throw ValidationError("payoff is " + std::to_string(n) + "x" + std::to_string(n) + " but the groups hold " +
                          std::to_string(type.strategies()) + " strategies");
  const auto m = RationalMatrix::from_rows(rows);
  if (type.groups.size() == 1) return GameModel::replicator(m);
  return GameModel::polymatrix(type, m);
}

GameModel parse_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
  return parse_game_json(j);
}

std::vector<EdgeId> parse_edge_list(const Polytope& poly, const std::string& text) {
  std::vector<EdgeId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    auto e = poly.parse_edge(item);
    if (!e) throw ValidationError("unknown edge '" + item + "'");
    out.push_back(*e);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("not a number: '" + item + "'");
    }
  }
  return out;
}

namespace {

// Everything derived from the game that the subcommands share.
struct Analysis {
  GameModel game;
  Polytope poly;
  SkeletonField chi;

  explicit Analysis(const std::string& path)
      : game(parse_game(path)),
        poly(Polytope::prism(game.groups())),
        chi(game.kind() == GameKind::replicator ? skeleton_replicator(game.payoff()) : skeleton_polymatrix(game)) {}
};

std::vector<EdgeId> choose_set(const FlowGraph& g, const std::string& text) {
  if (!text.empty()) {
    auto s = parse_edge_list(g.polytope(), text);
    auto cert = certify_structural_set(g, s);
    if (!cert.acyclic_after_removal) {
      std::string msg = "not a structural set: cycle";
      for (EdgeId e : *cert.witness_cycle) msg += " " + Polytope::edge_name(e);
      msg += " avoids it";
      throw ValidationError(msg);
    }
    return s;
  }
  auto search = find_structural_sets(g);
  if (search.acyclic || search.sets.empty()) throw HypothesisError("the flowing-edge graph has no cycles");
  return search.sets.front();
}

json envelope(const std::string& command) {
  json j;
  j["schema"] = kSchemaId;
  j["command"] = command;
  return j;
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Skeleton character, Poincaré maps and cycle analysis of polymatrix replicator games"};
  app.name("polyskel");
  app.require_subcommand(1);

  std::string game_path, set_text;
  std::size_t limit = 1000, max_period = 2;
  std::deque<std::string> formats_store;
  std::map<const CLI::App*, std::string*> format_of;
  auto add_common = [&](CLI::App* sub, const std::string& default_format, std::vector<std::string> formats) {
    sub->add_option("game", game_path, "game JSON file")->required();
    std::string& f = formats_store.emplace_back(default_format);
    format_of[sub] = &f;
    sub->add_option("--format", f, "output format")->check(CLI::IsMember(formats));
  };

  auto* sk = app.add_subcommand("skeleton", "orders and characters per vertex");
  add_common(sk, "text", {"text", "json"});
  auto* gr = app.add_subcommand("graph", "flowing-edge graph");
  add_common(gr, "dot", {"dot", "json"});
  gr->add_option("--structural-set", set_text, "edges to highlight");
  auto* ss = app.add_subcommand("structural-sets", "inclusion-minimal structural sets");
  add_common(ss, "text", {"text", "json"});
  ss->add_option("--limit", limit, "maximal number of sets");
  auto* pc = app.add_subcommand("poincare", "branch table of the skeleton Poincaré map");
  add_common(pc, "text", {"text", "json"});
  pc->add_option("--structural-set", set_text, "comma-separated edges, e.g. g5,g8");
  auto* pr = app.add_subcommand("projective", "projective chart pieces and breakpoints");
  add_common(pr, "text", {"text", "json", "csv"});
  pr->add_option("--structural-set", set_text, "comma-separated edges");
  double x0 = 0.5;
  std::size_t steps = 100;
  pr->add_option("--x0", x0, "chart start point for csv orbits");
  pr->add_option("--steps", steps, "orbit length for csv orbits");
  auto* cy = app.add_subcommand("cycles", "periodic points of the projective map");
  add_common(cy, "text", {"text", "json"});
  cy->add_option("--structural-set", set_text, "comma-separated edges");
  cy->add_option("--max-period", max_period, "longest cyclic word");
  auto* eq = app.add_subcommand("equilibria", "equilibria on every face");
  add_common(eq, "text", {"text", "json"});

  auto* ve = app.add_subcommand("verify", "rescaled return maps against the skeleton map");
  add_common(ve, "csv", {"csv", "json", "text"});
  ve->add_option("--structural-set", set_text, "comma-separated edges");
  std::string branch_name = "xi1", eps_text = "0.5,0.3,0.2,0.1", oracle_edge;
  AsymptoticsOptions vopt;
  AgreementOptions aopt;
  std::size_t samples = 10;
  std::uint64_t seed = 7;
  double level = 0.25, r = 0.5, rtol = 1e-10;
  int threads = 0;
  bool serial = false;
  ve->add_option("--branch", branch_name, "branch name");
  ve->add_option("--eps", eps_text, "strictly decreasing epsilon schedule");
  ve->add_option("--samples", samples, "number of samples");
  ve->add_option("--seed", seed, "RNG seed");
  ve->add_option("--r", r, "samples lie in Pi(eps^r)");
  ve->add_option("--level", level, "section level c in (0,1]");
  ve->add_option("--rtol", rtol, "integrator relative tolerance");
  ve->add_option("--threads", threads, "worker threads (default POLYSKEL_THREADS or all)");
  ve->add_flag("--serial", serial, "run samples serially");
  ve->add_option("--oracle", oracle_edge, "compare branch selection on this structural edge instead");

  auto* si = app.add_subcommand("simulate", "trajectory CSV");
  add_common(si, "csv", {"csv"});
  std::string x0_text, stop_facet;
  double t_end = 10, dt = 0;
  si->add_option("--x0", x0_text, "start state, comma separated")->required();
  si->add_option("--t", t_end, "final time");
  si->add_option("--dt", dt, "sampling interval (0 records every step)");
  si->add_option("--stop-facet", stop_facet, "stop when x_s crosses --level, e.g. s3");
  si->add_option("--level", level, "event level");
  si->add_option("--rtol", rtol, "integrator relative tolerance");

  auto* an = app.add_subcommand("analyze", "all exact artifacts in one JSON report");
  add_common(an, "json", {"json"});
  an->add_option("--structural-set", set_text, "comma-separated edges");
  an->add_option("--max-period", max_period, "longest cyclic word");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }
  const std::string format = *format_of.at(app.get_subcommands().front());

  try {
    Analysis a(game_path);
    if (sk->parsed()) {
      if (format == "json") {
        json j = envelope("skeleton");
        j["skeleton"] = skeleton_json(a.chi, a.poly);
        print_json(out, j);
      } else {
        write_skeleton_table(out, a.chi, a.poly);
      }
      return kExitOk;
    }
    if (eq->parsed()) {
      auto eqs = equilibria(a.game);
      if (format == "json") {
        json j = envelope("equilibria");
        j["equilibria"] = equilibria_json(eqs);
        print_json(out, j);
      } else {
        write_equilibria_table(out, eqs);
      }
      return kExitOk;
    }
    if (si->parsed()) {
      auto x = parse_double_list(x0_text);
      if (x.size() != a.game.strategies()) throw ValidationError("--x0 has the wrong length");
      std::vector<EventSpec> events;
      if (!stop_facet.empty()) {
        std::string s = stop_facet;
        if (!s.empty() && (s[0] == 's' || s[0] == 'S')) s.erase(0, 1);
        std::size_t k = 0;
        try {
          k = std::stoul(s);
        } catch (const std::exception&) {
          throw ValidationError("bad facet '" + stop_facet + "'");
        }
        if (k < 1 || k > a.game.strategies()) throw ValidationError("facet out of range");
        events.push_back({k - 1, level, 0});
      }
      IntegratorOptions io;
      io.rtol = rtol;
      auto tr = integrate(a.game, x, t_end, events, io, dt);
      if (tr.stop == Trajectory::Stop::step_underflow || tr.stop == Trajectory::Stop::max_steps)
        throw NumericError("integration stopped early");
      write_trajectory_csv(out, tr, events);
      return kExitOk;
    }

    const bool strict = pc->parsed() || cy->parsed() || pr->parsed() || ve->parsed() || an->parsed();
    FlowGraph g = build_flow_graph(a.chi, a.poly, strict);
    if (gr->parsed()) {
      std::vector<EdgeId> hl;
      if (!set_text.empty()) hl = parse_edge_list(a.poly, set_text);
      if (format == "json") {
        json j = envelope("graph");
        j["graph"] = graph_json(g, a.chi);
        print_json(out, j);
      } else {
        write_dot(out, g, hl);
      }
      return kExitOk;
    }
    if (ss->parsed()) {
      auto search = find_structural_sets(g, limit);
      if (format == "json") {
        json j = envelope("structural-sets");
        j["structural_sets"] = structural_sets_json(g, search);
        print_json(out, j);
      } else {
        if (search.acyclic) out << "graph is acyclic\n";
        for (const auto& s : search.sets) {
          out << "{";
          for (std::size_t k = 0; k < s.size(); ++k) out << (k ? ", " : "") << Polytope::edge_name(s[k]);
          out << "}\n";
        }
        if (search.truncated) out << "(truncated)\n";
      }
      return kExitOk;
    }

    const auto s = choose_set(g, set_text);
    const auto plm = PiecewiseLinearMap::build(a.chi, g, s);
    if (pc->parsed()) {
      if (format == "json") {
        json j = envelope("poincare");
        j["poincare"] = branches_json(plm);
        print_json(out, j);
      } else {
        write_branch_table(out, plm);
      }
      return kExitOk;
    }
    const auto pm = projectivize(plm);
    if (pr->parsed()) {
      if (format == "json") {
        json j = envelope("projective");
        j["projective"] = chart_json(pm);
        print_json(out, j);
      } else if (format == "csv") {
        write_orbit_csv(out, chart_dynamics(pm, x0, steps, 1e-9), pm);
      } else {
        write_chart_table(out, pm);
      }
      return kExitOk;
    }
    if (cy->parsed()) {
      auto cycles = fixed_and_periodic_points(pm, max_period);
      if (format == "json") {
        json j = envelope("cycles");
        j["cycles"] = cycles_json(cycles, a.poly);
        print_json(out, j);
      } else {
        write_cycles_table(out, cycles);
      }
      return kExitOk;
    }
    if (ve->parsed()) {
      const bool parallel = !serial;
      if (!oracle_edge.empty()) {
        auto e = a.poly.parse_edge(oracle_edge);
        if (!e) throw ValidationError("unknown edge '" + oracle_edge + "'");
        aopt.samples = samples;
        aopt.seed = seed;
        aopt.eps = parse_double_list(eps_text).back();
        aopt.r = r;
        aopt.level = level;
        aopt.integrator.rtol = rtol;
        aopt.parallel = parallel;
        aopt.threads = threads;
        auto rep = oracle_agreement(a.game, a.chi, g, plm, *e, aopt);
        if (format == "text") {
          out << rep.agree << "/" << rep.cases.size() << " agree (" << rep.excluded << " excluded)\n";
        } else {
          json j = envelope("verify");
          j["agreement"] = agreement_json(rep, plm);
          print_json(out, j);
        }
        return kExitOk;
      }
      auto k = plm.find_branch(branch_name);
      if (!k) throw ValidationError("unknown branch '" + branch_name + "'");
      vopt.eps = parse_double_list(eps_text);
      vopt.samples = samples;
      vopt.sampling.seed = seed;
      vopt.sampling.r = r;
      vopt.level = level;
      vopt.integrator.rtol = rtol;
      vopt.parallel = parallel;
      vopt.threads = threads;
      auto t = verify_asymptotics(a.game, a.chi, g, plm, *k, vopt);
      if (format == "json") {
        json j = envelope("verify");
        j["verify"] = error_table_json(t);
        print_json(out, j);
      } else if (format == "text") {
        write_error_table(out, t);
      } else {
        write_error_csv(out, t);
      }
      return kExitOk;
    }
    if (an->parsed()) {
      json j = envelope("analyze");
      j["skeleton"] = skeleton_json(a.chi, a.poly);
      j["graph"] = graph_json(g, a.chi);
      j["structural_sets"] = structural_sets_json(g, find_structural_sets(g, limit));
      j["poincare"] = branches_json(plm);
      j["projective"] = chart_json(pm);
      j["cycles"] = cycles_json(fixed_and_periodic_points(pm, max_period), a.poly);
      j["equilibria"] = equilibria_json(equilibria(a.game));
      print_json(out, j);
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const HypothesisError& e) {
    err << "hypothesis failure: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace polyskel
