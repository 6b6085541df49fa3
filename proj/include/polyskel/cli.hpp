#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "polyskel/games.hpp"
#include "polyskel/report.hpp"

namespace polyskel {

enum ExitCode { kExitOk = 0, kExitValidation = 2, kExitHypothesis = 3, kExitNumeric = 4 };

// {"groups": [2,2,2], "payoff": [[...], ...]}. Entries are numbers or
// strings "p/q". A single group gives the replicator game.
GameModel parse_game_json(const json& j);
GameModel parse_game(const std::string& path);

// Comma-separated edge names (g5, γ5 or 5).
std::vector<EdgeId> parse_edge_list(const Polytope& poly, const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polyskel
