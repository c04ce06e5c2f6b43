// Built-in programs: F-Logic Lite, the grid rules and 3-colorability.

#ifndef CHASEKIT_RULESETS_H_
#define CHASEKIT_RULESETS_H_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chasekit/parser.h"

namespace chasekit {

// Eleven TGDs and the functional-attribute EGD, no facts.
Program fll_rules();

// The grid rules with the fact index(0).
Program grid_rules();

struct GraphSpec {
  std::vector<std::string> vertices;
  std::vector<std::pair<std::string, std::string>> edges;
};

GraphSpec complete_graph(std::size_t n);
GraphSpec cycle_graph(std::size_t n);

struct ColoringInstance {
  Instance database;
  CQ query;  // Boolean, named "color"
};

// Throws std::invalid_argument on self-loops or edges over undeclared
// vertices.
ColoringInstance encode_three_colorability(const GraphSpec& g);

// fll, grid, 3col (triangle), 3col-k3, 3col-k4, 3col-c5. The 3col programs
// carry the F-Logic Lite rules, the color facts and the query "color".
std::optional<Program> builtin_program(std::string_view name);
std::vector<std::string> builtin_names();

}  // namespace chasekit

#endif  // CHASEKIT_RULESETS_H_
