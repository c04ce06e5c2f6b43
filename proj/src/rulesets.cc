#include "chasekit/rulesets.h"

#include <algorithm>
#include <stdexcept>

namespace chasekit {

namespace {

constexpr const char* kFll = R"(
% F-Logic Lite
tgd type(O,A,T), data(O,A,V) -> member(V,T).
tgd sub(C1,C3), sub(C3,C2) -> sub(C1,C2).
tgd member(O,C), sub(C,C1) -> member(O,C1).
egd data(O,A,V), data(O,A,W), funct(A,O) -> V = W.
tgd mandatory(A,O) -> exists V: data(O,A,V).
tgd member(O,C), type(C,A,T) -> type(O,A,T).
tgd sub(C,C1), type(C1,A,T) -> type(C,A,T).
tgd type(C,A,T1), sub(T1,T) -> type(C,A,T).
tgd sub(C,C1), mandatory(A,C1) -> mandatory(A,C).
tgd member(O,C), mandatory(A,C) -> mandatory(A,O).
tgd sub(C,C1), funct(A,C1) -> funct(A,C).
tgd member(O,C), funct(A,C) -> funct(A,O).
)";

constexpr const char* kGrid = R"(
tgd index(X) -> exists Y: next(X,Y).
tgd next(X,Y) -> index(Y).
tgd trans(S1,A1,S2,A2,M), next(X1,X2), next(Y1,Y2) -> grid(S1,A1,S2,A2,M,X1,Y1,X2,Y2).
fact index(0).
)";

std::string vertex_variable(const std::string& v) {
  std::string out = "V";
  for (char c : v) out += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

}  // namespace

Program fll_rules() { return parse_program(kFll); }

Program grid_rules() { return parse_program(kGrid); }

GraphSpec complete_graph(std::size_t n) {
  GraphSpec g;
  for (std::size_t i = 1; i <= n; ++i) g.vertices.push_back("v" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) g.edges.emplace_back(g.vertices[i], g.vertices[j]);
  }
  return g;
}

GraphSpec cycle_graph(std::size_t n) {
  GraphSpec g;
  for (std::size_t i = 1; i <= n; ++i) g.vertices.push_back("v" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) g.edges.emplace_back(g.vertices[i], g.vertices[(i + 1) % n]);
  return g;
}

ColoringInstance encode_three_colorability(const GraphSpec& g) {
  ColoringInstance out;
  Term o = Term::constant("o");
  const char* colors[] = {"r", "g", "b"};
  for (const char* x : colors) {
    for (const char* y : colors) {
      if (std::string_view(x) != y) out.database.insert(Atom("data", {o, Term::constant(x), Term::constant(y)}));
    }
  }
  out.query.name = "color";
  Term x = Term::variable("X");
  for (const auto& [u, v] : g.edges) {
    if (u == v) throw std::invalid_argument("self-loop on vertex " + u);
    for (const std::string& w : {u, v}) {
      if (std::find(g.vertices.begin(), g.vertices.end(), w) == g.vertices.end()) {
        throw std::invalid_argument("edge uses undeclared vertex " + w);
      }
    }
    Term vu = Term::variable(vertex_variable(u));
    Term vv = Term::variable(vertex_variable(v));
    out.query.body.push_back(Atom("data", {x, vu, vv}));
    out.query.body.push_back(Atom("data", {x, vv, vu}));
  }
  return out;
}

std::optional<Program> builtin_program(std::string_view name) {
  if (name == "fll") return fll_rules();
  if (name == "grid") return grid_rules();
  GraphSpec g;
  if (name == "3col" || name == "3col-k3") {
    g = complete_graph(3);
  } else if (name == "3col-k4") {
    g = complete_graph(4);
  } else if (name == "3col-c5") {
    g = cycle_graph(5);
  } else {
    return std::nullopt;
  }
  Program p = fll_rules();
  ColoringInstance ci = encode_three_colorability(g);
  p.facts = ci.database;
  p.queries.push_back(ci.query);
  return p;
}

std::vector<std::string> builtin_names() {
  return {"fll", "grid", "3col", "3col-k3", "3col-k4", "3col-c5"};
}

}  // namespace chasekit
