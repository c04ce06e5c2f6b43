// Textual program format.
//
//   % comment to end of line
//   fact r1(a,b).
//   tgd r1(X,Y), r2(Y) -> exists Z: r1(Y,Z).
//   egd data(O,A,V), data(O,A,W), funct(A,O) -> V = W.
//   query q(X) :- r1(X,Y), r2(Y).
//   query b() :- r3(X,Y).
//   query t().                        % empty body, trivially true
//
// Identifiers starting with a lowercase letter or a digit are constants (or
// predicates in predicate position); identifiers starting with an uppercase
// letter are variables. Nulls are written `_:n<digits>` and are accepted in
// facts only when ParseOptions::allow_nulls is set.

#ifndef CHASEKIT_PARSER_H_
#define CHASEKIT_PARSER_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chasekit/dependencies.h"
#include "chasekit/model.h"

namespace chasekit {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct Program {
  Instance facts;
  std::vector<Tgd> tgds;
  std::vector<Egd> egds;
  std::vector<CQ> queries;

  Dependencies dependencies() const { return Dependencies{tgds, egds}; }
  const CQ* find_query(std::string_view name) const;

  // Declaration-order structural equality.
  friend bool operator==(const Program& a, const Program& b);
};

struct ParseOptions {
  bool allow_nulls = false;
};

Program parse_program(std::string_view text, const ParseOptions& options = {});
std::string render_program(const Program& program);

// Single-statement helpers, mostly for tests and builtin tables.
Tgd parse_tgd(std::string_view text);
Egd parse_egd(std::string_view text);
CQ parse_query(std::string_view text);
Atom parse_atom(std::string_view text, const ParseOptions& options = {.allow_nulls = true});

std::string render_tgd(const Tgd& tgd);
std::string render_egd(const Egd& egd);
std::string render_query(const CQ& query);

}  // namespace chasekit

#endif  // CHASEKIT_PARSER_H_
