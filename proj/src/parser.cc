#include "chasekit/parser.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

namespace chasekit {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

const CQ* Program::find_query(std::string_view name) const {
  for (const CQ& q : queries) {
    if (q.name == name) return &q;
  }
  return nullptr;
}

bool operator==(const Program& a, const Program& b) {
  return a.facts.atoms() == b.facts.atoms() && a.tgds == b.tgds && a.egds == b.egds &&
         a.queries == b.queries;
}

namespace {

enum class Tok { kIdent, kVariable, kNull, kLParen, kRParen, kComma, kDot, kArrow, kColonDash,
                 kColon, kEquals, kEnd };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t{Tok::kEnd, "", line_, col_};
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
        t.text = std::string(text_.substr(start, pos_ - start));
        t.kind = std::isupper(static_cast<unsigned char>(c)) ? Tok::kVariable : Tok::kIdent;
      } else if (c == '_' && text_.substr(pos_, 3) == "_:n") {
        advance(3);
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
        if (start == pos_) throw ParseError(t.line, t.column, "malformed null, expected _:n<digits>");
        t.kind = Tok::kNull;
        t.text = std::string(text_.substr(start, pos_ - start));
      } else if (text_.substr(pos_, 2) == "->") {
        advance(2);
        t.kind = Tok::kArrow;
      } else if (text_.substr(pos_, 2) == ":-") {
        advance(2);
        t.kind = Tok::kColonDash;
      } else {
        switch (c) {
          case '(': t.kind = Tok::kLParen; break;
          case ')': t.kind = Tok::kRParen; break;
          case ',': t.kind = Tok::kComma; break;
          case '.': t.kind = Tok::kDot; break;
          case ':': t.kind = Tok::kColon; break;
          case '=': t.kind = Tok::kEquals; break;
          default:
            throw ParseError(t.line, t.column, std::string("unexpected character '") + c + "'");
        }
        advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

const char* token_name(Tok k) {
  switch (k) {
    case Tok::kIdent: return "identifier";
    case Tok::kVariable: return "variable";
    case Tok::kNull: return "null";
    case Tok::kLParen: return "'('";
    case Tok::kRParen: return "')'";
    case Tok::kComma: return "','";
    case Tok::kDot: return "'.'";
    case Tok::kArrow: return "'->'";
    case Tok::kColonDash: return "':-'";
    case Tok::kColon: return "':'";
    case Tok::kEquals: return "'='";
    case Tok::kEnd: return "end of input";
  }
  return "?";
}

// Atom as parsed, with the position of its predicate for error reporting.
struct RawAtom {
  Atom atom;
  std::size_t line;
  std::size_t column;
};

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options)
      : tokens_(Lexer(text).run()), options_(options) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::kEnd) {
      const Token& kw = expect(Tok::kIdent, "statement keyword");
      if (kw.text == "fact") {
        RawAtom a = atom(/*in_fact=*/true);
        expect(Tok::kDot, "'.'");
        p.facts.insert(a.atom);
      } else if (kw.text == "tgd") {
        p.tgds.push_back(tgd_body(kw));
      } else if (kw.text == "egd") {
        p.egds.push_back(egd_body(kw));
      } else if (kw.text == "query") {
        CQ q = query_body();
        if (p.find_query(q.name) != nullptr) {
          throw ParseError(kw.line, kw.column, "duplicate query name '" + q.name + "'");
        }
        p.queries.push_back(std::move(q));
      } else {
        throw ParseError(kw.line, kw.column,
                         "expected fact, tgd, egd or query, got '" + kw.text + "'");
      }
    }
    return p;
  }

  Tgd single_tgd() {
    Token start = peek();
    Tgd t = tgd_body(start);
    expect_end();
    return t;
  }

  Egd single_egd() {
    Token start = peek();
    Egd e = egd_body(start);
    expect_end();
    return e;
  }

  CQ single_query() {
    CQ q = query_body();
    expect_end();
    return q;
  }

  Atom single_atom() {
    Atom a = atom(/*in_fact=*/true).atom;
    if (peek().kind == Tok::kDot) next();
    expect_end();
    return a;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  const Token& expect(Tok kind, const char* what) {
    const Token& t = peek();
    if (t.kind != kind) {
      throw ParseError(t.line, t.column, std::string("expected ") + what + ", got " +
                                             (t.text.empty() ? token_name(t.kind) : "'" + t.text + "'"));
    }
    return next();
  }

  void expect_end() {
    const Token& t = peek();
    if (t.kind != Tok::kEnd) throw ParseError(t.line, t.column, "trailing input");
  }

  void check_arity(const Token& pred, std::size_t arity) {
    auto [it, inserted] = arities_.emplace(pred.text, arity);
    if (!inserted && it->second != arity) {
      throw ParseError(pred.line, pred.column,
                       "arity mismatch for '" + pred.text + "': used with " +
                           std::to_string(arity) + " and " + std::to_string(it->second) +
                           " arguments");
    }
  }

  Term term(bool in_fact) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kIdent:
        next();
        return Term::constant(t.text);
      case Tok::kVariable:
        if (in_fact) throw ParseError(t.line, t.column, "facts cannot contain variables");
        next();
        return Term::variable(t.text);
      case Tok::kNull: {
        if (!in_fact || !options_.allow_nulls) {
          throw ParseError(t.line, t.column, "labeled nulls are not allowed here");
        }
        std::uint64_t index = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), index);
        if (ec != std::errc() || index == 0) throw ParseError(t.line, t.column, "bad null index");
        next();
        return Term::null(index);
      }
      default:
        throw ParseError(t.line, t.column, std::string("expected a term, got ") + token_name(t.kind));
    }
  }

  RawAtom atom(bool in_fact) {
    const Token& pred = peek();
    if (pred.kind != Tok::kIdent) {
      throw ParseError(pred.line, pred.column, "expected a predicate name");
    }
    next();
    std::vector<Term> args;
    if (peek().kind == Tok::kLParen) {
      next();
      if (peek().kind != Tok::kRParen) {
        args.push_back(term(in_fact));
        while (peek().kind == Tok::kComma) {
          next();
          args.push_back(term(in_fact));
        }
      }
      expect(Tok::kRParen, "')'");
    }
    check_arity(pred, args.size());
    return RawAtom{Atom(pred.text, std::move(args)), pred.line, pred.column};
  }

  std::vector<RawAtom> atom_list() {
    std::vector<RawAtom> out;
    out.push_back(atom(false));
    while (peek().kind == Tok::kComma) {
      next();
      out.push_back(atom(false));
    }
    return out;
  }

  static std::vector<Atom> strip(const std::vector<RawAtom>& raw) {
    std::vector<Atom> out;
    out.reserve(raw.size());
    for (const RawAtom& r : raw) out.push_back(r.atom);
    return out;
  }

  Tgd tgd_body(const Token& start) {
    std::vector<RawAtom> body = atom_list();
    expect(Tok::kArrow, "'->'");
    std::vector<Term> declared;
    std::vector<Token> declared_tokens;
    if (peek().kind == Tok::kIdent && peek().text == "exists" && peek(1).kind == Tok::kVariable) {
      next();
      for (;;) {
        const Token& v = expect(Tok::kVariable, "existential variable");
        declared.push_back(Term::variable(v.text));
        declared_tokens.push_back(v);
        if (peek().kind != Tok::kComma) break;
        next();
      }
      expect(Tok::kColon, "':' after existential variables");
    }
    std::vector<RawAtom> head = atom_list();
    expect(Tok::kDot, "'.'");

    Tgd tgd;
    tgd.body = strip(body);
    tgd.head = strip(head);
    std::vector<Term> body_terms = terms_of(tgd.body);
    auto in_body = [&](const Term& t) {
      return std::find(body_terms.begin(), body_terms.end(), t) != body_terms.end();
    };
    for (std::size_t i = 0; i < declared.size(); ++i) {
      if (in_body(declared[i])) {
        throw ParseError(declared_tokens[i].line, declared_tokens[i].column,
                         "existential variable " + declared[i].to_string() + " occurs in the body");
      }
      if (std::count(declared.begin(), declared.end(), declared[i]) > 1) {
        throw ParseError(declared_tokens[i].line, declared_tokens[i].column,
                         "existential variable " + declared[i].to_string() + " declared twice");
      }
    }
    for (const RawAtom& h : head) {
      for (const Term& t : h.atom.args()) {
        bool existential = std::find(declared.begin(), declared.end(), t) != declared.end();
        if (existential || in_body(t)) continue;
        if (t.is_variable()) {
          throw ParseError(h.line, h.column,
                           "unsafe tgd: head variable " + t.to_string() +
                               " neither occurs in the body nor is existential");
        }
        throw ParseError(h.line, h.column,
                         "unsafe tgd: head constant " + t.to_string() + " does not occur in the body");
      }
    }
    for (const Term& t : variables_of(tgd.head)) {
      if (std::find(declared.begin(), declared.end(), t) != declared.end()) {
        tgd.existentials.push_back(t);
      }
    }
    if (tgd.existentials.size() != declared.size()) {
      throw ParseError(start.line, start.column, "existential variable not used in the head");
    }
    return tgd;
  }

  Egd egd_body(const Token& start) {
    std::vector<RawAtom> body = atom_list();
    expect(Tok::kArrow, "'->'");
    const Token& l = expect(Tok::kVariable, "variable");
    expect(Tok::kEquals, "'='");
    const Token& r = expect(Tok::kVariable, "variable");
    expect(Tok::kDot, "'.'");
    Egd egd{strip(body), Term::variable(l.text), Term::variable(r.text)};
    std::vector<Term> vars = variables_of(egd.body);
    for (const Token* tok : {&l, &r}) {
      if (std::find(vars.begin(), vars.end(), Term::variable(tok->text)) == vars.end()) {
        throw ParseError(tok->line, tok->column,
                         "egd equates variable " + tok->text + " that does not occur in the body");
      }
    }
    (void)start;
    return egd;
  }

  CQ query_body() {
    const Token& name = expect(Tok::kIdent, "query name");
    CQ q;
    q.name = name.text;
    expect(Tok::kLParen, "'('");
    std::vector<Token> head_tokens;
    if (peek().kind != Tok::kRParen) {
      for (;;) {
        const Token& v = expect(Tok::kVariable, "head variable");
        q.head_vars.push_back(Term::variable(v.text));
        head_tokens.push_back(v);
        if (peek().kind != Tok::kComma) break;
        next();
      }
    }
    expect(Tok::kRParen, "')'");
    if (peek().kind == Tok::kColonDash) {
      next();
      q.body = strip(atom_list());
    }
    expect(Tok::kDot, "'.'");
    std::vector<Term> vars = variables_of(q.body);
    for (std::size_t i = 0; i < q.head_vars.size(); ++i) {
      if (std::find(vars.begin(), vars.end(), q.head_vars[i]) == vars.end()) {
        throw ParseError(head_tokens[i].line, head_tokens[i].column,
                         "head variable " + head_tokens[i].text + " does not occur in the body");
      }
    }
    return q;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ParseOptions options_;
  std::unordered_map<std::string, std::size_t> arities_;
};

std::string render_atoms(const std::vector<Atom>& atoms) {
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += ", ";
    out += atoms[i].to_string();
  }
  return out;
}

}  // namespace

Program parse_program(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).program();
}

namespace {

// The single-statement helpers accept text with or without the final period.
std::string terminated(std::string_view text) {
  std::string s(text);
  auto end = s.find_last_not_of(" \t\r\n");
  if (end == std::string::npos || s[end] != '.') s += '.';
  return s;
}

}  // namespace

Tgd parse_tgd(std::string_view text) { return Parser(terminated(text), {}).single_tgd(); }
Egd parse_egd(std::string_view text) { return Parser(terminated(text), {}).single_egd(); }
CQ parse_query(std::string_view text) { return Parser(terminated(text), {}).single_query(); }
Atom parse_atom(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).single_atom();
}

std::string render_tgd(const Tgd& tgd) {
  std::string out = "tgd " + render_atoms(tgd.body) + " -> ";
  if (!tgd.existentials.empty()) {
    out += "exists ";
    for (std::size_t i = 0; i < tgd.existentials.size(); ++i) {
      if (i) out += ", ";
      out += tgd.existentials[i].to_string();
    }
    out += ": ";
  }
  return out + render_atoms(tgd.head) + ".";
}

std::string render_egd(const Egd& egd) {
  return "egd " + render_atoms(egd.body) + " -> " + egd.lhs.to_string() + " = " +
         egd.rhs.to_string() + ".";
}

std::string render_query(const CQ& q) { return "query " + q.to_string() + "."; }

std::string render_program(const Program& p) {
  std::string out;
  for (const Atom& a : p.facts.atoms()) out += "fact " + a.to_string() + ".\n";
  for (const Tgd& t : p.tgds) out += render_tgd(t) + "\n";
  for (const Egd& e : p.egds) out += render_egd(e) + "\n";
  for (const CQ& q : p.queries) out += render_query(q) + "\n";
  return out;
}

}  // namespace chasekit
