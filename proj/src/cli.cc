#include "chasekit/cli.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chasekit/acyclic.h"
#include "chasekit/analysis.h"
#include "chasekit/chase.h"
#include "chasekit/clouds.h"
#include "chasekit/egd_sep.h"
#include "chasekit/parser.h"
#include "chasekit/query.h"
#include "chasekit/rulesets.h"

namespace chasekit {

namespace {

using json = nlohmann::ordered_json;

// Input-level problems: missing files, bad flags values. Exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string file;
  std::string builtin;
  std::string format = "text";
};

struct Budget {
  std::string mode = "restricted";
  std::size_t max_steps = 10000;
  std::size_t max_depth = 64;
  std::string egd = "interleave";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("file", c.file, "program file");
  cmd->add_option("--builtin", c.builtin, "built-in program")
      ->check(CLI::IsMember(builtin_names()));
  cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"text", "json"}));
}

void add_budget(CLI::App* cmd, Budget& b, bool with_mode) {
  if (with_mode) {
    cmd->add_option("--mode", b.mode, "chase variant")->check(CLI::IsMember({"oblivious", "restricted"}));
  }
  cmd->add_option("--max-steps", b.max_steps, "TGD step budget")->check(CLI::PositiveNumber);
  cmd->add_option("--max-depth", b.max_depth, "forest depth budget")->check(CLI::PositiveNumber);
}

Program load(const Common& c) {
  if (c.file.empty() == c.builtin.empty()) {
    throw UsageError("give exactly one of FILE or --builtin");
  }
  if (!c.builtin.empty()) return *builtin_program(c.builtin);
  std::ifstream in(c.file);
  if (!in) throw UsageError("cannot open " + c.file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

ChaseOptions chase_options(const Budget& b) {
  ChaseOptions o;
  o.mode = b.mode == "oblivious" ? ChaseMode::kOblivious : ChaseMode::kRestricted;
  o.max_steps = b.max_steps;
  o.max_depth = b.max_depth;
  o.egd_interleave = b.egd != "separate";
  if (const char* cap = std::getenv("CHASEKIT_MAX_MEMORY_MB")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(cap, &end, 10);
    if (end == cap || *end != '\0') throw UsageError("CHASEKIT_MAX_MEMORY_MB must be an integer");
    o.max_memory_mb = static_cast<std::size_t>(v);
  }
  return o;
}

json atoms_json(const Instance& b) {
  json arr = json::array();
  for (const Atom& a : b.sorted_atoms()) arr.push_back(a.to_string());
  return arr;
}

json tuples_json(const std::vector<Tuple>& tuples) {
  json arr = json::array();
  for (const Tuple& t : tuples) {
    json row = json::array();
    for (const Term& x : t) row.push_back(x.to_string());
    arr.push_back(row);
  }
  return arr;
}

std::string answer_status(const AnswerReport& r) {
  if (r.status == AnswerStatus::kFailed) return "failed";
  if (!r.answers.empty()) return "sat";
  return r.status == AnswerStatus::kExact ? "unsat" : "unknown";
}

std::string tuple_text(const Tuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += t[i].to_string();
  }
  return s + ")";
}

int cmd_classify(const Common& c, std::ostream& out) {
  Program p = load(c);
  Classification cls = classify(p.tgds);
  if (c.format == "json") {
    json j;
    j["rules"] = json::array();
    for (std::size_t i = 0; i < p.tgds.size(); ++i) {
      const RuleClassification& rc = cls.rules[i];
      json r;
      r["rule"] = i + 1;
      r["text"] = p.tgds[i].to_string();
      r["class"] = to_string(rc.label);
      r["full"] = rc.full;
      r["guard"] = rc.guard ? json(*rc.guard + 1) : json(nullptr);
      r["weak_guard"] = rc.weak_guard ? json(*rc.weak_guard + 1) : json(nullptr);
      j["rules"].push_back(r);
    }
    j["overall"] = to_string(cls.overall);
    j["affected"] = json::array();
    for (const Position& pos : cls.affected) j["affected"].push_back(pos.to_string());
    out << j.dump(2) << "\n";
    return 0;
  }
  for (std::size_t i = 0; i < p.tgds.size(); ++i) {
    const RuleClassification& rc = cls.rules[i];
    out << "rule" << i + 1 << " " << to_string(rc.label);
    if (rc.guard) out << " guard=" << *rc.guard + 1;
    if (rc.weak_guard) out << " weak-guard=" << *rc.weak_guard + 1;
    out << "  " << p.tgds[i].to_string() << "\n";
  }
  out << "overall: " << to_string(cls.overall) << "\n";
  out << "affected:";
  for (const Position& pos : cls.affected) out << " " << pos.to_string();
  out << "\n";
  return 0;
}

int cmd_chase(const Common& c, const Budget& b, std::ostream& out) {
  Program p = load(c);
  ChaseOptions opts = chase_options(b);
  ChaseResult r = run_chase(p.facts, p.dependencies(), opts);
  std::optional<FailureCheck> fc;
  if (!opts.egd_interleave && !p.egds.empty()) fc = egd_failure_check(p.facts, p.tgds, p.egds, opts);
  bool failed = r.status == ChaseStatus::kFailed || (fc && fc->verdict == FailureVerdict::kFailed);
  if (c.format == "json") {
    json j;
    j["status"] = to_string(r.status);
    j["budget_exhausted"] = r.status == ChaseStatus::kBudgetExhausted;
    j["tgd_steps"] = r.tgd_steps;
    j["steps"] = json::array();
    for (const ChaseStep& s : r.steps) j["steps"].push_back(format_step(s));
    j["instance"] = atoms_json(r.instance);
    if (fc) j["failure_check"] = to_string(fc->verdict);
    if (!r.note.empty()) j["note"] = r.note;
    out << j.dump(2) << "\n";
  } else {
    out << step_log(r);
    out << "status: " << to_string(r.status) << "\n";
    if (!r.note.empty()) out << "note: " << r.note << "\n";
    if (fc) out << "failure-check: " << to_string(fc->verdict) << "\n";
    out << "atoms: " << r.instance.size() << "\n";
    out << r.instance.to_string();
  }
  return failed ? 1 : 0;
}

Strategy parse_strategy(const std::string& s) {
  if (s == "terminate") return Strategy::terminate();
  if (s == "blocked-atomic") return Strategy::blocked_atomic();
  if (s.rfind("bounded:", 0) == 0) {
    std::string n = s.substr(8);
    if (n.empty() || !std::all_of(n.begin(), n.end(), ::isdigit) || std::stoul(n) == 0) {
      throw UsageError("bad bounded depth in --strategy " + s);
    }
    return Strategy::bounded(std::stoul(n));
  }
  if (s == "bounded") return Strategy::bounded(16);
  throw UsageError("unknown strategy " + s);
}

int cmd_answer(const Common& c, const Budget& b, const std::string& qname, const std::string& strategy,
               std::ostream& out) {
  Program p = load(c);
  const CQ* q = p.find_query(qname);
  if (q == nullptr) throw UsageError("no query named " + qname);
  Strategy st = parse_strategy(strategy);
  ChaseOptions opts = chase_options(b);
  AnswerReport r = opts.egd_interleave
                       ? certain_answers(p.facts, p.dependencies(), *q, st, opts)
                       : separated_answer(p.facts, p.tgds, p.egds, *q, st, opts);
  std::string status = answer_status(r);
  if (c.format == "json") {
    json j;
    j["query"] = q->name;
    j["status"] = status;
    j["answers"] = tuples_json(r.answers);
    j["budget_exhausted"] = r.budget_exhausted;
    out << j.dump(2) << "\n";
  } else {
    out << "query " << q->name << ": " << status << "\n";
    if (!q->is_boolean()) {
      for (const Tuple& t : r.answers) out << tuple_text(t) << "\n";
    }
    if (r.budget_exhausted) out << "budget exhausted: answers are a lower bound\n";
    if (!r.note.empty()) out << "note: " << r.note << "\n";
  }
  return r.status == AnswerStatus::kFailed ? 1 : 0;
}

int cmd_contain(const Common& c, const Budget& b, const std::string& q1, const std::string& q2,
                std::ostream& out) {
  Program p = load(c);
  const CQ* a = p.find_query(q1);
  const CQ* bq = p.find_query(q2);
  if (a == nullptr) throw UsageError("no query named " + q1);
  if (bq == nullptr) throw UsageError("no query named " + q2);
  if (a->arity() != bq->arity()) throw UsageError("queries have different arities");
  Containment res = check_containment(*a, *bq, p.dependencies(), chase_options(b));
  if (c.format == "json") {
    json j;
    j["q1"] = q1;
    j["q2"] = q2;
    j["result"] = to_string(res);
    out << j.dump(2) << "\n";
  } else {
    out << q1 << " contained in " << q2 << ": " << to_string(res) << "\n";
  }
  return 0;
}

int cmd_egd_check(const Common& c, const Budget& b, std::ostream& out) {
  Program p = load(c);
  SeparationVerdict v = separation_verdict(p.facts, p.dependencies(), chase_options(b));
  std::string witness;
  if (v.witness) {
    std::vector<Term> vars = variables_of(p.egds[*v.egd].body);
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (i) witness += ",";
      witness += vars[i].to_string() + "->" + v.witness->at(vars[i]).to_string();
    }
  }
  if (c.format == "json") {
    json j;
    j["verdict"] = to_string(v.check);
    j["failed"] = v.failed;
    j["egd"] = v.egd ? json(*v.egd + 1) : json(nullptr);
    j["witness"] = v.witness ? json("{" + witness + "}") : json(nullptr);
    j["egd_applications"] = v.egd_applications;
    j["all_applications_innocuous"] = v.all_applications_innocuous;
    j["interleaved_status"] = to_string(v.interleaved_status);
    out << j.dump(2) << "\n";
  } else {
    out << "verdict: " << to_string(v.check) << "\n";
    if (v.egd) out << "witness: egd" << *v.egd + 1 << " WITH {" << witness << "}\n";
    out << "egd applications: " << v.egd_applications
        << (v.all_applications_innocuous ? " (all innocuous)" : " (some not innocuous)") << "\n";
    out << "interleaved chase: " << to_string(v.interleaved_status) << "\n";
  }
  return v.failed ? 1 : 0;
}

int cmd_forest(const Common& c, const Budget& b, bool restricted, bool dot, std::ostream& out) {
  Program p = load(c);
  ChaseResult r = run_chase(p.facts, p.dependencies(), chase_options(b));
  std::vector<ForestNode> nodes = restricted ? restricted_gcf(r.forest) : r.forest;
  if (dot) {
    out << forest_to_dot(nodes);
    return r.status == ChaseStatus::kFailed ? 1 : 0;
  }
  if (c.format == "json") {
    json j;
    j["status"] = to_string(r.status);
    j["forest_incomplete"] = r.forest_incomplete;
    j["nodes"] = json::array();
    for (const ForestNode& n : nodes) {
      json x;
      x["id"] = n.id;
      x["atom"] = n.atom.to_string();
      x["parent"] = n.parent ? json(*n.parent) : json(nullptr);
      x["rule"] = n.rule ? json(*n.rule + 1) : json(nullptr);
      x["depth"] = n.depth;
      x["duplicate"] = n.duplicate;
      j["nodes"].push_back(x);
    }
    out << j.dump(2) << "\n";
  } else {
    std::vector<std::vector<std::size_t>> children(r.forest.size());
    std::vector<bool> present(r.forest.size(), false);
    for (const ForestNode& n : nodes) present[n.id] = true;
    for (const ForestNode& n : nodes) {
      if (n.parent && present[*n.parent]) children[*n.parent].push_back(n.id);
    }
    std::function<void(std::size_t, std::size_t)> print = [&](std::size_t id, std::size_t indent) {
      const ForestNode& n = r.forest[id];
      out << std::string(indent * 2, ' ') << n.atom.to_string();
      if (n.rule) out << "  [rule" << *n.rule + 1 << "]";
      if (n.duplicate) out << " [duplicate]";
      out << "\n";
      for (std::size_t k : children[id]) print(k, indent + 1);
    };
    for (const ForestNode& n : nodes) {
      if (!n.parent || !present[*n.parent]) print(n.id, 0);
    }
    out << "status: " << to_string(r.status) << "\n";
    if (r.forest_incomplete) out << "forest incomplete: some rules have no guard\n";
  }
  return r.status == ChaseStatus::kFailed ? 1 : 0;
}

int cmd_store_stats(const Common& c, bool force, std::size_t max_rounds, std::ostream& out) {
  Program p = load(c);
  BlockedOptions o;
  o.force = force;
  o.max_rounds = max_rounds;
  BlockedResult r = blocked_saturate(p.facts, p.tgds, o);
  if (c.format == "json") {
    out << store_stats_json(r) << "\n";
  } else {
    out << "entries: " << r.store.size() << "\n"
        << "contexts: " << r.contexts << "\n"
        << "ground atoms: " << r.ground_atoms.size() << "\n"
        << "max cloud size: " << r.max_cloud_size << "\n"
        << "cloud bound: " << r.cloud_bound << (r.bound_violated ? " (violated)" : "") << "\n"
        << "rounds: " << r.rounds << "\n"
        << "stabilized: " << (r.stabilized ? "yes" : "no") << "\n";
    if (!r.note.empty()) out << "note: " << r.note << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"chasekit: chase-based query answering under TGDs and EGDs", "chasekit"};
  app.require_subcommand(1);

  Common c;
  Budget b;
  std::string qname;
  std::string strategy = "bounded:16";
  std::string q1;
  std::string q2;
  bool restricted = false;
  bool dot = false;
  bool force = false;
  std::size_t max_rounds = 16;

  CLI::App* classify_cmd = app.add_subcommand("classify", "guardedness and affected positions");
  add_common(classify_cmd, c);

  CLI::App* chase_cmd = app.add_subcommand("chase", "run the chase and print the step log");
  add_common(chase_cmd, c);
  add_budget(chase_cmd, b, true);
  chase_cmd->add_option("--egd", b.egd, "EGD handling")->check(CLI::IsMember({"interleave", "separate"}));

  CLI::App* answer_cmd = app.add_subcommand("answer", "certain answers of a query");
  add_common(answer_cmd, c);
  add_budget(answer_cmd, b, false);
  answer_cmd->add_option("--query", qname, "query name")->required();
  answer_cmd->add_option("--strategy", strategy, "terminate|blocked-atomic|bounded:N");
  answer_cmd->add_option("--egd", b.egd, "EGD handling")->check(CLI::IsMember({"interleave", "separate"}));

  CLI::App* contain_cmd = app.add_subcommand("contain", "query containment under the rules");
  add_common(contain_cmd, c);
  contain_cmd->add_option("--q1", q1, "contained query")->required();
  contain_cmd->add_option("--q2", q2, "containing query")->required();
  contain_cmd->add_option("--budget", b.max_steps, "TGD step budget")->check(CLI::PositiveNumber);
  contain_cmd->add_option("--max-depth", b.max_depth, "forest depth budget")->check(CLI::PositiveNumber);

  CLI::App* egd_cmd = app.add_subcommand("egd-check", "chase failure check and innocuousness");
  add_common(egd_cmd, c);
  add_budget(egd_cmd, b, true);

  CLI::App* forest_cmd = app.add_subcommand("forest", "guarded chase forest");
  add_common(forest_cmd, c);
  add_budget(forest_cmd, b, true);
  forest_cmd->add_flag("--restricted", restricted, "prune duplicate subtrees");
  forest_cmd->add_flag("--dot", dot, "Graphviz output");

  CLI::App* store_cmd = app.add_subcommand("store-stats", "blocked saturation statistics");
  add_common(store_cmd, c);
  store_cmd->add_flag("--force", force, "accept rule sets that are not weakly guarded");
  store_cmd->add_option("--max-rounds", max_rounds, "round budget")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (classify_cmd->parsed()) return cmd_classify(c, out);
    if (chase_cmd->parsed()) return cmd_chase(c, b, out);
    if (answer_cmd->parsed()) return cmd_answer(c, b, qname, strategy, out);
    if (contain_cmd->parsed()) return cmd_contain(c, b, q1, q2, out);
    if (egd_cmd->parsed()) return cmd_egd_check(c, b, out);
    if (forest_cmd->parsed()) return cmd_forest(c, b, restricted, dot, out);
    if (store_cmd->parsed()) return cmd_store_stats(c, force, max_rounds, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace chasekit
