// Acceptance suite: runs the six release criteria end to end and prints
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "process.hpp"
#include "uchoo/engine.hpp"
#include "uchoo/oracle.hpp"
#include "uchoo/parser.hpp"
#include "uchoo/trace.hpp"

using namespace uchoo;

namespace {

const std::string kCli = UCHOO_CLI_PATH;
const std::string kPrograms = UCHOO_PROGRAMS_DIR;
const std::string kGolden = UCHOO_GOLDEN_DIR;

int g_failures = 0;

void report(int id, const std::string& name, bool ok,
            const std::string& note = "") {
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << id << ": "
            << name;
  if (!ok && !note.empty()) std::cout << " — " << note;
  std::cout << "\n";
  if (!ok) ++g_failures;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string program_path(const char* name) { return kPrograms + "/" + name; }

Program load(const char* name) {
  return load_program(parse_program(read_file(program_path(name))));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

// Field constants visible to expression evaluation, recomputed here so the
// rule-9 check evaluates independently of the engine's internals.
void collect_constants_goal(const Goal& g, std::set<std::string>& out);

void collect_constants_def(const Def& d, std::set<std::string>& out) {
  if (const auto* c = std::get_if<Def::Clause>(&d.node())) {
    if (const auto* f = c->head.as_field())
      if (const auto* id = std::get_if<Term::Ident>(&f->value->node()))
        out.insert(id->name);
    collect_constants_goal(*c->body, out);
    return;
  }
  if (const auto* s = std::get_if<Def::DSeq>(&d.node())) {
    collect_constants_def(*s->first, out);
    collect_constants_def(*s->second, out);
    return;
  }
  if (const auto* f = std::get_if<Def::Forall>(&d.node())) {
    collect_constants_def(*f->body, out);
    return;
  }
  for (const auto& b : std::get<Def::Choice>(d.node()).branches)
    collect_constants_def(*b, out);
}

void collect_constants_goal(const Goal& g, std::set<std::string>& out) {
  if (const auto* a = std::get_if<Goal::AtomGoal>(&g.node())) {
    if (const auto* f = a->atom.as_field())
      if (const auto* id = std::get_if<Term::Ident>(&f->value->node()))
        out.insert(id->name);
    return;
  }
  if (const auto* s = std::get_if<Goal::Seq>(&g.node())) {
    collect_constants_goal(*s->first, out);
    collect_constants_goal(*s->second, out);
    return;
  }
  if (const auto* w = std::get_if<Goal::While>(&g.node())) {
    if (const auto* f = w->cond.as_field())
      if (const auto* id = std::get_if<Term::Ident>(&f->value->node()))
        out.insert(id->name);
    collect_constants_goal(*w->body, out);
  }
}

// ---------------------------------------------------------------------------
// Criterion 1: the templeU scenario through the CLI.

void criterion_1() {
  struct Case {
    const char* input;
    int exit_code;
    const char* stdout_text;
  };
  const Case cases[] = {
      {"medical", 0, "$4,000\n"},
      {"english", 0, "$2,000\n"},
      {"law", 1, ""},
  };
  bool ok = true;
  std::string note;
  for (const Case& c : cases) {
    auto start = std::chrono::steady_clock::now();
    auto r = testproc::run_command(kCli + " run " + program_path("templeU.uch"),
                                   std::string(c.input) + "\n");
    double elapsed = seconds_since(start);
    if (r.exit_code != c.exit_code || r.out != c.stdout_text ||
        elapsed >= 1.0) {
      ok = false;
      note = "input " + std::string(c.input) + ": exit " +
             std::to_string(r.exit_code) + ", stdout \"" + r.out + "\", " +
             std::to_string(elapsed) + "s";
      break;
    }
  }
  report(1, "templeU scenario ($4,000 / $2,000 / failure)", ok, note);
}

// ---------------------------------------------------------------------------
// Criterion 2: the smartphone loop alternates and exits on its budget.

void criterion_2() {
  auto r = testproc::run_command(kCli + " run " +
                                 program_path("smartphone.uch") +
                                 " --max-steps 400 --trace=json"
                                 " --quiet-program");
  bool ok = (r.exit_code == 3);
  std::string note = ok ? "" : "exit code " + std::to_string(r.exit_code);

  std::vector<std::string> speaker;
  std::vector<std::string> logs;
  if (ok) {
    nlohmann::json doc = nlohmann::json::parse(r.out, nullptr, false);
    if (doc.is_discarded() || doc.at("outcome") != "budget-exceeded") {
      ok = false;
      note = "trace is not a budget-exceeded JSON document";
    } else {
      for (const auto& e : doc.at("events")) {
        std::string kind = e.at("kind").get<std::string>();
        std::string detail = e.at("detail").get<std::string>();
        if (kind == "state-update" && detail.rfind("speaker=", 0) == 0)
          speaker.push_back(detail.substr(8));
        if (kind == "io-emit" && detail.rfind("log ", 0) == 0)
          logs.push_back(detail.substr(4));
      }
    }
  }
  if (ok && speaker.size() < 4) {
    ok = false;
    note = "only " + std::to_string(speaker.size()) + " speaker updates";
  }
  if (ok) {
    for (size_t i = 0; i < speaker.size(); ++i) {
      const std::string expect = (i % 2 == 0) ? "on" : "off";
      if (speaker[i] != expect) {
        ok = false;
        note = "speaker sequence broke at " + std::to_string(i);
        break;
      }
    }
  }
  if (ok && logs.size() < 4) {
    ok = false;
    note = "only " + std::to_string(logs.size()) + " log events";
  }
  if (ok) {
    for (size_t i = 0; i < logs.size(); ++i) {
      const std::string expect =
          (i % 2 == 0) ? "play music x hours" : "sleep y hours";
      if (logs[i] != expect) {
        ok = false;
        note = "log sequence broke at " + std::to_string(i);
        break;
      }
    }
  }
  report(2, "smartphone loop alternates speaker state under a step budget",
         ok, note);
}

// ---------------------------------------------------------------------------
// Criterion 3: rule-level properties over generated programs.

void criterion_3() {
  auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string note;
  const Budget wide{50000, 2000};

  // Rule 8: `true` is the identity.
  for (uint32_t seed = 1000; ok && seed < 1120; ++seed) {
    testgen::ProgramGen gen(seed);
    Program p = gen.gen_program();
    p.state = p.state.with("seed", Term::integer(static_cast<int>(seed)));
    ScriptIoPort io;
    RunResult r = run(p, Goal::truth(), io, wide);
    if (!r.ok() || !(r.program.state == p.state) ||
        r.program.defs != p.defs) {
      ok = false;
      note = "rule-8 identity broke at seed " + std::to_string(seed);
    }
  }

  // Rule 9: assignment succeeds exactly when evaluation does and changes
  // exactly the target binding.
  for (uint32_t seed = 2000; ok && seed < 2120; ++seed) {
    testgen::ProgramGen gen(seed);
    Program p = gen.gen_program();
    TermPtr e = gen.expr({}, 0);
    std::set<std::string> constants;
    if (p.defs) collect_constants_def(*p.defs, constants);
    TermPtr expected;
    bool eval_ok = true;
    try {
      expected = eval_expr(p.state, *e, &constants);
    } catch (const EvalError&) {
      eval_ok = false;
    }
    ScriptIoPort io;
    RunResult r = run(p, Goal::assign("target", e), io, wide);
    if (r.ok() != eval_ok) {
      ok = false;
      note = "rule-9 success mismatch at seed " + std::to_string(seed);
    } else if (eval_ok) {
      State want = p.state.with("target", expected);
      if (!(r.program.state == want) ||
          r.program.state.bindings().size() !=
              p.state.bindings().size() + 1) {
        ok = false;
        note = "rule-9 state mismatch at seed " + std::to_string(seed);
      }
    }
  }

  // Rule 10: sequencing composes the two runs.
  int composed = 0;
  for (uint32_t seed = 3000; ok && composed < 100 && seed < 3800; ++seed) {
    testgen::ProgramGen gen(seed);
    Program p = gen.gen_program();
    GoalPtr g1 = gen.gen_main_goal();
    GoalPtr g2 = gen.gen_main_goal();
    ScriptIoPort io1;
    RunResult r1 = run(p, g1, io1, wide);
    if (!r1.ok()) continue;
    ScriptIoPort io2;
    RunResult r2 = run(r1.program, g2, io2, wide);
    if (!r2.ok()) continue;
    ++composed;
    ScriptIoPort io3;
    RunResult seq = run(p, Goal::seq(g1, g2), io3, wide);
    if (!seq.ok() || !(seq.program.state == r2.program.state)) {
      ok = false;
      note = "rule-10 composition broke at seed " + std::to_string(seed);
    }
  }
  if (ok && composed < 100) {
    ok = false;
    note = "only " + std::to_string(composed) + " composable pairs";
  }

  // Backtracking restores the choice-point state: the first branch
  // assigns through its body and then fails on an undefined field.
  for (uint32_t seed = 4000; ok && seed < 4100; ++seed) {
    testgen::ProgramGen gen(seed);
    std::string value = gen.pick(testgen::kConstants);
    int n = gen.rng().below(100);
    std::string src = "module m\nuchoo(f == " + value + " = z = " +
                      std::to_string(n) + "; miss == 1, f == " + value +
                      ")\nmain f == " + value;
    Program p = load_program(parse_program(src));
    SourceFile file = parse_program(src);
    ScriptIoPort io;
    RunResult r = run(p, file.main, io, wide);
    if (!r.ok() || r.program.state.lookup("z") != nullptr ||
        r.program.state.lookup("miss") != nullptr ||
        !r.program.state.binds_to("f", *Term::ident(value))) {
      ok = false;
      note = "backtracking residue at seed " + std::to_string(seed);
    }
  }

  // Failure completeness: when the oracle proves there is no derivation,
  // the engine reports failure.
  oracle::Limits limits;
  limits.max_depth = 512;
  limits.max_choice_points = 64;
  int refuted = 0;
  for (uint32_t seed = 5000; ok && refuted < 100 && seed < 6500; ++seed) {
    testgen::ProgramGen gen(seed);
    Program p = gen.gen_program();
    GoalPtr goal = gen.gen_main_goal();
    std::vector<oracle::Enumeration> all;
    try {
      all = oracle::enumerate(p, goal, limits);
    } catch (const oracle::OracleError&) {
      continue;
    }
    if (!all.empty()) continue;
    ++refuted;
    ScriptIoPort io;
    RunResult r = run(p, goal, io, wide);
    if (r.status != RunResult::Status::Failure) {
      ok = false;
      note = "failure completeness broke at seed " + std::to_string(seed);
    }
  }
  if (ok && refuted < 100) {
    ok = false;
    note = "only " + std::to_string(refuted) + " refuted programs";
  }

  double elapsed = seconds_since(start);
  if (ok && elapsed >= 30.0) {
    ok = false;
    note = "suite took " + std::to_string(elapsed) + "s";
  }
  report(3, "rule-level property suite (identity, update, composition, "
            "backtracking, failure completeness)",
         ok, note);
}

// ---------------------------------------------------------------------------
// Criterion 4: engine/oracle equivalence on the loop-free fragment.

void criterion_4() {
  bool ok = true;
  std::string note;
  oracle::Limits limits;
  limits.max_depth = 512;
  limits.max_choice_points = 64;
  const Budget wide{200000, 5000};

  int compared = 0;
  for (uint32_t seed = 7000; ok && compared < 200 && seed < 7600; ++seed) {
    testgen::ProgramGen gen(seed);
    Program p = gen.gen_program();
    GoalPtr goal = gen.gen_main_goal();
    std::vector<oracle::Enumeration> all;
    try {
      all = oracle::enumerate(p, goal, limits);
    } catch (const oracle::OracleError&) {
      continue;
    }
    ++compared;
    ScriptIoPort io;
    RunResult r = run(p, goal, io, wide);
    if (r.ok() != !all.empty()) {
      ok = false;
      note = "success/failure mismatch at seed " + std::to_string(seed);
    } else if (r.ok() && !(r.program.state == all.front().state)) {
      ok = false;
      note = "state differs from the first derivation at seed " +
             std::to_string(seed);
    }
  }
  if (ok && compared < 200) {
    ok = false;
    note = "only " + std::to_string(compared) + " comparable programs";
  }
  report(4, "oracle equivalence over " + std::to_string(compared) +
                " generated programs",
         ok, note);
}

// ---------------------------------------------------------------------------
// Criterion 5: parser round-trips and positioned errors.

void criterion_5() {
  bool ok = true;
  std::string note;

  for (const char* name : {"templeU.uch", "smartphone.uch", "switch.uch"}) {
    SourceFile parsed = parse_program(read_file(program_path(name)));
    if (!(parse_program(pretty(parsed)) == parsed)) {
      ok = false;
      note = std::string("bundled example does not round-trip: ") + name;
    }
  }

  for (uint32_t seed = 8000; ok && seed < 8520; ++seed) {
    testgen::ProgramGen gen(seed);
    SourceFile file = gen.gen_file();
    SourceFile reparsed;
    try {
      reparsed = parse_program(pretty(file));
    } catch (const ParseError& e) {
      ok = false;
      note = "pretty output failed to parse at seed " + std::to_string(seed) +
             ": " + e.what();
      break;
    }
    if (!(reparsed == file)) {
      ok = false;
      note = "round-trip mismatch at seed " + std::to_string(seed);
    }
  }

  // Mutated inputs: every parse error carries a usable position.
  int errored = 0;
  if (ok) {
    testgen::ProgramGen gen(99);
    std::string base = read_file(program_path("smartphone.uch"));
    for (int i = 0; ok && i < 300; ++i) {
      std::string mutated = base;
      switch (gen.rng().below(3)) {
        case 0:
          mutated.insert(static_cast<size_t>(gen.rng().below(
                             static_cast<int>(mutated.size()))),
                         1, '@');
          break;
        case 1:
          mutated.erase(static_cast<size_t>(gen.rng().below(
                            static_cast<int>(mutated.size()))),
                        1);
          break;
        default:
          mutated = mutated.substr(
              0, static_cast<size_t>(gen.rng().below(
                     static_cast<int>(mutated.size()))));
          break;
      }
      try {
        (void)parse_program(mutated);
      } catch (const ParseError& e) {
        ++errored;
        if (e.line() < 1 || e.column() < 1) {
          ok = false;
          note = "parse error without a position";
        }
      } catch (...) {
        ok = false;
        note = "non-ParseError escaped the parser";
      }
    }
    if (ok && errored < 50) {
      ok = false;
      note = "only " + std::to_string(errored) + " mutations errored";
    }
  }
  report(5, "parser round-trip and positioned errors", ok, note);
}

// ---------------------------------------------------------------------------
// Criterion 6: golden traces for the bundled fixtures.

struct Fixture {
  const char* name;
  const char* program;
  std::vector<std::string> inputs;
  Budget budget;
};

bool validate_schema(const std::string& json, std::string& why) {
  nlohmann::json doc = nlohmann::json::parse(json, nullptr, false);
  if (doc.is_discarded()) {
    why = "not valid JSON";
    return false;
  }
  static const std::set<std::string> kOutcomes = {"success", "failure",
                                                  "budget-exceeded"};
  static const std::set<std::string> kKinds = {
      "rule-applied", "choice-enter", "branch-try", "branch-commit",
      "backtrack",    "state-update", "io-read",    "io-emit",
      "failure"};
  if (!doc.is_object() || doc.size() != 2 || !doc.contains("outcome") ||
      !doc.contains("events")) {
    why = "top-level keys";
    return false;
  }
  if (!doc["outcome"].is_string() ||
      !kOutcomes.count(doc["outcome"].get<std::string>())) {
    why = "outcome value";
    return false;
  }
  if (!doc["events"].is_array()) {
    why = "events is not an array";
    return false;
  }
  for (const auto& e : doc["events"]) {
    if (!e.is_object() || e.size() != 5) {
      why = "event keys";
      return false;
    }
    if (!e.contains("step") || !e["step"].is_number_integer() ||
        !e.contains("kind") || !e["kind"].is_string() ||
        !kKinds.count(e["kind"].get<std::string>()) ||
        !e.contains("rule") ||
        !(e["rule"].is_null() || e["rule"].is_number_integer()) ||
        !e.contains("detail") || !e["detail"].is_string() ||
        !e.contains("depth") || !e["depth"].is_number_integer()) {
      why = "event field types";
      return false;
    }
    if (e["rule"].is_number_integer()) {
      int rule = e["rule"].get<int>();
      if (rule < 1 || rule > 10) {
        why = "rule id out of range";
        return false;
      }
    }
  }
  return true;
}

void criterion_6() {
  bool ok = true;
  std::string note;
  const Fixture fixtures[] = {
      {"templeU_medical", "templeU.uch", {"medical"}, Budget{}},
      {"smartphone_budget300", "smartphone.uch", {}, Budget{300, 200}},
      {"switch_off", "switch.uch", {}, Budget{}},
  };
  for (const Fixture& f : fixtures) {
    SourceFile file = parse_program(read_file(program_path(f.program)));
    Program p = load_program(file);

    ScriptIoPort io1(f.inputs), io2(f.inputs);
    RunResult first = run(p, file.main, io1, f.budget);
    RunResult second = run(p, file.main, io2, f.budget);

    std::string text = render_text(first.trace);
    std::string json = render_json(first.trace);
    if (text != render_text(second.trace) ||
        json != render_json(second.trace)) {
      ok = false;
      note = std::string("repeated runs differ for ") + f.name;
      break;
    }
    std::string golden_text = read_file(kGolden + "/" + f.name + ".trace.txt");
    std::string golden_json =
        read_file(kGolden + "/" + f.name + ".trace.json");
    if (text != golden_text) {
      ok = false;
      note = std::string("text trace differs from golden for ") + f.name;
      break;
    }
    if (json + "\n" != golden_json) {
      ok = false;
      note = std::string("json trace differs from golden for ") + f.name;
      break;
    }
    std::string why;
    if (!validate_schema(json, why)) {
      ok = false;
      note = std::string("schema: ") + why + " for " + f.name;
      break;
    }
  }
  report(6, "golden traces are byte-stable and schema-valid", ok, note);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  if (g_failures == 0)
    std::cout << "all acceptance criteria passed\n";
  else
    std::cout << g_failures << " acceptance criteria failed\n";
  return g_failures == 0 ? 0 : 1;
}
