#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "uchoo/engine.hpp"
#include "uchoo/oracle.hpp"
#include "uchoo/parser.hpp"
#include "uchoo/trace.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitFailure = 1;
constexpr int kExitParseError = 2;
constexpr int kExitBudget = 3;
constexpr int kExitUsage = 4;

struct Options {
  std::string file;
  std::string goal_override;
  std::string input_script;
  std::string trace_mode;  // "", "text", or "json"
  int max_steps = 10000;
  int max_depth = 200;
  bool quiet_program = false;
  bool use_oracle = false;
};

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  return true;
}

void print_parse_error(const std::string& path, const uchoo::ParseError& e) {
  std::cerr << path << ":" << e.what() << "\n";
}

void emit_trace(const Options& opts, const uchoo::Derivation& trace) {
  if (opts.trace_mode == "text") {
    std::cerr << uchoo::render_text(trace);
  } else if (opts.trace_mode == "json") {
    std::ostream& sink = opts.quiet_program ? std::cout : std::cerr;
    sink << uchoo::render_json(trace) << "\n";
  }
}

int run_oracle(const uchoo::Program& program, const uchoo::GoalPtr& goal) {
  std::vector<uchoo::oracle::Enumeration> results;
  try {
    results = uchoo::oracle::enumerate(program, goal);
  } catch (const uchoo::oracle::OracleError& e) {
    std::cerr << "oracle: " << e.what() << "\n";
    return kExitUsage;
  }
  std::cout << results.size() << " derivation(s)\n";
  for (const auto& r : results) {
    std::cout << " ";
    for (const auto& step : r.choices)
      std::cout << " " << step.point << ":" << step.branch;
    std::cout << " ->";
    for (const auto& [name, value] : r.state.bindings())
      std::cout << " " << name << "=" << uchoo::pretty(*value);
    std::cout << "\n";
  }
  return results.empty() ? kExitFailure : kExitSuccess;
}

int do_run(const Options& opts) {
  std::string source;
  if (!read_file(opts.file, source)) {
    std::cerr << "cannot open file: " << opts.file << "\n";
    return kExitUsage;
  }

  uchoo::SourceFile file;
  try {
    file = uchoo::parse_program(source);
  } catch (const uchoo::ParseError& e) {
    print_parse_error(opts.file, e);
    return kExitParseError;
  }

  uchoo::GoalPtr goal = file.main;
  if (!opts.goal_override.empty()) {
    try {
      goal = uchoo::parse_goal(opts.goal_override);
    } catch (const uchoo::ParseError& e) {
      print_parse_error("--goal", e);
      return kExitParseError;
    }
  }

  uchoo::Program program = uchoo::load_program(file);
  if (opts.use_oracle) return run_oracle(program, goal);

  std::ifstream script;
  if (!opts.input_script.empty()) {
    script.open(opts.input_script);
    if (!script) {
      std::cerr << "cannot open input script: " << opts.input_script << "\n";
      return kExitUsage;
    }
  }
  std::istream& in = opts.input_script.empty() ? std::cin : script;
  std::ostringstream discard;
  std::ostream& out = opts.quiet_program ? static_cast<std::ostream&>(discard)
                                         : std::cout;
  uchoo::StreamIoPort io(in, out);

  uchoo::Budget budget{opts.max_steps, opts.max_depth};
  uchoo::RunResult result = uchoo::run(program, goal, io, budget);
  emit_trace(opts, result.trace);

  switch (result.status) {
    case uchoo::RunResult::Status::Success:
      return kExitSuccess;
    case uchoo::RunResult::Status::Failure:
      return kExitFailure;
    case uchoo::RunResult::Status::BudgetExceeded:
      return kExitBudget;
  }
  return kExitUsage;
}

int do_repl(const Options& opts) {
  uchoo::Program program;
  if (!opts.file.empty()) {
    std::string source;
    if (!read_file(opts.file, source)) {
      std::cerr << "cannot open file: " << opts.file << "\n";
      return kExitUsage;
    }
    try {
      program = uchoo::load_program(uchoo::parse_program(source));
    } catch (const uchoo::ParseError& e) {
      print_parse_error(opts.file, e);
      return kExitParseError;
    }
  }

  uchoo::Budget budget{opts.max_steps, opts.max_depth};
  uchoo::StreamIoPort io(std::cin, std::cout);
  std::string line;
  while (true) {
    std::cout << "> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    size_t begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    size_t end = line.find_last_not_of(" \t");
    std::string text = line.substr(begin, end - begin + 1);
    if (text == ":quit" || text == ":q") break;

    uchoo::GoalPtr goal;
    try {
      goal = uchoo::parse_goal(text);
    } catch (const uchoo::ParseError& e) {
      std::cout << "parse error " << e.what() << "\n";
      continue;
    }

    uchoo::RunResult result = uchoo::run(program, goal, io, budget);
    if (opts.trace_mode == "text")
      std::cerr << uchoo::render_text(result.trace);
    else if (opts.trace_mode == "json")
      std::cerr << uchoo::render_json(result.trace) << "\n";

    switch (result.status) {
      case uchoo::RunResult::Status::Success: {
        std::string delta;
        for (const auto& [name, value] : result.program.state.bindings()) {
          const uchoo::TermPtr* old = program.state.lookup(name);
          if (old && uchoo::equal(*old, value)) continue;
          if (!delta.empty()) delta += ", ";
          delta += name + " = " + uchoo::pretty(*value);
        }
        std::cout << (delta.empty() ? "yes" : "yes  " + delta) << "\n";
        program = std::move(result.program);
        break;
      }
      case uchoo::RunResult::Status::Failure:
        std::cout << "no\n";
        break;
      case uchoo::RunResult::Status::BudgetExceeded:
        std::cout << "budget exceeded\n";
        break;
    }
  }
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interpreter for the uchoo language: imperative modules with "
               "choice-conjunctive declarations"};
  app.require_subcommand(1);

  Options opts;

  CLI::App* run_cmd = app.add_subcommand("run", "run a .uch file's main goal");
  run_cmd->add_option("file", opts.file, "program file")->required();
  run_cmd->add_option("--goal", opts.goal_override,
                      "goal text overriding the file's main block");
  run_cmd->add_option("--input", opts.input_script,
                      "newline-delimited input script, one read value per line");
  run_cmd->add_option("--trace", opts.trace_mode,
                      "emit a derivation trace (text or json)")
      ->expected(0, 1)
      ->default_str("text")
      ->check(CLI::IsMember({"text", "json"}));
  run_cmd->add_option("--max-steps", opts.max_steps, "step budget")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-depth", opts.max_depth, "derivation depth budget")
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("--quiet-program", opts.quiet_program,
                    "suppress program output (json traces go to stdout)");
  run_cmd->add_flag("--oracle", opts.use_oracle)->group("");

  CLI::App* repl_cmd =
      app.add_subcommand("repl", "interactive goals against a loaded program");
  repl_cmd->add_option("file", opts.file, "program file");
  repl_cmd->add_option("--max-steps", opts.max_steps, "step budget")
      ->check(CLI::PositiveNumber);
  repl_cmd->add_option("--max-depth", opts.max_depth, "derivation depth budget")
      ->check(CLI::PositiveNumber);
  repl_cmd->add_option("--trace", opts.trace_mode,
                       "emit a derivation trace per goal (text or json)")
      ->expected(0, 1)
      ->default_str("text")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (run_cmd->parsed()) return do_run(opts);
  return do_repl(opts);
}
