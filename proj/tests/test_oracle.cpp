#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "generators.hpp"
#include "uchoo/oracle.hpp"
#include "uchoo/parser.hpp"

using namespace uchoo;

namespace {

std::string read_program(const std::string& name) {
  std::ifstream in(std::string(UCHOO_PROGRAMS_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Program load(const std::string& name) {
  return load_program(parse_program(read_program(name)));
}

bool vectors_sorted(const std::vector<oracle::Enumeration>& results) {
  auto key = [](const oracle::Enumeration& e) {
    std::vector<int> flat;
    for (const auto& step : e.choices) flat.push_back(step.branch);
    return flat;
  };
  for (size_t i = 1; i < results.size(); ++i)
    if (key(results[i - 1]) > key(results[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("the smartphone uchoo has exactly one derivation for speaker == off") {
  Program p = load("smartphone.uch");
  auto results = oracle::enumerate(p, parse_goal("speaker == off"));
  REQUIRE(results.size() == 1);
  // Definition order: DSeq#0 -> Choice#1 -> inner DSeq#2; the derivation
  // takes the left conjunct and the second (index 1) uchoo branch.
  REQUIRE(results[0].choices.size() == 2);
  CHECK(results[0].choices[0] == oracle::ChoiceStep{0, 0});
  CHECK(results[0].choices[1] == oracle::ChoiceStep{1, 1});
  const TermPtr* speaker = results[0].state.lookup("speaker");
  REQUIRE(speaker);
  CHECK(**speaker == *Term::ident("off"));
}

TEST_CASE("true has exactly one derivation leaving the state unchanged") {
  Program p = load("templeU.uch");
  p.state = p.state.with("seed", Term::integer(3));
  auto results = oracle::enumerate(p, Goal::truth());
  REQUIRE(results.size() == 1);
  CHECK(results[0].choices.empty());
  CHECK(results[0].state == p.state);
}

TEST_CASE("templeU commits the tuition with the major") {
  Program p = load("templeU.uch");
  auto results = oracle::enumerate(p, parse_goal("major == medical"));
  REQUIRE(results.size() == 1);
  const TermPtr* tuition = results[0].state.lookup("tuition");
  REQUIRE(tuition);
  CHECK(**tuition == *Term::str("$4,000"));

  CHECK(oracle::enumerate(p, parse_goal("major == law")).empty());
}

TEST_CASE("two clauses for one head give two derivations in order") {
  Program p = load_program(parse_program(
      "module m\np() = a = 1;\np() = a = 2\nmain true"));
  auto results = oracle::enumerate(p, parse_goal("p()"));
  REQUIRE(results.size() == 2);
  CHECK(vectors_sorted(results));
  CHECK(**results[0].state.lookup("a") == *Term::integer(1));
  CHECK(**results[1].state.lookup("a") == *Term::integer(2));
}

TEST_CASE("the boolean shortcut stops enumeration like the engine") {
  Program p = load("switch.uch");
  p.state = p.state.with("switch", Term::ident("off"));
  auto results = oracle::enumerate(p, parse_goal("switch == off"));
  REQUIRE(results.size() == 1);
  CHECK(results[0].choices.empty());
}

TEST_CASE("oracle rejects read and while") {
  Program p;
  CHECK_THROWS_AS(oracle::enumerate(p, parse_goal("read(x)")),
                  oracle::OracleError);
  CHECK_THROWS_AS(
      oracle::enumerate(p, parse_goal("while (true) x = 1 endwhile")),
      oracle::OracleError);
}

TEST_CASE("oracle enforces its bounds") {
  Program p = load("templeU.uch");
  oracle::Limits tight;
  tight.max_choice_points = 2;
  CHECK_THROWS_AS(oracle::enumerate(p, parse_goal("major == medical"), tight),
                  oracle::OracleError);

  oracle::Limits shallow;
  shallow.max_depth = 1;
  CHECK_THROWS_AS(
      oracle::enumerate(p, parse_goal("major == medical"), shallow),
      oracle::OracleError);
}

TEST_CASE("enumeration order is lexicographic on generated programs") {
  oracle::Limits limits;
  limits.max_depth = 512;
  limits.max_choice_points = 64;
  for (uint32_t seed = 500; seed < 560; ++seed) {
    CAPTURE(seed);
    testgen::ProgramGen gen(seed);
    Program p = gen.gen_program();
    GoalPtr goal = gen.gen_main_goal();
    auto results = oracle::enumerate(p, goal, limits);
    CHECK(vectors_sorted(results));
  }
}
