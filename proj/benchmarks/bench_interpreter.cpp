#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <string>

#include "uchoo/engine.hpp"
#include "uchoo/oracle.hpp"
#include "uchoo/parser.hpp"

namespace {

std::string read_program(const char* name) {
  std::ifstream in(std::string(UCHOO_PROGRAMS_DIR) + "/" + name);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void BM_ParseTempleU(benchmark::State& state) {
  std::string src = read_program("templeU.uch");
  for (auto _ : state) {
    benchmark::DoNotOptimize(uchoo::parse_program(src));
  }
}
BENCHMARK(BM_ParseTempleU);

void BM_RunTempleU(benchmark::State& state) {
  uchoo::SourceFile file = uchoo::parse_program(read_program("templeU.uch"));
  uchoo::Program program = uchoo::load_program(file);
  for (auto _ : state) {
    uchoo::ScriptIoPort io({"medical"});
    benchmark::DoNotOptimize(uchoo::run(program, file.main, io));
  }
}
BENCHMARK(BM_RunTempleU);

void BM_SmartphoneLoop(benchmark::State& state) {
  uchoo::SourceFile file =
      uchoo::parse_program(read_program("smartphone.uch"));
  uchoo::Program program = uchoo::load_program(file);
  uchoo::Budget budget{static_cast<int>(state.range(0)), 200};
  for (auto _ : state) {
    uchoo::ScriptIoPort io;
    benchmark::DoNotOptimize(uchoo::run(program, file.main, io, budget));
  }
}
BENCHMARK(BM_SmartphoneLoop)->Arg(1000)->Arg(10000);

void BM_OracleTempleU(benchmark::State& state) {
  uchoo::SourceFile file = uchoo::parse_program(read_program("templeU.uch"));
  uchoo::Program program = uchoo::load_program(file);
  uchoo::GoalPtr goal = uchoo::parse_goal("major == medical");
  for (auto _ : state) {
    benchmark::DoNotOptimize(uchoo::oracle::enumerate(program, goal));
  }
}
BENCHMARK(BM_OracleTempleU);

}  // namespace

BENCHMARK_MAIN();
