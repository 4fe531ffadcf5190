#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "evsp/instance.hpp"
#include "test_helpers.hpp"

// End-to-end smoke tests against the installed command line binary. The
// binary path comes in from the build system; every test works inside its
// own scratch directory under /tmp.

namespace fs = std::filesystem;
using namespace evsp;
using namespace evsp_test;

namespace {

const std::string kCli = EVSP_CLI_PATH;

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("evsp_cli_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~Scratch() { std::error_code ec; fs::remove_all(dir, ec); }
  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

int run(const std::string& args) {
  std::string cmd = "\"" + kCli + "\" " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace

TEST_CASE("generate, solve, validate, report round trip") {
  Scratch ws;
  std::string inst = ws.path("inst.json");
  std::string sched = ws.path("sched.json");
  std::string log = ws.path("log.csv");
  std::string occ = ws.path("occ.csv");

  CHECK(run("generate --seed 5 --trips 6 --profile compact -o " + inst) == 0);
  CHECK(fs::exists(inst));

  CHECK(run("solve " + inst + " -o " + sched +
            " --heuristic tcg --threads 2 --log " + log) == 0);
  CHECK(fs::exists(sched));
  std::string log_text = slurp(log);
  CHECK(log_text.rfind("iter,z_rmp,best_rc,lagrangian_lb,pricing_sec,lp_sec,"
                       "cols_added",
                       0) == 0);

  CHECK(run("validate " + inst + " " + sched) == 0);

  CHECK(run("report " + inst + " " + sched + " -o " + occ) == 0);
  CHECK(slurp(occ).rfind("station,block_start,charging,capacity", 0) == 0);
}

TEST_CASE("lower bound file feeds the gap report") {
  Scratch ws;
  std::string inst = ws.path("inst.json");
  std::string lb = ws.path("lb.json");
  std::string sched = ws.path("sched.json");
  std::string out = ws.path("solve_out.txt");

  REQUIRE(run("generate --seed 7 --trips 5 --profile compact -o " + inst) ==
          0);
  REQUIRE(run("lowerbound " + inst + " -o " + lb) == 0);
  CHECK(slurp(lb).find("\"value\"") != std::string::npos);

  std::string cmd = "\"" + kCli + "\" solve " + inst + " -o " + sched +
                    " --heuristic pnb --lb-file " + lb + " >" + out +
                    " 2>/dev/null";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  CHECK(WEXITSTATUS(status) == 0);
  std::string text = slurp(out);
  CHECK(text.find("Sol: ") != std::string::npos);
  CHECK(text.find("G: ") != std::string::npos);
}

TEST_CASE("the solver is deterministic across runs") {
  Scratch ws;
  std::string inst = ws.path("inst.json");
  std::string s1 = ws.path("a.json");
  std::string s2 = ws.path("b.json");
  REQUIRE(run("generate --seed 11 --trips 8 --profile compact -o " + inst) ==
          0);
  REQUIRE(run("solve " + inst + " -o " + s1 +
              " --heuristic tcg --threads 4") == 0);
  REQUIRE(run("solve " + inst + " -o " + s2 +
              " --heuristic tcg --threads 4") == 0);
  CHECK(slurp(s1) == slurp(s2));
}

TEST_CASE("usage and input errors exit with 2") {
  Scratch ws;
  CHECK(run("solve " + ws.path("missing.json")) == 2);
  CHECK(run("solve") == 2);
  CHECK(run("frobnicate") == 2);
  std::string inst = ws.path("inst.json");
  REQUIRE(run("generate --seed 3 --trips 4 --profile compact -o " + inst) ==
          0);
  CHECK(run("generate --seed 3 --trips 4 --profile bogus -o " +
            ws.path("x.json")) == 2);
  CHECK(run("solve " + inst + " --heuristic bogus") == 2);
  CHECK(run("solve " + inst + " --theta 0.3") == 2);
}

TEST_CASE("the oracle refuses instances above its cap") {
  Scratch ws;
  std::string inst = ws.path("big.json");
  REQUIRE(run("generate --seed 2 --trips 10 --profile compact -o " + inst) ==
          0);
  CHECK(run("oracle " + inst) == 2);

  std::string small = ws.path("small.json");
  REQUIRE(run("generate --seed 2 --trips 4 --profile compact -o " + small) ==
          0);
  CHECK(run("oracle " + small + " --mode paths --rounding optimistic") == 0);
  CHECK(run("oracle " + small + " --mode continuous") == 0);
}

TEST_CASE("an uncoverable trip makes solve report infeasible") {
  Scratch ws;
  Instance inst = forced_recharge_instance();
  // Stretch the second trip beyond what a full battery plus the floor allows:
  // no duty can cover it, whatever the charging plan.
  inst.trips[1].distance_km = 95.0;
  std::string path = ws.path("impossible.json");
  save_instance(inst, path);
  CHECK(run("solve " + path + " -o " + ws.path("s.json") +
            " --soc-step 20 --soc-min 20") == 1);
}
