#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "evsp/simplex.hpp"

using namespace evsp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A random LP that is feasible by construction: draw an interior point x0
// first, then set every right-hand side so x0 satisfies it with slack.
LpProblem random_feasible_lp(std::uint64_t seed, int m, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cost(-5.0, 5.0);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> point(0.0, 4.0);
  std::uniform_real_distribution<double> slack(0.0, 2.0);

  LpProblem p;
  for (int i = 0; i < m; ++i)
    p.add_row(RowSense::Ge, 0.0); // rhs filled in below

  std::vector<double> x0(n);
  std::vector<double> row_activity(m, 0.0);
  for (int j = 0; j < n; ++j) {
    double ub = (rng() % 3 == 0) ? kInf : 10.0;
    x0[j] = point(rng);
    std::vector<std::pair<int, double>> entries;
    for (int i = 0; i < m; ++i) {
      if (rng() % 5 < 3) {
        double a = coef(rng);
        entries.push_back({i, a});
        row_activity[i] += a * x0[j];
      }
    }
    // Keep costs nonnegative on unbounded columns so the LP stays bounded.
    double c = cost(rng);
    if (ub == kInf) c = std::abs(c);
    p.add_column(c, 0.0, ub, std::move(entries));
  }
  for (int i = 0; i < m; ++i) {
    switch (i % 3) {
    case 0:
      p.sense[i] = RowSense::Ge;
      p.rhs[i] = row_activity[i] - slack(rng);
      break;
    case 1:
      p.sense[i] = RowSense::Le;
      p.rhs[i] = row_activity[i] + slack(rng);
      break;
    default:
      p.sense[i] = RowSense::Eq;
      p.rhs[i] = row_activity[i];
      break;
    }
  }
  return p;
}

} // namespace

TEST_CASE("hand-solved LPs come out right") {
  SimplexSolver solver;

  SUBCASE("two variables, one covering row") {
    // min 3x + 2y  s.t.  x + y >= 4, x,y >= 0  ->  y = 4.
    LpProblem p;
    p.add_row(RowSense::Ge, 4.0);
    p.add_column(3.0, 0.0, kInf, {{0, 1.0}});
    p.add_column(2.0, 0.0, kInf, {{0, 1.0}});
    LpSolution s = solver.solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(8.0));
    CHECK(s.x[1] == doctest::Approx(4.0));
    CHECK(verify_lp_certificate(p, s, 1e-7).empty());
  }

  SUBCASE("upper bounds bind") {
    // min -x - 2y  s.t.  x + y <= 4,  0 <= x <= 3, 0 <= y <= 3  ->  (1, 3).
    LpProblem p;
    p.add_row(RowSense::Le, 4.0);
    p.add_column(-1.0, 0.0, 3.0, {{0, 1.0}});
    p.add_column(-2.0, 0.0, 3.0, {{0, 1.0}});
    LpSolution s = solver.solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-7.0));
    CHECK(s.x[0] == doctest::Approx(1.0));
    CHECK(s.x[1] == doctest::Approx(3.0));
    CHECK(verify_lp_certificate(p, s, 1e-7).empty());
  }

  SUBCASE("equality row") {
    // min x + y  s.t.  x + 2y = 6, y <= 2  ->  (2, 2).
    LpProblem p;
    p.add_row(RowSense::Eq, 6.0);
    p.add_column(1.0, 0.0, kInf, {{0, 1.0}});
    p.add_column(1.0, 0.0, 2.0, {{0, 2.0}});
    LpSolution s = solver.solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(4.0));
    CHECK(verify_lp_certificate(p, s, 1e-7).empty());
  }

  SUBCASE("infeasible rows") {
    // x >= 2 and x <= 1 cannot both hold.
    LpProblem p;
    p.add_row(RowSense::Ge, 2.0);
    p.add_row(RowSense::Le, 1.0);
    p.add_column(1.0, 0.0, kInf, {{0, 1.0}, {1, 1.0}});
    CHECK(solver.solve(p).status == LpStatus::Infeasible);
  }

  SUBCASE("unbounded ray") {
    // min -x  s.t.  x - y <= 1 with y free upward: x can grow forever.
    LpProblem p;
    p.add_row(RowSense::Le, 1.0);
    p.add_column(-1.0, 0.0, kInf, {{0, 1.0}});
    p.add_column(0.0, 0.0, kInf, {{0, -1.0}});
    CHECK(solver.solve(p).status == LpStatus::Unbounded);
  }

  SUBCASE("no rows at all") {
    LpProblem p;
    p.add_column(2.0, 1.0, 5.0, {});
    p.add_column(-3.0, 0.0, 4.0, {});
    LpSolution s = solver.solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(2.0 - 12.0));
    CHECK(s.x[0] == 1.0);
    CHECK(s.x[1] == 4.0);

    LpProblem q;
    q.add_column(-1.0, 0.0, kInf, {});
    CHECK(solver.solve(q).status == LpStatus::Unbounded);
  }

  SUBCASE("degenerate ties do not cycle") {
    // Several rows intersect at the same vertex.
    LpProblem p;
    p.add_row(RowSense::Le, 1.0);
    p.add_row(RowSense::Le, 1.0);
    p.add_row(RowSense::Le, 1.0);
    p.add_column(-1.0, 0.0, kInf, {{0, 1.0}, {1, 1.0}, {2, 1.0}});
    p.add_column(-1.0, 0.0, kInf, {{0, 1.0}, {1, 1.0}});
    p.add_column(-1.0, 0.0, kInf, {{0, 1.0}, {2, 1.0}});
    LpSolution s = solver.solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-1.0));
    CHECK(verify_lp_certificate(p, s, 1e-7).empty());
  }
}

TEST_CASE("random feasible LPs always earn a clean optimality certificate") {
  SimplexSolver solver;
  std::mt19937_64 pick(42);
  for (int trial = 0; trial < 60; ++trial) {
    int m = 1 + int(pick() % 8);
    int n = m + int(pick() % 10);
    LpProblem p = random_feasible_lp(1000 + trial, m, n);
    LpSolution s = solver.solve(p);
    // Feasible by construction, and costs on unbounded columns are >= 0.
    REQUIRE_MESSAGE(s.status == LpStatus::Optimal, "trial ", trial);
    std::string cert = verify_lp_certificate(p, s, 1e-6);
    CHECK_MESSAGE(cert.empty(), "trial ", trial, ": ", cert);
  }
}

TEST_CASE("resolve after adding columns matches a cold solve") {
  for (int trial = 0; trial < 20; ++trial) {
    LpProblem p = random_feasible_lp(7000 + trial, 5, 8);
    SimplexSolver warm;
    LpSolution base = warm.solve(p);
    REQUIRE(base.status == LpStatus::Optimal);

    std::mt19937_64 rng(99 + trial);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int extra = 0; extra < 3; ++extra) {
      std::vector<std::pair<int, double>> entries;
      for (int i = 0; i < p.n_rows(); ++i)
        if (rng() % 2) entries.push_back({i, coef(rng)});
      p.add_column(0.5 + 0.1 * extra, 0.0, 10.0, std::move(entries));
    }
    LpSolution ws = warm.resolve(p);
    REQUIRE(ws.status == LpStatus::Optimal);
    // More columns can only help a minimization.
    CHECK(ws.objective <= base.objective + 1e-7);

    SimplexSolver cold;
    LpSolution cs = cold.solve(p);
    REQUIRE(cs.status == LpStatus::Optimal);
    CHECK(ws.objective ==
          doctest::Approx(cs.objective).epsilon(1e-7).scale(1.0));
    CHECK(verify_lp_certificate(p, ws, 1e-6).empty());
  }
}

TEST_CASE("resolve after adding rows matches a cold solve") {
  for (int trial = 0; trial < 20; ++trial) {
    LpProblem p = random_feasible_lp(8000 + trial, 4, 7);
    SimplexSolver warm;
    REQUIRE(warm.solve(p).status == LpStatus::Optimal);

    // A new <= row over fresh columns only: the usual growth pattern of a
    // master problem that discovers a new capacity constraint.
    int r = p.add_row(RowSense::Le, 2.0);
    p.add_column(1.0, 0.0, kInf, {{0, 1.0}, {r, 1.0}});
    p.add_column(2.5, 0.0, kInf, {{r, 1.0}});
    LpSolution ws = warm.resolve(p);
    REQUIRE(ws.status == LpStatus::Optimal);

    SimplexSolver cold;
    LpSolution cs = cold.solve(p);
    REQUIRE(cs.status == LpStatus::Optimal);
    CHECK(ws.objective ==
          doctest::Approx(cs.objective).epsilon(1e-7).scale(1.0));
    CHECK(verify_lp_certificate(p, ws, 1e-6).empty());
  }
}

TEST_CASE("resolve after adding a row that touches old columns") {
  for (int trial = 0; trial < 20; ++trial) {
    LpProblem p = random_feasible_lp(8500 + trial, 4, 7);
    SimplexSolver warm;
    LpSolution base = warm.solve(p);
    REQUIRE(base.status == LpStatus::Optimal);

    // Cut off the current optimum with a <= row over existing columns; the
    // warm path has to repair primal feasibility, not just extend the basis.
    double activity = 0.0;
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < p.n_cols(); ++j)
      if (j % 2 == 0) {
        activity += base.x[j];
        row.push_back({j, 1.0});
      }
    int r = p.add_row(RowSense::Le, activity * 0.75 - 0.1);
    for (auto& [j, a] : row) p.col_entries[j].push_back({r, a});
    LpSolution ws = warm.resolve(p);

    SimplexSolver cold;
    LpSolution cs = cold.solve(p);
    REQUIRE(ws.status == cs.status);
    if (cs.status == LpStatus::Optimal) {
      CHECK(ws.objective ==
            doctest::Approx(cs.objective).epsilon(1e-7).scale(1.0));
      CHECK(verify_lp_certificate(p, ws, 1e-6).empty());
    }
  }
}

TEST_CASE("resolve after raising lower bounds matches a cold solve") {
  for (int trial = 0; trial < 30; ++trial) {
    LpProblem p = random_feasible_lp(9000 + trial, 5, 9);
    SimplexSolver warm;
    LpSolution base = warm.solve(p);
    REQUIRE(base.status == LpStatus::Optimal);

    // Pin the most active variable well above its current value, the move a
    // diving heuristic makes when it fixes a column.
    int j_star = 0;
    for (int j = 1; j < p.n_cols(); ++j)
      if (base.x[j] > base.x[j_star]) j_star = j;
    p.lb[j_star] = base.x[j_star] + 1.0;
    if (p.ub[j_star] < p.lb[j_star]) p.ub[j_star] = p.lb[j_star] + 1.0;

    LpSolution ws = warm.resolve(p);
    SimplexSolver cold;
    LpSolution cs = cold.solve(p);
    REQUIRE(ws.status == cs.status);
    if (cs.status == LpStatus::Optimal) {
      CHECK(ws.objective ==
            doctest::Approx(cs.objective).epsilon(1e-7).scale(1.0));
      CHECK(verify_lp_certificate(p, ws, 1e-6).empty());
      // Raising a lower bound can only hurt.
      CHECK(ws.objective >= base.objective - 1e-7);
    }
  }
}

TEST_CASE("verify_lp_certificate rejects a tampered solution") {
  LpProblem p;
  p.add_row(RowSense::Ge, 4.0);
  p.add_column(3.0, 0.0, kInf, {{0, 1.0}});
  p.add_column(2.0, 0.0, kInf, {{0, 1.0}});
  SimplexSolver solver;
  LpSolution s = solver.solve(p);
  REQUIRE(s.status == LpStatus::Optimal);
  REQUIRE(verify_lp_certificate(p, s, 1e-7).empty());

  LpSolution bad = s;
  bad.x[1] = 3.0; // violates the covering row
  CHECK(!verify_lp_certificate(p, bad, 1e-7).empty());

  LpSolution bad2 = s;
  bad2.duals[0] = 3.5; // makes column 1's reduced cost negative
  CHECK(!verify_lp_certificate(p, bad2, 1e-7).empty());
}
