#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace evsp {

enum class RowSense { Ge, Le, Eq };

// Column-wise LP with bounded variables:
//   min c'x  s.t.  rows sense rhs,  lb <= x <= ub  (ub may be +inf).
struct LpProblem {
  std::vector<double> obj;
  std::vector<double> lb;
  std::vector<double> ub;
  // col_entries[j] lists (row, coef) pairs of column j.
  std::vector<std::vector<std::pair<int, double>>> col_entries;
  std::vector<RowSense> sense;
  std::vector<double> rhs;

  int n_rows() const { return static_cast<int>(rhs.size()); }
  int n_cols() const { return static_cast<int>(obj.size()); }

  int add_row(RowSense s, double b);
  int add_column(double cost, double lower, double upper,
                 std::vector<std::pair<int, double>> entries);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct LpSolution {
  LpStatus status = LpStatus::IterLimit;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> duals;         // one per row
  std::vector<double> reduced_costs; // one per structural column
};

// Two-phase bounded-variable revised simplex with a dense basis inverse.
// Small by industrial standards but exact enough for restricted masters with
// a few thousand rows: Dantzig pricing with a Bland fallback against cycling,
// periodic refactorization, and warm starting across re-solves.
class SimplexSolver {
public:
  SimplexSolver();
  ~SimplexSolver();
  SimplexSolver(SimplexSolver&&) noexcept;
  SimplexSolver& operator=(SimplexSolver&&) noexcept;

  // Fresh solve from scratch, forgetting any previous basis.
  LpSolution solve(const LpProblem& p);

  // Re-solve after the problem grew new columns and/or changed bounds on
  // existing ones. Starts from the previous optimal basis when one exists.
  LpSolution resolve(const LpProblem& p);

  int last_iterations() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Independent optimality check: primal feasibility, dual feasibility of the
// reduced costs against variable status, and complementary slackness, all
// recomputed from the raw problem data. Returns an empty string when the
// certificate holds, else a description of the first violation.
std::string verify_lp_certificate(const LpProblem& p, const LpSolution& sol,
                                  double tol);

} // namespace evsp
