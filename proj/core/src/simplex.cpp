#include "evsp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <vector>

#include "evsp/common.hpp"

namespace evsp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-7;  // bound/row violation we accept
constexpr double kOptTol = 1e-7;   // reduced cost threshold
constexpr double kPivTol = 1e-9;   // smallest usable pivot element
constexpr int kRefactorEvery = 128;
constexpr int kDegenerateBeforeBland = 200;

LpSolution status_only(LpStatus st) {
  LpSolution sol;
  sol.status = st;
  return sol;
}
} // namespace

int LpProblem::add_row(RowSense s, double b) {
  sense.push_back(s);
  rhs.push_back(b);
  return n_rows() - 1;
}

int LpProblem::add_column(double cost, double lower, double upper,
                          std::vector<std::pair<int, double>> entries) {
  obj.push_back(cost);
  lb.push_back(lower);
  ub.push_back(upper);
  col_entries.push_back(std::move(entries));
  return n_cols() - 1;
}

// Internal variable layout: [0, n) structurals, [n, n+m) logicals (surplus
// for >=, slack for <=, a pinned-at-zero placeholder for ==), [n+m, n+2m)
// artificials. Artificials start the phase-1 basis and get their upper
// bound collapsed to zero for phase 2.
struct SimplexSolver::Impl {
  enum class VStatus : unsigned char { Basic, AtLower, AtUpper };

  int n = 0;
  int m = 0;
  std::vector<double> art_coef; // +-1 per row
  std::vector<VStatus> status;  // per variable, n + 2m
  std::vector<int> basic;       // variable index per basis position
  std::vector<double> binv;     // dense m x m basis inverse, row-major
  std::vector<double> xb;       // values of basic variables
  bool arts_locked = false;     // phase 2: artificials pinned to zero
  bool has_basis = false;
  bool perturbed = false;       // jittered costs/bounds against stalling
  int iterations = 0;
  int phase = 1;
  int since_refactor = 0; // eta updates stacked on the last factorization

  const LpProblem* p = nullptr;

  int total() const { return n + 2 * m; }
  bool is_art(int v) const { return v >= n + m; }
  bool is_logical(int v) const { return v >= n && v < n + m; }

  // Deterministic hash of the variable index into [0, 1). Set covering is
  // massively degenerate: many columns tie on reduced cost and most ratio
  // tests hit several bounds at once, so Dantzig stalls and even Bland can
  // spin through hundreds of thousands of zero-step pivots. While the
  // perturbed flag is up, every cost gets a tiny jitter (breaking entering
  // ties) and every finite bound is widened by a tiny jitter (breaking
  // ratio-test ties, so steps are small but nonzero). Widening never
  // invalidates a feasible basis; snapping back afterwards leaves at most
  // jitter-sized violations for the dual simplex to repair before a clean
  // finishing pass restores exactness.
  static double jitter(int v) {
    std::uint64_t z = (static_cast<std::uint64_t>(v) + 1) *
                      0x9E3779B97F4A7C15ull;
    z ^= z >> 32;
    z *= 0xD6E8FEB86659FD93ull;
    z ^= z >> 32;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }

  static constexpr double kBoundPert = 1e-7;

  double cost(int v) const {
    if (phase == 1) return is_art(v) ? 1.0 : 0.0;
    if (v >= n) return 0.0;
    double c = p->obj[v];
    if (perturbed) c += (1e-9 + 1e-8 * jitter(v)) * std::max(1.0, std::abs(c));
    return c;
  }

  double lo(int v) const {
    double b = v < n ? p->lb[v] : 0.0;
    if (perturbed && !is_art(v)) b -= kBoundPert * (1.0 + jitter(v));
    return b;
  }

  double up(int v) const {
    double b;
    if (v < n) {
      b = p->ub[v];
    } else if (is_art(v)) {
      b = arts_locked ? 0.0 : kInf;
    } else {
      b = p->sense[v - n] == RowSense::Eq ? 0.0 : kInf;
    }
    if (perturbed && b != kInf && !is_art(v))
      b += kBoundPert * (1.0 + jitter(v ^ 0x5bd1e995));
    return b;
  }

  double logical_coef(int r) const {
    return p->sense[r] == RowSense::Ge ? -1.0 : 1.0;
  }

  // Apply y += x * column(v) ... used via callbacks below instead; keep
  // per-use loops simple and branch on the variable class inline.

  double dot_col(int v, const std::vector<double>& y) const {
    if (v < n) {
      double s = 0.0;
      for (const auto& [r, a] : p->col_entries[v]) s += y[r] * a;
      return s;
    }
    if (is_art(v)) return y[v - n - m] * art_coef[v - n - m];
    return y[v - n] * logical_coef(v - n);
  }

  // w = B^-1 * column(v)
  void ftran(int v, std::vector<double>& w) const {
    std::fill(w.begin(), w.end(), 0.0);
    auto add = [&](int r, double a) {
      for (int i = 0; i < m; ++i) w[i] += binv[i * m + r] * a;
    };
    if (v < n) {
      for (const auto& [r, a] : p->col_entries[v]) add(r, a);
    } else if (is_art(v)) {
      add(v - n - m, art_coef[v - n - m]);
    } else {
      add(v - n, logical_coef(v - n));
    }
  }

  double nonbasic_value(int v) const {
    return status[v] == VStatus::AtUpper ? up(v) : lo(v);
  }

  // xb = B^-1 (b - N x_N), iterating only nonbasics away from zero.
  void compute_xb() {
    std::vector<double> rhs(p->rhs);
    for (int v = 0; v < total(); ++v) {
      if (status[v] == VStatus::Basic) continue;
      double x = nonbasic_value(v);
      if (x == 0.0) continue;
      if (v < n) {
        for (const auto& [r, a] : p->col_entries[v]) rhs[r] -= a * x;
      } else if (is_art(v)) {
        rhs[v - n - m] -= art_coef[v - n - m] * x;
      } else {
        rhs[v - n] -= logical_coef(v - n) * x;
      }
    }
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int r = 0; r < m; ++r) s += binv[i * m + r] * rhs[r];
      xb[i] = s;
    }
  }

  // Rebuild binv from the basis columns by Gauss-Jordan with partial
  // pivoting. Returns false when the basis matrix is numerically singular,
  // which also drops the basis so callers restart from scratch.
  bool refactor() {
    since_refactor = 0;
    std::vector<double> mat(static_cast<std::size_t>(m) * m, 0.0);
    for (int k = 0; k < m; ++k) {
      int v = basic[k];
      if (v < n) {
        for (const auto& [r, a] : p->col_entries[v]) mat[r * m + k] = a;
      } else if (is_art(v)) {
        mat[(v - n - m) * m + k] = art_coef[v - n - m];
      } else {
        mat[(v - n) * m + k] = logical_coef(v - n);
      }
    }
    std::vector<double>& inv = binv;
    std::fill(inv.begin(), inv.end(), 0.0);
    for (int i = 0; i < m; ++i) inv[i * m + i] = 1.0;
    for (int col = 0; col < m; ++col) {
      int piv = -1;
      double best = kPivTol;
      for (int r = col; r < m; ++r) {
        double a = std::abs(mat[r * m + col]);
        if (a > best) {
          best = a;
          piv = r;
        }
      }
      if (piv < 0) {
        has_basis = false;
        return false;
      }
      if (piv != col) {
        for (int c = 0; c < m; ++c) {
          std::swap(mat[piv * m + c], mat[col * m + c]);
          std::swap(inv[piv * m + c], inv[col * m + c]);
        }
      }
      double d = mat[col * m + col];
      for (int c = 0; c < m; ++c) {
        mat[col * m + c] /= d;
        inv[col * m + c] /= d;
      }
      for (int r = 0; r < m; ++r) {
        if (r == col) continue;
        double f = mat[r * m + col];
        if (f == 0.0) continue;
        for (int c = 0; c < m; ++c) {
          mat[r * m + c] -= f * mat[col * m + c];
          inv[r * m + c] -= f * inv[col * m + c];
        }
      }
    }
    return true;
  }

  void duals(std::vector<double>& y) const {
    y.assign(m, 0.0);
    for (int k = 0; k < m; ++k) {
      double c = cost(basic[k]);
      if (c == 0.0) continue;
      for (int r = 0; r < m; ++r) y[r] += c * binv[k * m + r];
    }
  }

  double phase_obj() const {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += cost(basic[k]) * xb[k];
    for (int v = 0; v < total(); ++v)
      if (status[v] != VStatus::Basic) s += cost(v) * nonbasic_value(v);
    return s;
  }

  // One simplex phase. Returns Optimal (phase objective minimized),
  // Unbounded, or IterLimit.
  LpStatus run_phase(long long max_iters) {
    const bool trace = std::getenv("EVSP_LP_TRACE") != nullptr;
    long long trace_at = 1;
    std::vector<double> y(m), w(m);
    int degenerate_streak = 0;
    long long phase_iters = 0;
    bool bland = false;
    while (max_iters-- > 0) {
      ++phase_iters;
      if (trace && phase_iters >= trace_at) {
        std::fprintf(stderr,
                     "[lp] phase=%d m=%d n=%d it=%lld obj=%.6f bland=%d\n",
                     phase, m, n, phase_iters, phase_obj(), (int)bland);
        trace_at = phase_iters < 1000 ? phase_iters * 2 : phase_iters + 20000;
      }
      duals(y);
      // Pricing: most negative violation (Dantzig), or lowest index when
      // cycling forced us into Bland's rule.
      int enter = -1;
      double best_viol = kOptTol;
      bool enter_from_lower = true;
      for (int v = 0; v < total(); ++v) {
        if (status[v] == VStatus::Basic) continue;
        if (phase == 2 && is_art(v)) continue;
        double span = up(v) - lo(v);
        if (span < 1e-12) continue; // pinned: can never move
        double d = cost(v) - dot_col(v, y);
        double viol = 0.0;
        bool from_lower = status[v] == VStatus::AtLower;
        if (from_lower && d < -kOptTol) viol = -d;
        if (!from_lower && d > kOptTol) viol = d;
        if (viol == 0.0) continue;
        if (bland) {
          enter = v;
          enter_from_lower = from_lower;
          break;
        }
        if (viol > best_viol) {
          best_viol = viol;
          enter = v;
          enter_from_lower = from_lower;
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      ftran(enter, w);
      // Ratio test. Moving the entering variable by t >= 0 changes basics
      // by -t*w (entering from lower) or +t*w (from upper).
      double dir = enter_from_lower ? 1.0 : -1.0;
      double t_limit = up(enter) - lo(enter); // bound flip
      int leave_pos = -1;
      bool leave_at_upper = false;
      double leave_piv = 0.0;
      if (!bland) {
        // Two-pass Harris test: first find how far we may go if every
        // blocking bound is allowed kFeasTol of slack, then among the rows
        // that truly block within that distance take the numerically
        // strongest pivot. Tiny pivots wreck the eta updates; trading a
        // tolerance-sized overshoot for a fat pivot keeps the basis sane.
        double t_relaxed = t_limit;
        for (int k = 0; k < m; ++k) {
          double wk = dir * w[k];
          int bv = basic[k];
          double t;
          if (wk > kPivTol) {
            t = (xb[k] - lo(bv) + kFeasTol) / wk;
          } else if (wk < -kPivTol) {
            double u = up(bv);
            if (u == kInf) continue;
            t = (u - xb[k] + kFeasTol) / (-wk);
          } else {
            continue;
          }
          if (t < t_relaxed) t_relaxed = t;
        }
        if (t_relaxed < 0.0) t_relaxed = 0.0;
        double t_leave = kInf;
        for (int k = 0; k < m; ++k) {
          double wk = dir * w[k];
          int bv = basic[k];
          double t;
          bool at_upper;
          if (wk > kPivTol) {
            t = (xb[k] - lo(bv)) / wk;
            at_upper = false;
          } else if (wk < -kPivTol) {
            double u = up(bv);
            if (u == kInf) continue;
            t = (u - xb[k]) / (-wk);
            at_upper = true;
          } else {
            continue;
          }
          if (t < 0.0) t = 0.0; // drift below a bound reads as a zero step
          if (t > t_relaxed) continue;
          if (leave_pos < 0 || std::abs(wk) > std::abs(leave_piv)) {
            leave_pos = k;
            leave_at_upper = at_upper;
            leave_piv = wk;
            t_leave = t;
          }
        }
        if (leave_pos >= 0 && t_leave <= t_limit) {
          t_limit = t_leave;
        } else {
          leave_pos = -1; // the entering variable's own bound flip is first
        }
      } else {
        // Bland mode: exact lowest-index rule on both ends, the classic
        // finite-termination safeguard for degenerate streaks.
        for (int k = 0; k < m; ++k) {
          double wk = dir * w[k];
          int bv = basic[k];
          double t;
          bool at_upper;
          if (wk > kPivTol) {
            t = (xb[k] - lo(bv)) / wk;
            at_upper = false;
          } else if (wk < -kPivTol) {
            double u = up(bv);
            if (u == kInf) continue;
            t = (u - xb[k]) / (-wk);
            at_upper = true;
          } else {
            continue;
          }
          if (t < 0.0) t = 0.0;
          bool take;
          if (leave_pos < 0) {
            take = t <= t_limit;
          } else if (t < t_limit - 1e-12) {
            take = true;
          } else if (t < t_limit + 1e-12) {
            take = basic[k] < basic[leave_pos];
          } else {
            take = false;
          }
          if (take) {
            t_limit = std::min(t_limit, t);
            leave_pos = k;
            leave_at_upper = at_upper;
            leave_piv = wk;
          }
        }
      }
      if (t_limit == kInf) return LpStatus::Unbounded;

      // A tiny pivot out of a stale factorization is how bases go singular:
      // rebuild and re-price instead of committing to it.
      if (leave_pos >= 0 && std::abs(w[leave_pos]) < 1e-7 &&
          since_refactor > 0) {
        if (!refactor()) return LpStatus::IterLimit;
        compute_xb();
        ++max_iters; // the retry is not a pivot
        continue;
      }

      ++iterations;
      // Tiny steps stall like zero steps do, so both feed the streak; once
      // the streak trips we stay on Bland's rule until real progress. With
      // the bounds jittered a cycle cannot close (the objective strictly
      // falls), so no stronger safeguard is needed.
      degenerate_streak = t_limit < 1e-9 ? degenerate_streak + 1 : 0;
      if (degenerate_streak > kDegenerateBeforeBland)
        bland = true;
      else if (degenerate_streak == 0 && t_limit > 1e-7)
        bland = false;

      if (leave_pos < 0) {
        // Pure bound flip: entering variable jumps to its other bound.
        for (int k = 0; k < m; ++k) xb[k] -= dir * t_limit * w[k];
        status[enter] = enter_from_lower ? VStatus::AtUpper : VStatus::AtLower;
        continue;
      }

      // Pivot: entering variable becomes basic at its new value, the leaving
      // variable exits at the bound it ran into.
      double enter_val = enter_from_lower ? lo(enter) + t_limit
                                          : up(enter) - t_limit;
      for (int k = 0; k < m; ++k) xb[k] -= dir * t_limit * w[k];
      int leave_var = basic[leave_pos];
      status[leave_var] = leave_at_upper ? VStatus::AtUpper : VStatus::AtLower;
      status[enter] = VStatus::Basic;
      basic[leave_pos] = enter;
      xb[leave_pos] = enter_val;

      double piv = w[leave_pos];
      double* prow = &binv[static_cast<std::size_t>(leave_pos) * m];
      for (int c = 0; c < m; ++c) prow[c] /= piv;
      for (int i = 0; i < m; ++i) {
        if (i == leave_pos) continue;
        double f = w[i];
        if (f == 0.0) continue;
        double* row = &binv[static_cast<std::size_t>(i) * m];
        for (int c = 0; c < m; ++c) row[c] -= f * prow[c];
      }

      if (++since_refactor >= kRefactorEvery) {
        if (!refactor()) return LpStatus::IterLimit;
        compute_xb();
      }
    }
    return LpStatus::IterLimit;
  }

  // Dual simplex: walks an optimal-but-bound-violating basis back into the
  // feasible region. After fixing or branching moves bounds, the reduced
  // costs keep their signs (costs never changed), so the basis stays dual
  // feasible and each step drives one violated basic variable to its bound.
  // A from-scratch phase 1 on these degenerate covering LPs crawls for tens
  // of thousands of Bland pivots; the dual method needs a handful. Returns
  // Optimal once primal feasible, Infeasible when a violated row has no
  // eligible pivot (callers should confirm with a cold solve), IterLimit on
  // a stall.
  LpStatus run_dual(long long max_iters) {
    const bool trace = std::getenv("EVSP_LP_TRACE") != nullptr;
    long long dual_iters = 0;
    std::vector<double> y(m), w(m), rho(m);
    while (max_iters-- > 0) {
      ++dual_iters;
      if (trace && (dual_iters & (dual_iters - 1)) == 0)
        std::fprintf(stderr, "[lp] dual m=%d n=%d it=%lld\n", m, n,
                     dual_iters);
      // Most violated basic variable leaves.
      int r = -1;
      double worst = kFeasTol;
      double t_dir = 0.0; // -1: rises to its lower bound, +1: falls to upper
      for (int k = 0; k < m; ++k) {
        int v = basic[k];
        double below = lo(v) - xb[k];
        double above = xb[k] - up(v);
        if (below > worst) {
          worst = below;
          r = k;
          t_dir = -1.0;
        }
        if (above > worst) {
          worst = above;
          r = k;
          t_dir = 1.0;
        }
      }
      if (r < 0) return LpStatus::Optimal;

      duals(y);
      for (int i = 0; i < m; ++i) rho[i] = binv[static_cast<std::size_t>(r) * m + i];
      // Entering: smallest dual ratio among columns whose move pushes the
      // leaving variable toward its bound; ties go to the strongest pivot.
      int enter = -1;
      double best_theta = kInf;
      double enter_alpha = 0.0;
      bool enter_from_lower = true;
      for (int q = 0; q < total(); ++q) {
        if (status[q] == VStatus::Basic) continue;
        if (phase == 2 && is_art(q)) continue;
        if (up(q) - lo(q) < 1e-12) continue;
        double alpha = dot_col(q, rho);
        bool from_lower = status[q] == VStatus::AtLower;
        double ta = t_dir * alpha;
        // From lower the variable increases, moving row r by -alpha per
        // unit; it helps when t_dir*alpha > 0. From upper it decreases,
        // helping when t_dir*alpha < 0.
        if (from_lower ? ta <= kPivTol : ta >= -kPivTol) continue;
        double d = cost(q) - dot_col(q, y);
        double theta = d / ta; // >= 0 up to tolerance slop in d
        if (theta < 0.0) theta = 0.0;
        if (theta < best_theta - 1e-12 ||
            (theta < best_theta + 1e-12 &&
             std::abs(alpha) > std::abs(enter_alpha))) {
          best_theta = theta;
          enter = q;
          enter_alpha = alpha;
          enter_from_lower = from_lower;
        }
      }
      if (enter < 0) return LpStatus::Infeasible;

      ftran(enter, w);
      double alpha = w[r];
      if (std::abs(alpha) < 1e-7) {
        if (since_refactor > 0) {
          if (!refactor()) return LpStatus::IterLimit;
          compute_xb();
          ++max_iters;
          continue;
        }
        return LpStatus::IterLimit; // genuinely tiny pivot: give up here
      }

      ++iterations;
      int leave_var = basic[r];
      double bound_r = t_dir < 0 ? lo(leave_var) : up(leave_var);
      double delta = enter_from_lower ? (xb[r] - bound_r) / alpha
                                      : (bound_r - xb[r]) / alpha;
      if (delta < 0.0) delta = 0.0;
      double dir = enter_from_lower ? 1.0 : -1.0;
      for (int k = 0; k < m; ++k) xb[k] -= dir * delta * w[k];
      status[leave_var] = t_dir < 0 ? VStatus::AtLower : VStatus::AtUpper;
      status[enter] = VStatus::Basic;
      basic[r] = enter;
      xb[r] = enter_from_lower ? lo(enter) + delta : up(enter) - delta;

      double piv = w[r];
      double* prow = &binv[static_cast<std::size_t>(r) * m];
      for (int c = 0; c < m; ++c) prow[c] /= piv;
      for (int i = 0; i < m; ++i) {
        if (i == r) continue;
        double f = w[i];
        if (f == 0.0) continue;
        double* row = &binv[static_cast<std::size_t>(i) * m];
        for (int c = 0; c < m; ++c) row[c] -= f * prow[c];
      }
      if (++since_refactor >= kRefactorEvery) {
        if (!refactor()) return LpStatus::IterLimit;
        compute_xb();
      }
    }
    return LpStatus::IterLimit;
  }

  // Prime a phase-1 basis of artificials sized to the current residuals.
  void cold_start() {
    status.assign(total(), VStatus::AtLower);
    basic.resize(m);
    xb.assign(m, 0.0);
    binv.assign(static_cast<std::size_t>(m) * m, 0.0);
    art_coef.assign(m, 1.0);
    arts_locked = false;
    since_refactor = 0; // diag(+-1) below is exact

    std::vector<double> resid(p->rhs);
    for (int v = 0; v < n; ++v) {
      double x = p->lb[v];
      if (x == 0.0) continue;
      for (const auto& [r, a] : p->col_entries[v]) resid[r] -= a * x;
    }
    for (int i = 0; i < m; ++i) {
      art_coef[i] = resid[i] >= 0.0 ? 1.0 : -1.0;
      basic[i] = n + m + i;
      status[n + m + i] = VStatus::Basic;
      xb[i] = std::abs(resid[i]);
      binv[i * m + i] = art_coef[i]; // diag(+-1) inverts to itself
    }
  }

  double phase1_infeasibility() const {
    double s = 0.0;
    for (int k = 0; k < m; ++k)
      if (is_art(basic[k])) s += xb[k];
    return s;
  }

  bool basis_feasible() const {
    for (int k = 0; k < m; ++k) {
      int v = basic[k];
      if (xb[k] < lo(v) - kFeasTol || xb[k] > up(v) + kFeasTol) return false;
    }
    return true;
  }

  LpSolution extract() {
    // Tighten numbers once before reporting.
    if (!refactor()) throw EvspError("LP basis became singular");
    compute_xb();

    LpSolution sol;
    sol.x.assign(n, 0.0);
    for (int v = 0; v < n; ++v)
      if (status[v] != VStatus::Basic) sol.x[v] = nonbasic_value(v);
    for (int k = 0; k < m; ++k)
      if (basic[k] < n) sol.x[basic[k]] = xb[k];

    std::vector<double> y;
    duals(y);
    sol.duals = y;
    sol.reduced_costs.assign(n, 0.0);
    for (int v = 0; v < n; ++v)
      sol.reduced_costs[v] = p->obj[v] - dot_col(v, y);

    sol.objective = 0.0;
    for (int v = 0; v < n; ++v) sol.objective += p->obj[v] * sol.x[v];
    sol.status = LpStatus::Optimal;
    return sol;
  }

  // Phase 2 to proven optimality under the true data: optimize with the
  // jitter up, snap back, repair the jitter-sized bound violations with the
  // dual simplex, then finish clean. Unbounded under jitter is genuine
  // (costs only ever go up and the infinite bounds stay infinite).
  LpStatus optimize_phase2(long long cap) {
    phase = 2;
    arts_locked = true;
    perturbed = true;
    LpStatus st = run_phase(cap);
    perturbed = false;
    if (st != LpStatus::Optimal) return st;
    compute_xb();
    if (!basis_feasible()) {
      st = run_dual(2000 + 4LL * m);
      if (st != LpStatus::Optimal || !basis_feasible())
        return st == LpStatus::Unbounded ? st : LpStatus::IterLimit;
    }
    return run_phase(cap);
  }

  LpSolution solve_from_cold() {
    phase = 1;
    perturbed = false;
    cold_start();
    long long cap = 20000 + 400LL * m;
    LpStatus st = run_phase(cap);
    if (st == LpStatus::IterLimit) return status_only(LpStatus::IterLimit);
    // Phase 1 is never unbounded: the objective is bounded below by zero.
    if (phase1_infeasibility() > 1e-6) return status_only(LpStatus::Infeasible);
    st = optimize_phase2(cap);
    if (st != LpStatus::Optimal) return status_only(st);
    has_basis = true;
    return extract();
  }
};

SimplexSolver::SimplexSolver() : impl_(new Impl) {}
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

LpSolution SimplexSolver::solve(const LpProblem& p) {
  impl_->p = &p;
  impl_->n = p.n_cols();
  impl_->m = p.n_rows();
  impl_->iterations = 0;
  impl_->has_basis = false;
  if (impl_->m == 0) {
    // No rows: each variable sits at whichever bound its cost prefers.
    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.x = p.lb;
    for (int v = 0; v < p.n_cols(); ++v) {
      if (p.obj[v] < 0.0) {
        if (p.ub[v] >= kInf) return status_only(LpStatus::Unbounded);
        sol.x[v] = p.ub[v];
      }
      sol.objective += p.obj[v] * sol.x[v];
    }
    sol.reduced_costs = p.obj;
    return sol;
  }
  return impl_->solve_from_cold();
}

LpSolution SimplexSolver::resolve(const LpProblem& p) {
  Impl& im = *impl_;
  if (!im.has_basis || im.m > p.n_rows() || p.n_cols() < im.n)
    return solve(p);
  im.p = &p;
  im.iterations = 0;
  // New columns arrive with arbitrary reduced costs, which would break the
  // dual-feasibility premise of the dual simplex below; their resolves are
  // primal feasible anyway (columns enter at zero), so just remember.
  bool cols_grew = p.n_cols() > im.n;
  if (p.n_cols() > im.n) {
    // Columns appended since the last solve enter nonbasic at their lower
    // bound. Shift logical/artificial statuses up to make room for them.
    std::vector<Impl::VStatus> ns(p.n_cols() + 2 * im.m,
                                  Impl::VStatus::AtLower);
    for (int v = 0; v < im.n; ++v) ns[v] = im.status[v];
    for (int v = 0; v < 2 * im.m; ++v) ns[p.n_cols() + v] = im.status[im.n + v];
    for (int k = 0; k < im.m; ++k)
      if (im.basic[k] >= im.n) im.basic[k] += p.n_cols() - im.n;
    im.status = std::move(ns);
    im.n = p.n_cols();
  }
  if (p.n_rows() > im.m) {
    // Rows appended since the last solve get their logical into the basis.
    // The extended basis matrix is block lower triangular (old basis, then
    // an identity over the new rows), hence nonsingular; and when no old
    // basic column touches a new row the inverse extends block-diagonally,
    // skipping a refactorization.
    int m_old = im.m;
    int m_new = p.n_rows();
    bool old_basis_touches_new_rows = false;
    for (int k = 0; k < m_old && !old_basis_touches_new_rows; ++k) {
      int v = im.basic[k];
      if (v >= im.n) continue;
      for (const auto& [r, a] : p.col_entries[v])
        if (r >= m_old && a != 0.0) old_basis_touches_new_rows = true;
    }
    std::vector<Impl::VStatus> ns(im.n + 2 * m_new, Impl::VStatus::AtLower);
    for (int v = 0; v < im.n + m_old; ++v) ns[v] = im.status[v];
    for (int r = 0; r < m_old; ++r)
      ns[im.n + m_new + r] = im.status[im.n + m_old + r];
    for (int k = 0; k < m_old; ++k)
      if (im.basic[k] >= im.n + m_old) im.basic[k] += m_new - m_old;
    im.status = std::move(ns);
    std::vector<double> nb(static_cast<std::size_t>(m_new) * m_new, 0.0);
    for (int i = 0; i < m_old; ++i)
      std::copy_n(im.binv.begin() + static_cast<std::size_t>(i) * m_old, m_old,
                  nb.begin() + static_cast<std::size_t>(i) * m_new);
    for (int r = m_old; r < m_new; ++r) {
      im.basic.push_back(im.n + r);
      im.status[im.n + r] = Impl::VStatus::Basic;
      nb[static_cast<std::size_t>(r) * m_new + r] = 1.0;
    }
    im.binv = std::move(nb);
    im.art_coef.resize(m_new, 1.0);
    im.xb.resize(m_new, 0.0);
    im.m = m_new;
    if (old_basis_touches_new_rows && !im.refactor())
      return im.solve_from_cold();
  }
  im.phase = 2;
  im.arts_locked = true;
  // Nonbasic statuses must still make sense under the (possibly changed)
  // bounds; AtUpper with an infinite bound cannot be repaired in place.
  bool statuses_ok = true;
  for (int v = 0; v < im.total() && statuses_ok; ++v)
    if (im.status[v] == Impl::VStatus::AtUpper && im.up(v) == kInf)
      statuses_ok = false;
  if (statuses_ok) {
    im.compute_xb();
    bool feasible = im.basis_feasible();
    if (!feasible && !cols_grew) {
      // Bounds moved under an optimal basis: let the dual simplex walk
      // back to feasibility instead of restarting from artificials.
      feasible = im.run_dual(2000 + 4LL * im.m) == LpStatus::Optimal &&
                 im.basis_feasible();
    }
    if (feasible) {
      LpStatus st = im.optimize_phase2(20000 + 400LL * im.m);
      if (st == LpStatus::Optimal) return im.extract();
      if (st == LpStatus::Unbounded) return status_only(LpStatus::Unbounded);
      if (!im.has_basis) return im.solve_from_cold(); // numerics ate the basis
      return status_only(st);
    }
  }
  // No warm path left (or the dual ran aground); restart clean.
  return im.solve_from_cold();
}

int SimplexSolver::last_iterations() const { return impl_->iterations; }

std::string verify_lp_certificate(const LpProblem& p, const LpSolution& sol,
                                  double tol) {
  if (sol.status != LpStatus::Optimal) return "solution is not optimal";
  const int n = p.n_cols();
  const int m = p.n_rows();
  if (static_cast<int>(sol.x.size()) != n) return "x has the wrong size";
  if (static_cast<int>(sol.duals.size()) != m)
    return "duals have the wrong size";

  auto num = [](double v) { return std::to_string(v); };

  // Primal feasibility.
  for (int j = 0; j < n; ++j) {
    if (sol.x[j] < p.lb[j] - tol || sol.x[j] > p.ub[j] + tol)
      return "column " + std::to_string(j) + " violates its bounds: x=" +
             num(sol.x[j]);
  }
  std::vector<double> act(m, 0.0);
  for (int j = 0; j < n; ++j) {
    if (sol.x[j] == 0.0) continue;
    for (const auto& [r, a] : p.col_entries[j]) act[r] += a * sol.x[j];
  }
  double row_tol = tol * 10.0;
  for (int i = 0; i < m; ++i) {
    double slack = act[i] - p.rhs[i];
    if (p.sense[i] == RowSense::Ge && slack < -row_tol)
      return "row " + std::to_string(i) + " under its rhs by " + num(-slack);
    if (p.sense[i] == RowSense::Le && slack > row_tol)
      return "row " + std::to_string(i) + " over its rhs by " + num(slack);
    if (p.sense[i] == RowSense::Eq && std::abs(slack) > row_tol)
      return "row " + std::to_string(i) + " misses its rhs by " + num(slack);
  }

  // Dual feasibility: row dual signs, then reduced-cost signs against the
  // position of x within its bounds (complementary slackness on columns).
  for (int i = 0; i < m; ++i) {
    if (p.sense[i] == RowSense::Ge && sol.duals[i] < -tol)
      return "dual of >= row " + std::to_string(i) + " is negative";
    if (p.sense[i] == RowSense::Le && sol.duals[i] > tol)
      return "dual of <= row " + std::to_string(i) + " is positive";
  }
  double scale = std::max(1.0, std::abs(sol.objective));
  for (int j = 0; j < n; ++j) {
    double d = p.obj[j];
    for (const auto& [r, a] : p.col_entries[j]) d -= sol.duals[r] * a;
    bool at_lb = sol.x[j] <= p.lb[j] + tol;
    bool at_ub = p.ub[j] != kInf && sol.x[j] >= p.ub[j] - tol;
    double rc_tol = tol * scale;
    if (!at_lb && d > rc_tol)
      return "column " + std::to_string(j) +
             " is above its lower bound with positive reduced cost " + num(d);
    if (!at_ub && d < -rc_tol)
      return "column " + std::to_string(j) +
             " is below its upper bound with negative reduced cost " + num(d);
  }

  // Complementary slackness on rows.
  for (int i = 0; i < m; ++i) {
    double slack = act[i] - p.rhs[i];
    if (std::abs(sol.duals[i]) > tol && std::abs(slack) > row_tol * 10.0 &&
        p.sense[i] != RowSense::Eq)
      return "row " + std::to_string(i) +
             " has nonzero dual but nonzero slack " + num(slack);
  }

  // Strong duality: objectives of the primal and the bounded dual agree.
  double dual_obj = 0.0;
  for (int i = 0; i < m; ++i) dual_obj += sol.duals[i] * p.rhs[i];
  for (int j = 0; j < n; ++j) {
    double d = p.obj[j];
    for (const auto& [r, a] : p.col_entries[j]) d -= sol.duals[r] * a;
    if (d > 0.0 && p.lb[j] != 0.0) dual_obj += d * p.lb[j];
    if (d < 0.0 && p.ub[j] != kInf) dual_obj += d * p.ub[j];
  }
  if (std::abs(dual_obj - sol.objective) > tol * scale * 100.0)
    return "duality gap: primal " + num(sol.objective) + " vs dual " +
           num(dual_obj);
  return "";
}

} // namespace evsp
