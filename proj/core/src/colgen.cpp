#include "evsp/colgen.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <limits>
#include <sstream>

#include "evsp/common.hpp"

namespace evsp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

} // namespace

Cents lagrangian_lb(Cents z_rmp, double best_rc, double kappa) {
  return z_rmp + kappa * best_rc;
}

ColgenResult run_colgen(RmpState& state, const std::vector<Network>& nets,
                        const ColgenParams& params) {
  ColgenResult result;
  result.status = ColgenStatus::Optimal;
  const auto t0 = std::chrono::steady_clock::now();

  Cents min_invest = std::numeric_limits<Cents>::infinity();
  for (const Network& net : nets) {
    if (net.source < 0) continue;
    min_invest = std::min(
        min_invest, state.inst->vehicle_types[net.vehicle_type].invest_cost);
  }

  PricingOptions popts{params.columns_per_iter, params.threads};
  const double zmin_frac = params.zmin_percent / 100.0;

  for (int iter = 0;; ++iter) {
    ColgenIter row;
    row.iter = iter;
    row.z_rmp = state.z_rmp;

    const auto tp0 = std::chrono::steady_clock::now();
    std::vector<PricedColumn> priced =
        price_all(nets, state.duals, params.eps_rc, popts);
    row.pricing_sec = seconds_since(tp0);

    double best_rc = 0.0;
    for (const PricedColumn& pc : priced)
      best_rc = std::min(best_rc, pc.reduced_cost);
    row.best_rc = best_rc;

    // The Lagrangian bound pairs this LP value with the pricing round run on
    // its duals. It is only meaningful once the artificial columns left the
    // basis, because their huge cost would inflate both z and kappa.
    if (!state.dummy_active && min_invest > 0 &&
        min_invest < std::numeric_limits<Cents>::infinity()) {
      double kappa = state.z_rmp / min_invest;
      Cents lb = lagrangian_lb(state.z_rmp, best_rc, kappa);
      row.lagrangian_lb = lb;
      if (!result.best_lagrangian_lb || lb > *result.best_lagrangian_lb)
        result.best_lagrangian_lb = lb;
    }

    if (priced.empty()) {
      row.cols_added = 0;
      result.log.iters.push_back(row);
      result.status = ColgenStatus::Optimal;
      break;
    }

    int added = add_columns(state, priced);
    row.cols_added = added;
    if (added == 0) {
      // Every priced column was already in the pool; the LP cannot move.
      // Treat as converged rather than looping forever.
      std::cerr << "colgen: pricing returned only duplicate columns; "
                   "stopping at z = "
                << state.z_rmp << "\n";
      result.log.iters.push_back(row);
      result.status = ColgenStatus::Optimal;
      break;
    }

    const auto tl0 = std::chrono::steady_clock::now();
    solve_lp(state);
    row.lp_sec = seconds_since(tl0);
    result.log.iters.push_back(row);

    if (params.truncate && iter + 1 >= params.iters_window) {
      // Objective values form the series z_0 (initial pool), z_1, ... where
      // row j records z_j. The newest value lives in state.z_rmp.
      double z_old =
          result.log.iters[static_cast<std::size_t>(iter + 1 -
                                                     params.iters_window)]
              .z_rmp;
      double z_new = state.z_rmp;
      if (z_old > 0 && (z_old - z_new) / z_old < zmin_frac) {
        result.status = ColgenStatus::Truncated;
        break;
      }
    }
    if (params.time_cap_sec > 0 && seconds_since(t0) > params.time_cap_sec) {
      result.status = ColgenStatus::Truncated;
      break;
    }
  }

  result.log.total_sec = seconds_since(t0);
  return result;
}

std::string colgen_log_csv(const ColgenLog& log) {
  std::ostringstream os;
  os.setf(std::ios::fmtflags(0), std::ios::floatfield);
  os.precision(10);
  os << "iter,z_rmp,best_rc,lagrangian_lb,pricing_sec,lp_sec,cols_added\n";
  for (const ColgenIter& it : log.iters) {
    os << it.iter << ',' << it.z_rmp << ',' << it.best_rc << ',';
    if (it.lagrangian_lb) os << *it.lagrangian_lb;
    os << ',' << it.pricing_sec << ',' << it.lp_sec << ',' << it.cols_added
       << '\n';
  }
  return os.str();
}

} // namespace evsp
