#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evsp/master.hpp"

namespace evsp {

struct ColgenParams {
  double zmin_percent = 0.01; // truncation threshold, percent over the window
  int iters_window = 30;      // window length I for the truncation test
  bool truncate = false;
  double eps_rc = 1e-6;
  ColumnsPerIter columns_per_iter = ColumnsPerIter::PerNetwork;
  int threads = 1;
  double time_cap_sec = 0.0; // 0 = no cap
};

struct ColgenIter {
  int iter = 0;
  Cents z_rmp = 0.0;
  double best_rc = 0.0;
  std::optional<Cents> lagrangian_lb; // absent while a dummy is basic
  double pricing_sec = 0.0;
  double lp_sec = 0.0;
  int cols_added = 0;
};

struct ColgenLog {
  std::vector<ColgenIter> iters;
  double total_sec = 0.0;
};

enum class ColgenStatus { Optimal, Truncated };

struct ColgenResult {
  ColgenStatus status = ColgenStatus::Optimal;
  ColgenLog log;
  std::optional<Cents> best_lagrangian_lb;
};

// z_rmp plus kappa times the most negative reduced cost, where kappa bounds
// how many columns an optimal solution can use. Valid for any kappa >=
// z / min_k invest_k because every column price includes its pull-out cost.
Cents lagrangian_lb(Cents z_rmp, double best_rc, double kappa);

// Full column generation loop on an existing master: price, add, re-solve,
// until no column prices out (Optimal) or, with truncate set, until the
// relative progress of z_rmp over the last iters_window iterations drops
// below zmin_percent (Truncated). A time cap also reports Truncated.
ColgenResult run_colgen(RmpState& state, const std::vector<Network>& nets,
                        const ColgenParams& params);

std::string colgen_log_csv(const ColgenLog& log);

} // namespace evsp
