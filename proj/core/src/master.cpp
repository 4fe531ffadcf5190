#include "evsp/master.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

namespace evsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntTol = 1e-6;

std::string column_signature(const Column& c) {
  std::ostringstream os;
  os << c.k << '|';
  for (int t : c.trips) os << t << ',';
  os << '|';
  for (int u : c.use_keys) os << u << ',';
  os << '|' << llround(c.cost * 100.0);
  return os.str();
}

// Append one column to the LP with the standard row pattern: coefficient 1
// on every covered trip's covering row and on every used capacity row.
// Capacity rows are created lazily, on the first column that occupies the
// key: a row no pooled column touches can never bind, and keeping the row
// count down is what keeps the master LP fast.
void push_lp_column(RmpState& state, const Column& col) {
  std::vector<std::pair<int, double>> entries;
  for (int t : col.trips) entries.emplace_back(t, 1.0);
  for (int key : col.use_keys) {
    int row = state.gamma_row[key];
    if (row < 0) {
      int blocks_per_station =
          state.n_block_keys / static_cast<int>(state.inst->stations.size());
      int station = key / blocks_per_station;
      row = state.lp.add_row(
          RowSense::Le,
          static_cast<double>(state.inst->stations[station].capacity));
      state.gamma_row[key] = row;
    }
    entries.emplace_back(row, 1.0);
  }
  state.lp.add_column(col.cost, 0.0, kInf, std::move(entries));
}

void refresh_from_solution(RmpState& state, const LpSolution& sol) {
  state.x.assign(state.pool.size(), 0.0);
  for (std::size_t j = 0; j < state.pool.size(); ++j) state.x[j] = sol.x[j];
  state.z_rmp = sol.objective;
  const int n_trips = state.n_trips();
  state.duals.sigma.assign(n_trips, 0.0);
  for (int i = 0; i < n_trips; ++i) state.duals.sigma[i] = sol.duals[i];
  state.duals.gamma.assign(state.n_block_keys, 0.0);
  for (int key = 0; key < state.n_block_keys; ++key) {
    int row = state.gamma_row[key];
    if (row >= 0) state.duals.gamma[key] = sol.duals[row];
  }
  state.dummy_active = false;
  for (std::size_t j = 0; j < state.pool.size(); ++j)
    if (state.pool[j].dummy && state.x[j] > kIntTol) state.dummy_active = true;
}

void solve_and_refresh(RmpState& state, bool fresh) {
  LpSolution sol =
      fresh ? state.solver.solve(state.lp) : state.solver.resolve(state.lp);
  if (sol.status != LpStatus::Optimal) {
    const char* what = sol.status == LpStatus::Infeasible  ? "infeasible"
                       : sol.status == LpStatus::Unbounded ? "unbounded"
                                                           : "iteration limit";
    throw EvspError(std::string("master LP solve failed: ") + what + " (" +
                    std::to_string(state.lp.n_rows()) + " rows, " +
                    std::to_string(state.lp.n_cols()) + " cols)");
  }
  std::string cert = verify_lp_certificate(state.lp, sol, 1e-6);
  if (!cert.empty())
    throw EvspError("master LP optimality certificate failed: " + cert);
  refresh_from_solution(state, sol);
}

// Cheapest one-trip duty for every trip in one network. After trip i the
// bus either heads straight home or runs a charge-block chain to the sink,
// so the continuation costs over pure charging paths are shared by all
// trips and computed once, backwards.
struct SingletonScan {
  struct Best {
    Cents cost = kInf;
    int src_arc = -1;
    int exit_arc = -1; // trip->sink or trip->charge
  };
  std::vector<Best> best;            // per trip
  std::vector<double> cont;          // per node: charge-only cost to sink
  std::vector<int> cont_arc;         // arc taken by cont

  explicit SingletonScan(const Network& net, int n_trips)
      : best(n_trips), cont(net.nodes.size(), kInf),
        cont_arc(net.nodes.size(), -1) {
    if (net.source < 0) return;
    const auto& arcs = net.arcs;
    for (auto it = arcs.rbegin(); it != arcs.rend(); ++it) {
      const Arc& a = *it;
      if (net.nodes[a.from].kind != NodeKind::ChargeNode) continue;
      double via = kInf;
      if (a.to == net.sink)
        via = a.cost;
      else if (net.nodes[a.to].kind == NodeKind::ChargeNode &&
               cont[a.to] < kInf)
        via = a.cost + cont[a.to];
      if (via < cont[a.from]) {
        cont[a.from] = via;
        cont_arc[a.from] = static_cast<int>(it.base() - arcs.begin()) - 1;
      }
    }
    // Source arcs pin each trip's entry node; scan that node's exits.
    for (std::size_t ai = 0; ai < arcs.size(); ++ai) {
      const Arc& a = arcs[ai];
      if (a.from != net.source) continue;
      int trip = net.nodes[a.to].trip;
      for (std::size_t bi = 0; bi < arcs.size(); ++bi) {
        const Arc& b = arcs[bi];
        if (b.from != a.to) continue;
        double total;
        if (b.to == net.sink)
          total = a.cost + b.cost;
        else if (net.nodes[b.to].kind == NodeKind::ChargeNode &&
                 cont[b.to] < kInf)
          total = a.cost + b.cost + cont[b.to];
        else
          continue;
        if (total < best[trip].cost) {
          best[trip].cost = total;
          best[trip].src_arc = static_cast<int>(ai);
          best[trip].exit_arc = static_cast<int>(bi);
        }
      }
    }
  }
};

ColumnLeg leg_of(const Node& n) {
  ColumnLeg leg;
  leg.kind = n.kind;
  leg.trip = n.trip;
  leg.station = n.station;
  leg.block = n.block;
  leg.soc = n.soc;
  return leg;
}

Column singleton_column(const Network& net, int trip,
                        const SingletonScan& scan) {
  const auto& b = scan.best[trip];
  Column col;
  col.k = net.k;
  col.vehicle_type = net.vehicle_type;
  col.depot = net.depot;
  col.cost = b.cost;
  col.trips = {trip};
  const Arc& exit = net.arcs[b.exit_arc];
  col.legs.push_back(leg_of(net.nodes[net.arcs[b.src_arc].to]));
  int at = exit.to;
  int via = b.exit_arc;
  while (at != net.sink) {
    const Node& nd = net.nodes[at];
    col.legs.push_back(leg_of(nd));
    col.use_keys.push_back(net.arcs[via].gamma_idx);
    via = scan.cont_arc[at];
    at = net.arcs[via].to;
  }
  std::sort(col.use_keys.begin(), col.use_keys.end());
  return col;
}

} // namespace

RmpState init_rmp(const Instance& inst, const std::vector<Network>& nets) {
  RmpState state;
  state.inst = &inst;
  if (nets.empty()) throw EvspError("init_rmp needs at least one network");
  const int n_trips = static_cast<int>(inst.trips.size());
  state.n_block_keys =
      static_cast<int>(inst.stations.size()) * nets.front().blocks.count;

  // Covering row per trip; capacity rows appear lazily as columns use them.
  for (int i = 0; i < n_trips; ++i) state.lp.add_row(RowSense::Ge, 1.0);
  state.gamma_row.assign(state.n_block_keys, -1);

  // Cheapest singleton per trip across all networks, plus a dummy column per
  // trip so the LP stays feasible whatever gets fixed or priced later.
  std::vector<SingletonScan> scans;
  scans.reserve(nets.size());
  for (const Network& net : nets) scans.emplace_back(net, n_trips);
  for (int i = 0; i < n_trips; ++i) {
    int best_k = -1;
    for (std::size_t k = 0; k < nets.size(); ++k) {
      if (scans[k].best[i].cost == kInf) continue;
      if (best_k < 0 || scans[k].best[i].cost <
                            scans[static_cast<std::size_t>(best_k)].best[i]
                                .cost - 1e-9)
        best_k = static_cast<int>(k);
    }
    if (best_k >= 0) {
      PooledColumn pc;
      pc.col = singleton_column(nets[best_k], i,
                                scans[static_cast<std::size_t>(best_k)]);
      pc.initial = true;
      state.signatures.insert(column_signature(pc.col));
      push_lp_column(state, pc.col);
      state.pool.push_back(std::move(pc));
    }
    PooledColumn dummy;
    dummy.col.cost = kDummyColumnCost;
    dummy.col.trips = {i};
    dummy.col.is_dummy = true;
    dummy.dummy = true;
    dummy.initial = true;
    push_lp_column(state, dummy.col);
    state.pool.push_back(std::move(dummy));
  }

  solve_and_refresh(state, /*fresh=*/true);
  return state;
}

int add_columns(RmpState& state, const std::vector<PricedColumn>& cols) {
  int added = 0;
  for (const PricedColumn& pc : cols) {
    std::string sig = column_signature(pc.col);
    if (!state.signatures.insert(sig).second) continue;
    PooledColumn pooled;
    pooled.col = pc.col;
    push_lp_column(state, pooled.col);
    state.pool.push_back(std::move(pooled));
    ++added;
  }
  return added;
}

void solve_lp(RmpState& state) { solve_and_refresh(state, /*fresh=*/false); }

namespace {

bool value_is_integral(double v) {
  return std::abs(v - std::round(v)) <= kIntTol;
}

bool solution_integral(const std::vector<double>& x) {
  for (double v : x)
    if (!value_is_integral(v)) return false;
  return true;
}

} // namespace

std::vector<int> fix_columns(RmpState& state, double theta) {
  if (solution_integral(state.x)) return {};

  // Occupancy already committed by fixed columns, per charger block key.
  std::vector<int> fixed_use(state.n_block_keys, 0);
  for (const PooledColumn& pc : state.pool)
    if (pc.fixed)
      for (int key : pc.col.use_keys) ++fixed_use[key];

  const int blocks_per_station =
      state.n_block_keys / static_cast<int>(state.inst->stations.size());
  auto fits = [&](const Column& col) {
    for (int key : col.use_keys) {
      int cap = state.inst->stations[key / blocks_per_station].capacity;
      if (fixed_use[key] + 1 > cap) return false;
    }
    return true;
  };

  auto fixable = [&](std::size_t j) {
    const PooledColumn& pc = state.pool[j];
    return !pc.initial && !pc.dummy && !pc.fixed;
  };

  std::vector<std::size_t> over_theta;
  for (std::size_t j = 0; j < state.pool.size(); ++j)
    if (fixable(j) && state.x[j] > theta) over_theta.push_back(j);
  std::sort(over_theta.begin(), over_theta.end(),
            [&](std::size_t a, std::size_t b) {
              if (state.x[a] != state.x[b]) return state.x[a] > state.x[b];
              return a < b;
            });

  std::vector<int> newly_fixed;
  auto fix = [&](std::size_t j) {
    state.pool[j].fixed = true;
    state.lp.lb[j] = 1.0;
    for (int key : state.pool[j].col.use_keys) ++fixed_use[key];
    newly_fixed.push_back(static_cast<int>(j));
  };

  for (std::size_t j : over_theta) {
    if (fits(state.pool[j].col)) {
      fix(j);
    } else {
      std::cerr << "warning: skipping fix of column " << j
                << " (would exceed a charger block capacity)\n";
    }
  }
  if (!newly_fixed.empty()) return newly_fixed;

  // Nothing cleared theta: fix the largest fractional non-initial column.
  std::size_t arg = state.pool.size();
  for (std::size_t j = 0; j < state.pool.size(); ++j) {
    if (!fixable(j) || state.x[j] <= kIntTol) continue;
    if (!fits(state.pool[j].col)) continue;
    if (arg == state.pool.size() || state.x[j] > state.x[arg]) arg = j;
  }
  if (arg < state.pool.size()) fix(arg);
  return newly_fixed;
}

BipResult solve_bip(RmpState& state, double time_limit_sec) {
  using clock = std::chrono::steady_clock;
  auto deadline =
      clock::now() + std::chrono::duration<double>(time_limit_sec);

  LpProblem lp = state.lp;
  SimplexSolver solver;
  LpSolution root = solver.solve(lp);
  if (root.status != LpStatus::Optimal)
    throw EvspError("BIP root LP did not solve");

  BipResult res;
  res.bound = root.objective;

  double best_obj = kInf;
  std::vector<double> best_x;

  // Depth-first search over bound changes; the x=1 branch is explored first.
  struct Frame {
    int col;
    int next_branch; // 0: try x=1, 1: try x=0, 2: undo and pop
    double old_lb, old_ub;
  };
  std::vector<Frame> stack;
  bool out_of_time = false;
  bool first = true;
  LpSolution sol = root;

  while (true) {
    bool prune = false;
    if (!first) {
      sol = solver.resolve(lp);
      if (sol.status == LpStatus::Infeasible)
        prune = true;
      else if (sol.status != LpStatus::Optimal)
        throw EvspError("BIP node LP did not solve");
    }
    first = false;

    if (!prune && sol.objective >= best_obj - 1e-9) prune = true;
    int frac = -1;
    if (!prune) {
      // Branch on the most fractional value: largest min(f, 1 - f).
      double best_score = kIntTol;
      for (int j = 0; j < static_cast<int>(state.pool.size()); ++j) {
        double f = sol.x[j] - std::floor(sol.x[j]);
        double score = std::min(f, 1.0 - f);
        if (score > best_score + 1e-12) {
          best_score = score;
          frac = j;
        }
      }
      if (frac < 0) {
        // Integral: candidate incumbent.
        if (sol.objective < best_obj - 1e-9) {
          best_obj = sol.objective;
          best_x = sol.x;
        }
        prune = true;
      }
    }

    if (!prune && time_limit_sec >= 0 && clock::now() >= deadline) {
      out_of_time = true;
      prune = true;
    }

    if (!prune) {
      stack.push_back(Frame{frac, 0, lp.lb[frac], lp.ub[frac]});
    }

    // Advance: apply next branch at top of stack, or backtrack.
    bool advanced = false;
    while (!stack.empty() && !advanced) {
      Frame& f = stack.back();
      if (f.next_branch == 0) {
        f.next_branch = 1;
        lp.lb[f.col] = 1.0;
        lp.ub[f.col] = f.old_ub;
        advanced = true;
      } else if (f.next_branch == 1 && !out_of_time) {
        f.next_branch = 2;
        lp.lb[f.col] = f.old_lb;
        lp.ub[f.col] = 0.0;
        advanced = true;
      } else {
        lp.lb[f.col] = f.old_lb;
        lp.ub[f.col] = f.old_ub;
        stack.pop_back();
      }
    }
    if (!advanced) break;
  }

  res.proven_optimal = !out_of_time && best_obj < kInf;
  if (out_of_time || best_obj == kInf) {
    res.bound = root.objective;
  } else {
    res.bound = best_obj;
  }
  if (best_obj < kInf) {
    res.objective = best_obj;
    bool has_dummy = false;
    for (std::size_t j = 0; j < state.pool.size(); ++j) {
      if (best_x[j] > 0.5) {
        res.selected.push_back(static_cast<int>(j));
        if (state.pool[j].dummy) has_dummy = true;
      }
    }
    res.feasible = !has_dummy;
  }
  return res;
}

} // namespace evsp
