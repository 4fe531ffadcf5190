#include "evsp/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

#include "evsp/master.hpp"
#include "evsp/network.hpp"

namespace evsp {

namespace {

constexpr double kEps = 1e-9;

// ---------------------------------------------------------------------------
// Duty enumeration on the built networks: depth-first over all source-sink
// paths. Feasibility is entirely encoded in the arcs, so this stays simple.

bool enumerate_network_paths(const std::vector<Network>& nets,
                             const OracleCaps& caps, std::int64_t& steps,
                             std::vector<Column>& out) {
  for (const Network& net : nets) {
    if (net.source < 0 || net.sink < 0) continue;
    const int n = static_cast<int>(net.nodes.size());
    // Arcs are sorted by tail; first[v] .. first[v+1] is v's out range.
    std::vector<std::int32_t> first(static_cast<std::size_t>(n) + 1, 0);
    for (const Arc& a : net.arcs) ++first[static_cast<std::size_t>(a.from) + 1];
    for (int v = 0; v < n; ++v) first[static_cast<std::size_t>(v) + 1] +=
        first[static_cast<std::size_t>(v)];

    std::vector<std::pair<std::int32_t, std::int32_t>> stack; // node, offset
    std::vector<std::int32_t> path; // arc indices from source to stack top
    stack.push_back({net.source, 0});
    while (!stack.empty()) {
      auto& [v, off] = stack.back();
      std::int32_t ai = first[static_cast<std::size_t>(v)] + off;
      if (ai >= first[static_cast<std::size_t>(v) + 1]) {
        stack.pop_back();
        if (!path.empty()) path.pop_back();
        continue;
      }
      ++off;
      if (++steps > caps.max_steps) return false;
      const Arc& a = net.arcs[ai];
      path.push_back(ai);
      if (a.to == net.sink) {
        Column col;
        col.k = net.k;
        col.vehicle_type = net.vehicle_type;
        col.depot = net.depot;
        for (std::int32_t pi : path) {
          const Arc& pa = net.arcs[pi];
          col.cost += pa.cost;
          const Node& head = net.nodes[pa.to];
          if (head.kind == NodeKind::TripNode) {
            col.trips.push_back(head.trip);
            col.legs.push_back(
                {NodeKind::TripNode, head.trip, -1, -1, head.soc});
          } else if (head.kind == NodeKind::ChargeNode) {
            col.use_keys.push_back(pa.gamma_idx);
            col.legs.push_back({NodeKind::ChargeNode, -1, head.station,
                                head.block, head.soc});
          }
        }
        std::sort(col.trips.begin(), col.trips.end());
        std::sort(col.use_keys.begin(), col.use_keys.end());
        out.push_back(std::move(col));
        path.pop_back();
      } else {
        stack.push_back({a.to, 0});
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Duty enumeration with exact SoC: the same movement rules as the networks,
// but nothing is ever rounded and charging gains use the true level. This is
// the yardstick the discretized solver is compared against.

struct ContEnum {
  const Instance& inst;
  const SocGrid& grid;
  const TimeBlocks& blocks;
  const OracleCaps& caps;
  std::int64_t& steps;
  std::vector<Column>& out;
  bool over = false;

  int k = -1;
  const VehicleType* vt = nullptr;
  int depot_loc = -1;
  double rate = 0.0; // charging, tenths per minute
  Column cur{};

  bool tick() {
    if (++steps > caps.max_steps) over = true;
    return !over;
  }

  double full() const { return static_cast<double>(grid.s_full); }
  double floor_soc() const { return static_cast<double>(grid.s_min); }

  void emit() {
    Column col = cur;
    std::sort(col.trips.begin(), col.trips.end());
    std::sort(col.use_keys.begin(), col.use_keys.end());
    out.push_back(std::move(col));
  }

  // soc_enter is the exact SoC when the trip begins.
  void enter_trip(int j, double soc_enter, Cents move_cost) {
    if (over) return;
    const Trip& t = inst.trips[static_cast<std::size_t>(j)];
    double f = tau_soc(*vt, t.distance_km, 0);
    if (soc_enter - f < floor_soc() - kEps) return;
    cur.legs.push_back({NodeKind::TripNode, j, -1, -1,
                        static_cast<SocTenths>(std::llround(soc_enter))});
    cur.trips.push_back(j);
    Cents added = move_cost + vt->op_cost_per_km * t.distance_km +
                  inst.costs.crew_cost_per_min * t.duration();
    cur.cost += added;
    after_trip(j, soc_enter - f);
    cur.cost -= added;
    cur.trips.pop_back();
    cur.legs.pop_back();
  }

  void enter_charge(int r, int b, double soc_enter, Cents move_cost,
                    bool new_run) {
    if (over) return;
    if (soc_enter < floor_soc() - kEps) return;
    if (soc_enter > full() - kEps) return; // nothing to gain
    double gain = std::min(rate * blocks.length, full() - soc_enter);
    double kwh = gain * vt->battery_kwh / 1000.0;
    Cents added = move_cost + inst.costs.energy_cost_per_kwh * kwh +
                  (new_run ? inst.costs.charge_start_penalty : 0.0);
    cur.legs.push_back({NodeKind::ChargeNode, -1, r, b,
                        static_cast<SocTenths>(std::llround(soc_enter))});
    cur.use_keys.push_back(r * blocks.count + b);
    cur.cost += added;
    after_charge(r, b, soc_enter, soc_enter + gain);
    cur.cost -= added;
    cur.use_keys.pop_back();
    cur.legs.pop_back();
  }

  void try_moves(Minute free_at, int loc, double soc) {
    // Continue with another trip.
    for (const Trip& t : inst.trips) {
      if (!tick()) return;
      Minute dh = inst.deadhead.minutes(loc, t.origin);
      if (dh > inst.costs.max_deadhead_min) continue;
      Minute idle = t.begin_time - free_at - dh;
      if (idle < 0 || idle > inst.costs.max_idle_trip_min) continue;
      double dh_km = inst.deadhead.km(loc, t.origin);
      Cents move = vt->op_cost_per_km * dh_km +
                   inst.costs.crew_cost_per_min * (dh + idle);
      enter_trip(t.id, soc - tau_soc(*vt, dh_km, idle), move);
      if (over) return;
    }
    // Or drive to a charger. Every reachable block within the idle allowance
    // is a distinct choice.
    for (const ChargingStation& st : inst.stations) {
      Minute dh = inst.deadhead.minutes(loc, st.location);
      if (dh > inst.costs.max_deadhead_min) continue;
      double dh_km = inst.deadhead.km(loc, st.location);
      Minute arrive = free_at + dh;
      for (int b = 0; b < blocks.count; ++b) {
        Minute idle = blocks.block_start(b) - arrive;
        if (idle < 0) continue;
        if (idle > inst.costs.max_idle_charge_min) break;
        if (!tick()) return;
        Cents move = vt->op_cost_per_km * dh_km +
                     inst.costs.crew_cost_per_min * (dh + idle);
        enter_charge(st.id, b, soc - tau_soc(*vt, dh_km, idle), move, true);
        if (over) return;
      }
    }
  }

  void after_trip(int i, double soc) {
    if (over) return;
    const Trip& t = inst.trips[static_cast<std::size_t>(i)];
    // Pull in whenever the battery allows it.
    {
      Minute dh = inst.deadhead.minutes(t.destination, depot_loc);
      double dh_km = inst.deadhead.km(t.destination, depot_loc);
      if (dh <= inst.costs.max_deadhead_min &&
          soc - tau_soc(*vt, dh_km, 0) >= floor_soc() - kEps) {
        Cents move = vt->op_cost_per_km * dh_km +
                     inst.costs.crew_cost_per_min * dh;
        cur.cost += move;
        emit();
        cur.cost -= move;
      }
    }
    try_moves(t.end_time, t.destination, soc);
  }

  void after_charge(int r, int b, double soc_before, double soc_after) {
    if (over) return;
    const int loc = inst.stations[static_cast<std::size_t>(r)].location;
    // Pull in, but only when this last block was actually needed to get
    // home; pointless trailing charging is not part of the duty family.
    {
      Minute dh = inst.deadhead.minutes(loc, depot_loc);
      double dh_km = inst.deadhead.km(loc, depot_loc);
      double need = tau_soc(*vt, dh_km, 0) + floor_soc();
      if (dh <= inst.costs.max_deadhead_min && soc_before < need - kEps &&
          soc_after >= need - kEps) {
        Cents move = vt->op_cost_per_km * dh_km +
                     inst.costs.crew_cost_per_min * dh;
        cur.cost += move;
        emit();
        cur.cost -= move;
      }
    }
    // Stay plugged in for the next block while there is room to gain.
    if (b + 1 < blocks.count && soc_after < full() - kEps) {
      if (!tick()) return;
      enter_charge(r, b + 1, soc_after, 0.0, false);
      if (over) return;
    }
    // Leave for a trip; idling after a charger uses the short allowance.
    for (const Trip& t : inst.trips) {
      if (!tick()) return;
      Minute dh = inst.deadhead.minutes(loc, t.origin);
      if (dh > inst.costs.max_deadhead_min) continue;
      Minute idle = t.begin_time - blocks.block_end(b) - dh;
      if (idle < 0 || idle > inst.costs.max_idle_charge_min) continue;
      double dh_km = inst.deadhead.km(loc, t.origin);
      Cents move = vt->op_cost_per_km * dh_km +
                   inst.costs.crew_cost_per_min * (dh + idle);
      enter_trip(t.id, soc_after - tau_soc(*vt, dh_km, idle), move);
      if (over) return;
    }
  }

  void run() {
    int next_k = 0;
    for (std::size_t d = 0; d < inst.depots.size(); ++d)
      for (int v : inst.depots[d].vehicle_types) {
        k = next_k++;
        vt = &inst.vehicle_types[static_cast<std::size_t>(v)];
        depot_loc = inst.depots[d].location;
        rate = vt->charge_kwh_per_min * 1000.0 / vt->battery_kwh;
        cur = Column{};
        cur.k = k;
        cur.vehicle_type = v;
        cur.depot = static_cast<int>(d);
        cur.cost = vt->invest_cost;
        for (const Trip& t : inst.trips) {
          if (!tick()) return;
          Minute dh = inst.deadhead.minutes(depot_loc, t.origin);
          if (dh > inst.costs.max_deadhead_min) continue;
          double dh_km = inst.deadhead.km(depot_loc, t.origin);
          // Pull-outs leave just in time, so no idle is ever paid here.
          Cents pull_out = vt->op_cost_per_km * dh_km +
                           inst.costs.crew_cost_per_min * dh;
          enter_trip(t.id, full() - tau_soc(*vt, dh_km, 0), pull_out);
          if (over) return;
        }
      }
  }
};

// ---------------------------------------------------------------------------
// Exact covering solve over an explicit column set.

std::vector<Column> dedupe_cheapest(std::vector<Column> cols) {
  std::map<std::pair<std::vector<int>, std::vector<int>>, std::size_t> best;
  std::vector<Column> out;
  for (Column& c : cols) {
    auto key = std::make_pair(c.trips, c.use_keys);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(std::move(key), out.size());
      out.push_back(std::move(c));
    } else if (c.cost < out[it->second].cost - kEps) {
      out[it->second] = std::move(c);
    }
  }
  return out;
}

struct CoverIp {
  const Instance& inst;
  const TimeBlocks& blocks;
  const std::vector<Column>& cols;
  const OracleCaps& caps;
  std::int64_t& steps;

  int n_trips = 0;
  std::vector<unsigned> masks;           // trip bitmask per column
  std::vector<double> dp;                // capacity-free cover cost per mask
  std::vector<int> dp_pick;              // column realizing the dp step
  std::vector<std::vector<int>> by_trip; // columns covering each trip
  bool over = false;

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> chosen;
  std::vector<int> best_set;

  explicit CoverIp(const Instance& i, const TimeBlocks& bl,
                   const std::vector<Column>& c, const OracleCaps& cp,
                   std::int64_t& st)
      : inst(i), blocks(bl), cols(c), caps(cp), steps(st) {
    n_trips = static_cast<int>(inst.trips.size());
    masks.reserve(cols.size());
    by_trip.assign(static_cast<std::size_t>(n_trips), {});
    for (std::size_t j = 0; j < cols.size(); ++j) {
      unsigned m = 0;
      for (int t : cols[j].trips) m |= 1u << t;
      masks.push_back(m);
      for (int t : cols[j].trips)
        by_trip[static_cast<std::size_t>(t)].push_back(static_cast<int>(j));
    }
    // Cheapest column per trip first, deterministically.
    for (auto& list : by_trip)
      std::sort(list.begin(), list.end(), [&](int a, int b) {
        if (cols[a].cost != cols[b].cost) return cols[a].cost < cols[b].cost;
        return a < b;
      });
    build_dp();
  }

  // Minimum cost to cover every trip in `need`, ignoring charger capacity:
  // a valid relaxation used both as a candidate solution and as a bound.
  void build_dp() {
    const unsigned full = (1u << n_trips) - 1u;
    dp.assign(full + 1, std::numeric_limits<double>::infinity());
    dp_pick.assign(full + 1, -1);
    dp[0] = 0.0;
    for (unsigned need = 1; need <= full; ++need) {
      int t = std::countr_zero(need);
      for (int j : by_trip[static_cast<std::size_t>(t)]) {
        double c = dp[need & ~masks[static_cast<std::size_t>(j)]] +
                   cols[static_cast<std::size_t>(j)].cost;
        if (c < dp[need] - kEps) {
          dp[need] = c;
          dp_pick[need] = j;
        }
      }
    }
  }

  bool capacity_ok(const std::vector<int>& picks) const {
    std::map<int, int> use;
    for (int j : picks)
      for (int key : cols[static_cast<std::size_t>(j)].use_keys) ++use[key];
    for (const auto& [key, cnt] : use) {
      int station = key / blocks.count;
      if (cnt > inst.stations[static_cast<std::size_t>(station)].capacity)
        return false;
    }
    return true;
  }

  void dfs(unsigned uncovered, double cost, std::vector<int>& use) {
    if (over) return;
    if (++steps > caps.max_steps) {
      over = true;
      return;
    }
    if (cost + dp[uncovered] >= best - 1e-9) return;
    if (uncovered == 0) {
      best = cost;
      best_set = chosen;
      return;
    }
    int t = std::countr_zero(uncovered);
    for (int j : by_trip[static_cast<std::size_t>(t)]) {
      const Column& col = cols[static_cast<std::size_t>(j)];
      bool fits = true;
      for (int key : col.use_keys) {
        int station = key / blocks.count;
        if (use[static_cast<std::size_t>(key)] + 1 >
            inst.stations[static_cast<std::size_t>(station)].capacity) {
          fits = false;
          break;
        }
      }
      if (!fits) continue;
      for (int key : col.use_keys) ++use[static_cast<std::size_t>(key)];
      chosen.push_back(j);
      dfs(uncovered & ~masks[static_cast<std::size_t>(j)], cost + col.cost,
          use);
      chosen.pop_back();
      for (int key : col.use_keys) --use[static_cast<std::size_t>(key)];
      if (over) return;
    }
  }

  // Returns true with the optimum in `best`, false when refused.
  bool solve(std::string& why) {
    const unsigned full = (1u << n_trips) - 1u;
    if (dp[full] == std::numeric_limits<double>::infinity()) {
      why = "no duty set covers every trip";
      return false;
    }
    // The capacity-free optimum often satisfies capacity outright.
    std::vector<int> picks;
    unsigned need = full;
    while (need != 0) {
      int j = dp_pick[need];
      picks.push_back(j);
      need &= ~masks[static_cast<std::size_t>(j)];
    }
    if (capacity_ok(picks)) {
      best = dp[full];
      best_set = picks;
      return true;
    }
    int n_keys = static_cast<int>(inst.stations.size()) * blocks.count;
    std::vector<int> use(static_cast<std::size_t>(n_keys), 0);
    dfs(full, 0.0, use);
    if (over) {
      why = "integer search exceeded the step budget";
      return false;
    }
    if (best == std::numeric_limits<double>::infinity()) {
      why = "no duty set satisfies the charger capacities";
      return false;
    }
    return true;
  }
};

bool solve_cover_lp(const Instance& inst, const TimeBlocks& blocks,
                    const std::vector<Column>& cols, Cents& value,
                    std::string& why) {
  LpProblem p;
  for (std::size_t t = 0; t < inst.trips.size(); ++t) p.add_row(RowSense::Ge, 1.0);
  std::map<int, int> key_row;
  for (const Column& c : cols)
    for (int key : c.use_keys)
      if (!key_row.count(key)) key_row[key] = 0;
  for (auto& [key, row] : key_row) {
    int station = key / blocks.count;
    row = p.add_row(
        RowSense::Le,
        inst.stations[static_cast<std::size_t>(station)].capacity);
  }
  for (const Column& c : cols) {
    std::vector<std::pair<int, double>> entries;
    for (int t : c.trips) entries.push_back({t, 1.0});
    for (int key : c.use_keys) entries.push_back({key_row[key], 1.0});
    p.add_column(c.cost, 0.0, std::numeric_limits<double>::infinity(),
                 std::move(entries));
  }
  SimplexSolver solver;
  LpSolution sol = solver.solve(p);
  if (sol.status != LpStatus::Optimal) {
    why = sol.status == LpStatus::Infeasible
              ? "covering LP is infeasible"
              : "covering LP did not converge";
    return false;
  }
  std::string cert = verify_lp_certificate(p, sol, 1e-6);
  if (!cert.empty()) throw EvspError("oracle LP certificate failed: " + cert);
  value = sol.objective;
  return true;
}

} // namespace

LowerBoundResult true_lower_bound(const Instance& inst, const SocGrid& grid,
                                  const TimeBlocks& blocks,
                                  const ColgenParams& params) {
  std::vector<Network> nets =
      build_all_networks(inst, grid, blocks, RoundingMode::Optimistic);
  RmpState state = init_rmp(inst, nets);
  ColgenParams run = params;
  run.truncate = false; // the bound needs the relaxation solved to the end
  ColgenResult cg = run_colgen(state, nets, run);

  LowerBoundResult res;
  res.log = std::move(cg.log);
  if (cg.status == ColgenStatus::Optimal) {
    if (state.dummy_active)
      throw EvspError(
          "lower bound: some trip cannot be covered by any duty");
    res.value = state.z_rmp;
    res.truncated = false;
  } else {
    res.truncated = true;
    res.value = cg.best_lagrangian_lb.value_or(0.0);
  }
  return res;
}

double gap(Cents solution, Cents lower_bound) {
  if (lower_bound <= 0)
    throw EvspError("gap undefined: lower bound must be positive");
  return 100.0 * (solution - lower_bound) / lower_bound;
}

OracleResult oracle_solve(const Instance& inst, OracleMode mode,
                          const SocGrid& grid, const TimeBlocks& blocks,
                          RoundingMode rounding, const OracleCaps& caps) {
  OracleResult res;
  if (static_cast<int>(inst.trips.size()) > caps.max_trips) {
    res.refused = true;
    res.refusal_reason =
        "instance has " + std::to_string(inst.trips.size()) +
        " trips, above the exhaustive cap of " + std::to_string(caps.max_trips);
    return res;
  }

  std::int64_t steps = 0;
  std::vector<Column> cols;
  if (mode == OracleMode::NetworkPaths) {
    std::vector<Network> nets = build_all_networks(inst, grid, blocks, rounding);
    if (!enumerate_network_paths(nets, caps, steps, cols)) {
      res.refused = true;
      res.refusal_reason = "path enumeration exceeded the step budget";
      return res;
    }
  } else {
    ContEnum en{inst, grid, blocks, caps, steps, cols};
    en.run();
    if (en.over) {
      res.refused = true;
      res.refusal_reason = "duty enumeration exceeded the step budget";
      return res;
    }
  }

  cols = dedupe_cheapest(std::move(cols));
  res.n_columns = static_cast<std::int64_t>(cols.size());

  std::string why;
  if (!solve_cover_lp(inst, blocks, cols, res.lp_value, why)) {
    res.refused = true;
    res.refusal_reason = why;
    return res;
  }
  CoverIp ip(inst, blocks, cols, caps, steps);
  if (!ip.solve(why)) {
    res.refused = true;
    res.refusal_reason = why;
    return res;
  }
  res.ip_value = ip.best;
  res.columns = std::move(cols);
  return res;
}

} // namespace evsp
