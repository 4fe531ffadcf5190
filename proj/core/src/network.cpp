#include "evsp/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evsp {

namespace {
// Continuous SoC values carry float noise from the kWh arithmetic; all
// threshold comparisons get this much slack.
constexpr double kEps = 1e-9;
} // namespace

double tau_soc(const VehicleType& vt, double km, Minute idle_min) {
  double kwh = km * vt.consumption_kwh_per_km + idle_min * vt.idle_kwh_per_min;
  return 1000.0 * kwh / vt.battery_kwh;
}

namespace {

// Everything needed while wiring up one network; indices into `nodes` are
// pre-prune and get remapped at the end.
struct Builder {
  const Instance& inst;
  const SocGrid& grid;
  const TimeBlocks& blocks;
  RoundingMode mode;
  const VehicleType& vt;
  int depot_loc;

  std::vector<Node> nodes;
  std::vector<Arc> arcs;
  NetworkStats stats;

  // node index lookup: trip_idx[trip][rank in grid.values], -1 if absent;
  // charge_idx[(station*blocks+block)*n_soc + rank] for ranks below s_full.
  std::vector<std::vector<int>> trip_idx;
  std::vector<int> charge_idx;
  int n_charge_soc = 0;

  std::vector<double> trip_f; // SoC use of each trip for this vehicle type

  double rate_tenths_per_min() const {
    return 1000.0 * vt.charge_kwh_per_min / vt.battery_kwh;
  }

  // Gain of one full block starting from SoC s, capped at a full battery.
  double block_gain(SocTenths s) const {
    return std::min(rate_tenths_per_min() * blocks.length,
                    static_cast<double>(grid.s_full - s));
  }

  Minute dh_min(int a, int b) const { return inst.deadhead.minutes(a, b); }
  double dh_km(int a, int b) const { return inst.deadhead.km(a, b); }

  // Base cost every movement pays: driving the deadhead plus crew for the
  // wheel-and-wait time. Charging dwell is deliberately not crew time.
  Cents move_cost(double km, Minute dh, Minute idle) const {
    return vt.op_cost_per_km * km +
           inst.costs.crew_cost_per_min * (dh + idle);
  }

  Cents trip_cost(int trip) const {
    const Trip& t = inst.trips[trip];
    return vt.op_cost_per_km * t.distance_km +
           inst.costs.crew_cost_per_min * t.duration();
  }

  // Price of the energy bought when a bus enters a charging block at SoC s.
  Cents charge_cost(SocTenths s) const {
    double kwh = block_gain(s) / 1000.0 * vt.battery_kwh;
    return inst.costs.energy_cost_per_kwh * kwh;
  }

  void build_nodes() {
    nodes.push_back(Node{NodeKind::Source, -1, -1, -1, grid.s_full,
                         blocks.start - 1});
    trip_f.resize(inst.trips.size());
    trip_idx.assign(inst.trips.size(), {});
    const int n_soc = static_cast<int>(grid.values.size());
    for (std::size_t i = 0; i < inst.trips.size(); ++i) {
      trip_f[i] = tau_soc(vt, inst.trips[i].distance_km, 0);
      trip_idx[i].assign(n_soc, -1);
      for (int r = 0; r < n_soc; ++r) {
        SocTenths s = grid.values[r];
        // A bus may start the trip only if it stays above the floor after.
        if (s + kEps < grid.s_min + trip_f[i]) continue;
        trip_idx[i][r] = static_cast<int>(nodes.size());
        nodes.push_back(Node{NodeKind::TripNode, static_cast<int>(i), -1, -1,
                             s, inst.trips[i].begin_time});
      }
    }
    // Conservative charging nodes stop below full: a block only counts as
    // charging while it gains energy, so a full bus has no business holding
    // the plug. The optimistic side does keep full-SoC nodes: rounding up
    // may declare a bus full that really is not, and dropping those nodes
    // would cut routes the relaxation is required to keep.
    n_charge_soc = mode == RoundingMode::Optimistic ? n_soc : n_soc - 1;
    charge_idx.assign(static_cast<std::size_t>(inst.stations.size()) *
                          blocks.count * n_charge_soc,
                      -1);
    for (std::size_t r = 0; r < inst.stations.size(); ++r)
      for (int b = 0; b < blocks.count; ++b)
        for (int rank = 0; rank < n_charge_soc; ++rank) {
          std::size_t key =
              (r * blocks.count + b) * static_cast<std::size_t>(n_charge_soc) +
              rank;
          charge_idx[key] = static_cast<int>(nodes.size());
          nodes.push_back(Node{NodeKind::ChargeNode, -1, static_cast<int>(r),
                               b, grid.values[rank], blocks.block_start(b)});
        }
    nodes.push_back(Node{NodeKind::Sink, -1, -1, -1, 0,
                         blocks.start + blocks.count * blocks.length + 1});
  }

  int charge_node(int station, int block, SocTenths s) const {
    auto it = std::lower_bound(grid.values.begin(), grid.values.end(), s);
    if (it == grid.values.end() || *it != s) return -1;
    int rank = static_cast<int>(it - grid.values.begin());
    if (rank >= n_charge_soc) return -1; // no conservative full-SoC nodes
    return charge_idx[(static_cast<std::size_t>(station) * blocks.count +
                       block) *
                          n_charge_soc +
                      rank];
  }

  int trip_node(int trip, SocTenths s) const {
    auto it = std::lower_bound(grid.values.begin(), grid.values.end(), s);
    if (it == grid.values.end() || *it != s) return -1;
    return trip_idx[trip][it - grid.values.begin()];
  }

  void add_arc(int from, int to, Cents cost, int sigma, int gamma,
               std::int64_t NetworkStats::*family) {
    arcs.push_back(Arc{from, to, cost, sigma, gamma});
    stats.*family += 1;
  }

  void build_source_arcs() {
    // Buses pull out full; they time departure to arrive exactly at the
    // trip, so no idling happens here.
    for (std::size_t i = 0; i < inst.trips.size(); ++i) {
      const Trip& t = inst.trips[i];
      Minute dh = dh_min(depot_loc, t.origin);
      if (dh > inst.costs.max_deadhead_min) continue;
      double km = dh_km(depot_loc, t.origin);
      auto s = round_soc(grid, mode, grid.s_full - tau_soc(vt, km, 0));
      if (!s) continue;
      int head = trip_node(static_cast<int>(i), *s);
      if (head < 0) continue;
      Cents c = vt.invest_cost + move_cost(km, dh, 0) +
                trip_cost(static_cast<int>(i));
      add_arc(0, head, c, static_cast<int>(i), -1,
              &NetworkStats::source_to_trip);
    }
  }

  void build_trip_arcs(int sink) {
    const double rate = rate_tenths_per_min();
    for (std::size_t i = 0; i < inst.trips.size(); ++i) {
      const Trip& ti = inst.trips[i];
      Minute back_dh = dh_min(ti.destination, depot_loc);
      double back_km = dh_km(ti.destination, depot_loc);
      bool can_return = back_dh <= inst.costs.max_deadhead_min;
      double back_tau = tau_soc(vt, back_km, 0);

      for (int rank = 0; rank < static_cast<int>(grid.values.size()); ++rank) {
        int tail = trip_idx[i][rank];
        if (tail < 0) continue;
        SocTenths s = grid.values[rank];

        if (can_return &&
            s + kEps >= trip_f[i] + back_tau + grid.s_min) {
          add_arc(tail, sink, move_cost(back_km, back_dh, 0), -1, -1,
                  &NetworkStats::trip_to_sink);
        }

        // Successor trips.
        for (std::size_t j = 0; j < inst.trips.size(); ++j) {
          const Trip& tj = inst.trips[j];
          Minute dh = dh_min(ti.destination, tj.origin);
          if (dh > inst.costs.max_deadhead_min) continue;
          Minute idle = tj.begin_time - ti.end_time - dh;
          if (idle < 0 || idle > inst.costs.max_idle_trip_min) continue;
          double km = dh_km(ti.destination, tj.origin);
          auto s2 = round_soc(grid, mode,
                              s - trip_f[i] - tau_soc(vt, km, idle));
          if (!s2) continue;
          int head = trip_node(static_cast<int>(j), *s2);
          if (head < 0) continue;
          Cents c = move_cost(km, dh, idle) + trip_cost(static_cast<int>(j));
          add_arc(tail, head, c, static_cast<int>(j), -1,
                  &NetworkStats::trip_to_trip);
        }

        // Charging stations: plug in at the first block boundary after
        // arrival. The optimistic network also lets the bus charge through
        // the fraction of the preceding block it arrived in, for free.
        for (std::size_t r = 0; r < inst.stations.size(); ++r) {
          int st_loc = inst.stations[r].location;
          Minute dh = dh_min(ti.destination, st_loc);
          if (dh > inst.costs.max_deadhead_min) continue;
          double km = dh_km(ti.destination, st_loc);
          Minute arrive = ti.end_time + dh;
          for (int b = 0; b < blocks.count; ++b) {
            Minute idle = blocks.block_start(b) - arrive;
            if (idle < 0) continue;
            if (idle > inst.costs.max_idle_charge_min) break;
            double raw = s - trip_f[i] - tau_soc(vt, km, idle);
            if (mode == RoundingMode::Optimistic && idle < blocks.length) {
              double bonus = rate * idle;
              raw = std::min(raw + bonus,
                             static_cast<double>(grid.s_full));
            }
            auto s2 = round_soc(grid, mode, raw);
            if (!s2) continue;
            int head = charge_node(static_cast<int>(r), b, *s2);
            if (head < 0) continue;
            Cents c = move_cost(km, dh, idle) + charge_cost(*s2) +
                      inst.costs.charge_start_penalty;
            add_arc(tail, head, c, -1,
                    static_cast<int>(r) * blocks.count + b,
                    &NetworkStats::trip_to_charge);
          }
        }
      }
    }
  }

  void build_charge_arcs(int sink) {
    const double rate = rate_tenths_per_min();
    for (std::size_t r = 0; r < inst.stations.size(); ++r) {
      int st_loc = inst.stations[r].location;
      Minute back_dh = dh_min(st_loc, depot_loc);
      double back_km = dh_km(st_loc, depot_loc);
      bool can_return = back_dh <= inst.costs.max_deadhead_min;
      double back_tau = tau_soc(vt, back_km, 0);

      for (int b = 0; b < blocks.count; ++b) {
        Minute depart = blocks.block_start(b) + blocks.length;
        for (int rank = 0; rank < n_charge_soc; ++rank) {
          int tail = charge_idx[(r * blocks.count + b) *
                                    static_cast<std::size_t>(n_charge_soc) +
                                rank];
          SocTenths s = grid.values[rank];
          double gain = block_gain(s);

          // Returning to the depot mid-duty is allowed only when this very
          // charge was necessary to make it home at all.
          if (can_return && s + kEps < back_tau + grid.s_min &&
              s + gain + kEps >= back_tau + grid.s_min) {
            add_arc(tail, sink, move_cost(back_km, back_dh, 0), -1, -1,
                    &NetworkStats::charge_to_sink);
          }

          // Next trips, departing when the block ends — or, optimistically,
          // part-way through the block with proportionally less charge.
          for (std::size_t i = 0; i < inst.trips.size(); ++i) {
            const Trip& t = inst.trips[i];
            Minute dh = dh_min(st_loc, t.origin);
            if (dh > inst.costs.max_deadhead_min) continue;
            Minute idle = t.begin_time - depart - dh;
            if (idle > inst.costs.max_idle_charge_min) continue;
            double km = dh_km(st_loc, t.origin);
            double raw;
            Minute paid_idle;
            if (idle >= 0) {
              raw = s + gain - tau_soc(vt, km, idle);
              paid_idle = idle;
            } else if (mode == RoundingMode::Optimistic &&
                       idle > -blocks.length) {
              // Leaves during the block; charges only while present.
              double partial = std::min(rate * (blocks.length + idle),
                                        static_cast<double>(grid.s_full - s));
              raw = s + partial - tau_soc(vt, km, 0);
              paid_idle = 0;
            } else {
              continue;
            }
            auto s2 = round_soc(grid, mode, raw);
            if (!s2) continue;
            int head = trip_node(static_cast<int>(i), *s2);
            if (head < 0) continue;
            Cents c = move_cost(km, dh, paid_idle) +
                      trip_cost(static_cast<int>(i));
            add_arc(tail, head, c, static_cast<int>(i), -1,
                    &NetworkStats::charge_to_trip);
          }

          // Continue charging into the adjacent block at the same plug. On
          // the optimistic side a (nominally) full bus may keep holding it
          // for free, so long station waits stay representable.
          if (b + 1 < blocks.count) {
            auto s2 = round_soc(grid, mode, s + gain);
            if (s2 && (*s2 > s || (mode == RoundingMode::Optimistic &&
                                   s == grid.s_full))) {
              int head = charge_node(static_cast<int>(r), b + 1, *s2);
              if (head >= 0) {
                add_arc(tail, head, charge_cost(*s2), -1,
                        static_cast<int>(r) * blocks.count + (b + 1),
                        &NetworkStats::charge_to_charge);
              }
            }
          }
        }
      }
    }
  }

  // Keep only nodes on some source-sink path, renumber them in topological
  // order and leave the arcs sorted by tail.
  void prune_and_pack(Network& net) {
    const int n = static_cast<int>(nodes.size());
    stats.nodes_built = n;
    stats.arcs_built = static_cast<std::int64_t>(arcs.size());

    std::vector<char> fwd(n, 0), bwd(n, 0);
    fwd[0] = 1;
    // Arcs only go forward in time, so index order is not guaranteed yet;
    // run simple fixpoint-free passes over arcs sorted by construction:
    // forward reachability needs arcs in topological tail order. Sort by
    // node time first.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const Node& na = nodes[a];
      const Node& nb = nodes[b];
      if (na.time != nb.time) return na.time < nb.time;
      if (na.kind != nb.kind) return na.kind < nb.kind;
      if (na.trip != nb.trip) return na.trip < nb.trip;
      if (na.station != nb.station) return na.station < nb.station;
      if (na.block != nb.block) return na.block < nb.block;
      return na.soc < nb.soc;
    });
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[order[i]] = i;

    std::vector<Arc> sorted = arcs;
    std::sort(sorted.begin(), sorted.end(), [&](const Arc& a, const Arc& b) {
      if (pos[a.from] != pos[b.from]) return pos[a.from] < pos[b.from];
      return pos[a.to] < pos[b.to];
    });
    for (const Arc& a : sorted)
      if (fwd[a.from]) fwd[a.to] = 1;
    int sink = n - 1;
    bwd[sink] = 1;
    for (auto it = sorted.rbegin(); it != sorted.rend(); ++it)
      if (bwd[it->to]) bwd[it->from] = 1;

    std::vector<int> remap(n, -1);
    int kept = 0;
    for (int i = 0; i < n; ++i) {
      int v = order[i];
      if (fwd[v] && bwd[v]) remap[v] = kept++;
    }
    net.nodes.clear();
    net.nodes.resize(kept);
    for (int v = 0; v < n; ++v)
      if (remap[v] >= 0) net.nodes[remap[v]] = nodes[v];

    net.arcs.clear();
    NetworkStats kept_stats = stats;
    kept_stats.source_to_trip = kept_stats.trip_to_trip =
        kept_stats.trip_to_charge = kept_stats.trip_to_sink =
            kept_stats.charge_to_trip = kept_stats.charge_to_charge =
                kept_stats.charge_to_sink = 0;
    for (const Arc& a : sorted) {
      if (remap[a.from] < 0 || remap[a.to] < 0) continue;
      Arc na = a;
      na.from = remap[a.from];
      na.to = remap[a.to];
      net.arcs.push_back(na);
      const Node& head = net.nodes[na.to];
      const Node& tail = net.nodes[na.from];
      if (tail.kind == NodeKind::Source)
        ++kept_stats.source_to_trip;
      else if (tail.kind == NodeKind::TripNode) {
        if (head.kind == NodeKind::TripNode)
          ++kept_stats.trip_to_trip;
        else if (head.kind == NodeKind::ChargeNode)
          ++kept_stats.trip_to_charge;
        else
          ++kept_stats.trip_to_sink;
      } else {
        if (head.kind == NodeKind::TripNode)
          ++kept_stats.charge_to_trip;
        else if (head.kind == NodeKind::ChargeNode)
          ++kept_stats.charge_to_charge;
        else
          ++kept_stats.charge_to_sink;
      }
    }
    kept_stats.nodes_built = stats.nodes_built;
    kept_stats.arcs_built = stats.arcs_built;
    kept_stats.nodes_kept = kept;
    kept_stats.arcs_kept = static_cast<std::int64_t>(net.arcs.size());
    net.stats = kept_stats;
    net.source = remap[0];
    net.sink = remap[sink];
  }
};

} // namespace

Network build_network(const Instance& inst, int vehicle_type, int depot,
                      const SocGrid& grid, const TimeBlocks& blocks,
                      RoundingMode mode) {
  if (vehicle_type < 0 ||
      vehicle_type >= static_cast<int>(inst.vehicle_types.size()))
    throw EvspError("build_network: unknown vehicle type");
  if (depot < 0 || depot >= static_cast<int>(inst.depots.size()))
    throw EvspError("build_network: unknown depot");

  Network net;
  net.vehicle_type = vehicle_type;
  net.depot = depot;
  net.mode = mode;
  net.grid = grid;
  net.blocks = blocks;

  Builder b{inst,
            grid,
            blocks,
            mode,
            inst.vehicle_types[vehicle_type],
            inst.depots[depot].location,
            {},
            {},
            {},
            {},
            {},
            0,
            {}};
  b.build_nodes();
  int sink = static_cast<int>(b.nodes.size()) - 1;
  b.build_source_arcs();
  b.build_trip_arcs(sink);
  b.build_charge_arcs(sink);
  b.prune_and_pack(net);
  return net;
}

std::vector<Network> build_all_networks(const Instance& inst,
                                        const SocGrid& grid,
                                        const TimeBlocks& blocks,
                                        RoundingMode mode) {
  std::vector<Network> nets;
  for (std::size_t d = 0; d < inst.depots.size(); ++d)
    for (int vt : inst.depots[d].vehicle_types) {
      Network n =
          build_network(inst, vt, static_cast<int>(d), grid, blocks, mode);
      n.k = static_cast<int>(nets.size());
      nets.push_back(std::move(n));
    }
  return nets;
}

Network remove_nodes(const Network& net, const std::vector<bool>& trips_gone,
                     const std::unordered_set<int>& saturated_keys) {
  const int n = static_cast<int>(net.nodes.size());
  std::vector<char> keep(n, 1);
  for (int v = 0; v < n; ++v) {
    const Node& nd = net.nodes[v];
    if (nd.kind == NodeKind::TripNode && nd.trip <
            static_cast<int>(trips_gone.size()) &&
        trips_gone[nd.trip])
      keep[v] = 0;
    if (nd.kind == NodeKind::ChargeNode &&
        saturated_keys.count(net.gamma_index(nd.station, nd.block)))
      keep[v] = 0;
  }

  // Reachability on the surviving arcs; nodes are already topological.
  std::vector<char> fwd(n, 0), bwd(n, 0);
  fwd[net.source] = 1;
  for (const Arc& a : net.arcs)
    if (keep[a.from] && keep[a.to] && fwd[a.from]) fwd[a.to] = 1;
  bwd[net.sink] = 1;
  for (auto it = net.arcs.rbegin(); it != net.arcs.rend(); ++it)
    if (keep[it->from] && keep[it->to] && bwd[it->to]) bwd[it->from] = 1;

  std::vector<int> remap(n, -1);
  Network out;
  out.k = net.k;
  out.vehicle_type = net.vehicle_type;
  out.depot = net.depot;
  out.mode = net.mode;
  out.grid = net.grid;
  out.blocks = net.blocks;
  int kept = 0;
  for (int v = 0; v < n; ++v)
    if (keep[v] && fwd[v] && bwd[v]) remap[v] = kept++;
  out.nodes.resize(kept);
  for (int v = 0; v < n; ++v)
    if (remap[v] >= 0) out.nodes[remap[v]] = net.nodes[v];
  NetworkStats st;
  st.nodes_built = net.stats.nodes_built;
  st.arcs_built = net.stats.arcs_built;
  for (const Arc& a : net.arcs) {
    if (remap[a.from] < 0 || remap[a.to] < 0) continue;
    Arc na = a;
    na.from = remap[a.from];
    na.to = remap[a.to];
    out.arcs.push_back(na);
  }
  st.nodes_kept = kept;
  st.arcs_kept = static_cast<std::int64_t>(out.arcs.size());
  out.stats = st;
  out.source = remap[net.source];
  out.sink = remap[net.sink];
  if (out.source < 0 || out.sink < 0) {
    // Nothing left to price: collapse into an explicit empty network.
    out.nodes.clear();
    out.arcs.clear();
    out.source = out.sink = -1;
    out.stats.nodes_kept = 0;
    out.stats.arcs_kept = 0;
  }
  return out;
}

std::string network_stats_csv(const std::vector<Network>& nets) {
  std::ostringstream os;
  os << "k,vehicle_type,depot,nodes_built,nodes_kept,arcs_built,arcs_kept,"
        "source_to_trip,trip_to_trip,trip_to_charge,trip_to_sink,"
        "charge_to_trip,charge_to_charge,charge_to_sink\n";
  for (const Network& n : nets) {
    const NetworkStats& s = n.stats;
    os << n.k << ',' << n.vehicle_type << ',' << n.depot << ','
       << s.nodes_built << ',' << s.nodes_kept << ',' << s.arcs_built << ','
       << s.arcs_kept << ',' << s.source_to_trip << ',' << s.trip_to_trip
       << ',' << s.trip_to_charge << ',' << s.trip_to_sink << ','
       << s.charge_to_trip << ',' << s.charge_to_charge << ','
       << s.charge_to_sink << '\n';
  }
  return os.str();
}

} // namespace evsp
