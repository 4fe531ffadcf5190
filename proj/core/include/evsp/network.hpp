#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "evsp/discretization.hpp"
#include "evsp/instance.hpp"

namespace evsp {

enum class NodeKind : std::uint8_t { Source, Sink, TripNode, ChargeNode };

// One node of the time/SoC expanded network. TripNode (trip, soc) means
// "starts this trip with exactly this SoC"; ChargeNode (station, block, soc)
// means "plugged in at this station for this block, entering with this SoC".
struct Node {
  NodeKind kind = NodeKind::Source;
  int trip = -1;
  int station = -1;
  int block = -1;
  SocTenths soc = 0;
  Minute time = 0; // trip begin / block start; horizon boundary for ends
};

// Arcs carry only what pricing needs; everything a human-readable report
// wants (deadhead km, idle minutes, charge gained) is re-derived from the
// endpoint nodes and the instance. sigma_idx/gamma_idx say which covering
// and capacity duals the arc picks up (-1 for none).
struct Arc {
  std::int32_t from = -1;
  std::int32_t to = -1;
  Cents cost = 0.0;
  std::int32_t sigma_idx = -1;
  std::int32_t gamma_idx = -1;
};

// Construction counts per arc family, before and after pruning nodes that
// cannot reach both terminals.
struct NetworkStats {
  std::int64_t nodes_built = 0;
  std::int64_t nodes_kept = 0;
  std::int64_t arcs_built = 0;
  std::int64_t arcs_kept = 0;
  std::int64_t source_to_trip = 0;
  std::int64_t trip_to_trip = 0;
  std::int64_t trip_to_charge = 0;
  std::int64_t trip_to_sink = 0;
  std::int64_t charge_to_trip = 0;
  std::int64_t charge_to_charge = 0;
  std::int64_t charge_to_sink = 0;
};

// Expanded network for one (vehicle type, depot) combination. Nodes are
// stored in a topological order (source first, then ascending activity start
// time, sink last) and arcs sorted by tail, so a single forward sweep prices
// all duties of this combination.
struct Network {
  int k = -1; // index of this combination
  int vehicle_type = -1;
  int depot = -1;
  RoundingMode mode = RoundingMode::Conservative;
  SocGrid grid;
  TimeBlocks blocks;
  std::vector<Node> nodes;
  std::vector<Arc> arcs;
  std::int32_t source = -1;
  std::int32_t sink = -1;
  NetworkStats stats;

  int gamma_index(int station, int block) const {
    return station * blocks.count + block;
  }
};

// SoC spent driving `km` and idling `idle_min`, in tenths of a percent
// (continuous; callers subtract and then round).
double tau_soc(const VehicleType& vt, double km, Minute idle_min);

Network build_network(const Instance& inst, int vehicle_type, int depot,
                      const SocGrid& grid, const TimeBlocks& blocks,
                      RoundingMode mode);

// One network per (vehicle type, depot) pair with that type at that depot,
// ordered by (depot, vehicle type) and numbered k = 0, 1, ...
std::vector<Network> build_all_networks(const Instance& inst,
                                        const SocGrid& grid,
                                        const TimeBlocks& blocks,
                                        RoundingMode mode);

// Copy of `net` without the nodes of already-covered trips and without
// charge nodes of saturated (station, block) pairs, re-pruned. Used by the
// diving heuristic to shrink pricing as columns get fixed.
Network remove_nodes(const Network& net, const std::vector<bool>& trips_gone,
                     const std::unordered_set<int>& saturated_keys);

std::string network_stats_csv(const std::vector<Network>& nets);

} // namespace evsp
