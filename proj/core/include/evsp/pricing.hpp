#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "evsp/network.hpp"

namespace evsp {

// Dual prices from the restricted master: sigma per trip (covering rows,
// >= 0 at optimality), gamma per (station, block) key (capacity rows, <= 0).
struct DualVector {
  std::vector<double> sigma;
  std::vector<double> gamma;
};

// One leg of a duty as stored in a column: the node sequence between source
// and sink, enough to rebuild the full activity timeline later.
struct ColumnLeg {
  NodeKind kind = NodeKind::TripNode;
  int trip = -1;
  int station = -1;
  int block = -1;
  SocTenths soc = 0;
};

// A duty (vehicle schedule) in master form: which trips it covers, which
// (station, block) slots it occupies, and its true cost.
struct Column {
  int k = -1;
  int vehicle_type = -1;
  int depot = -1;
  Cents cost = 0.0;
  std::vector<int> trips;             // ascending trip ids
  std::vector<int> use_keys;          // ascending station*blocks.count+block
  std::vector<ColumnLeg> legs;        // in travel order
  bool is_dummy = false;
};

struct PricedColumn {
  Column col;
  double reduced_cost = 0.0;
};

// Shortest reduced-cost duty in one network via a forward DP over the
// topologically sorted arcs. Ties on value break toward the
// lexicographically smallest node sequence so results are deterministic.
// Returns nullopt when the best duty prices out (reduced cost > -eps_rc).
std::optional<PricedColumn> price(const Network& net, const DualVector& duals,
                                  double eps_rc);

enum class ColumnsPerIter { PerNetwork, GlobalBest };

struct PricingOptions {
  ColumnsPerIter mode = ColumnsPerIter::PerNetwork;
  int threads = 1;
};

// Price every network (in parallel when threads > 1) and collect negative
// columns: one per network, or only the global best. Result order is by
// network index regardless of thread scheduling.
std::vector<PricedColumn> price_all(const std::vector<Network>& nets,
                                    const DualVector& duals, double eps_rc,
                                    const PricingOptions& opts);

} // namespace evsp
