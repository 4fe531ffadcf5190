#include "evsp/pricing.hpp"

#include <algorithm>
#include <future>
#include <limits>

#include "evsp/common.hpp"

namespace evsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Two path values this close count as equal and fall through to the
// lexicographic tie-break, keeping column generation deterministic.
constexpr double kTieEps = 1e-12;

std::vector<std::int32_t> walk_back(const Network& net,
                                    const std::vector<std::int32_t>& pred,
                                    std::int32_t node) {
  std::vector<std::int32_t> seq;
  std::int32_t at = node;
  while (at >= 0) {
    seq.push_back(at);
    std::int32_t arc = pred[at];
    at = arc >= 0 ? net.arcs[arc].from : -1;
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

} // namespace

std::optional<PricedColumn> price(const Network& net, const DualVector& duals,
                                  double eps_rc) {
  if (net.source < 0 || net.sink < 0) return std::nullopt;
  const int n = static_cast<int>(net.nodes.size());
  std::vector<double> dist(n, kInf);
  std::vector<std::int32_t> pred(n, -1);
  dist[net.source] = 0.0;

  // Arcs are sorted by tail in topological order, so one sweep settles
  // every node before its outgoing arcs are looked at.
  for (std::size_t ai = 0; ai < net.arcs.size(); ++ai) {
    const Arc& a = net.arcs[ai];
    double base = dist[a.from];
    if (base == kInf) continue;
    double rc = a.cost;
    if (a.sigma_idx >= 0) rc -= duals.sigma[a.sigma_idx];
    if (a.gamma_idx >= 0) rc -= duals.gamma[a.gamma_idx];
    double cand = base + rc;
    if (cand < dist[a.to] - kTieEps) {
      dist[a.to] = cand;
      pred[a.to] = static_cast<std::int32_t>(ai);
    } else if (cand <= dist[a.to] + kTieEps && pred[a.to] >= 0) {
      // Equal value: prefer the lexicographically smaller node sequence.
      std::vector<std::int32_t> incumbent = walk_back(net, pred, a.to);
      std::vector<std::int32_t> challenger =
          walk_back(net, pred, a.from);
      challenger.push_back(a.to);
      if (challenger < incumbent) {
        dist[a.to] = std::min(dist[a.to], cand);
        pred[a.to] = static_cast<std::int32_t>(ai);
      }
    }
  }

  if (dist[net.sink] >= -eps_rc) return std::nullopt;

  PricedColumn out;
  out.reduced_cost = dist[net.sink];
  Column& col = out.col;
  col.k = net.k;
  col.vehicle_type = net.vehicle_type;
  col.depot = net.depot;
  std::int32_t at = net.sink;
  std::vector<std::int32_t> path_arcs;
  while (pred[at] >= 0) {
    path_arcs.push_back(pred[at]);
    at = net.arcs[pred[at]].from;
  }
  std::reverse(path_arcs.begin(), path_arcs.end());
  for (std::int32_t ai : path_arcs) {
    const Arc& a = net.arcs[ai];
    col.cost += a.cost;
    const Node& head = net.nodes[a.to];
    if (head.kind == NodeKind::TripNode) {
      col.trips.push_back(head.trip);
      col.legs.push_back({NodeKind::TripNode, head.trip, -1, -1, head.soc});
    } else if (head.kind == NodeKind::ChargeNode) {
      col.use_keys.push_back(a.gamma_idx);
      col.legs.push_back(
          {NodeKind::ChargeNode, -1, head.station, head.block, head.soc});
    }
  }
  std::sort(col.trips.begin(), col.trips.end());
  std::sort(col.use_keys.begin(), col.use_keys.end());
  return out;
}

std::vector<PricedColumn> price_all(const std::vector<Network>& nets,
                                    const DualVector& duals, double eps_rc,
                                    const PricingOptions& opts) {
  std::vector<std::optional<PricedColumn>> per_net(nets.size());
  int threads = std::max(1, opts.threads);
  threads = std::min<int>(threads, static_cast<int>(nets.size()));

  if (threads <= 1) {
    for (std::size_t i = 0; i < nets.size(); ++i)
      per_net[i] = price(nets[i], duals, eps_rc);
  } else {
    std::vector<std::future<void>> tasks;
    std::size_t chunk = (nets.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::size_t lo = t * chunk;
      std::size_t hi = std::min(nets.size(), lo + chunk);
      if (lo >= hi) break;
      tasks.push_back(std::async(std::launch::async, [&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i)
          per_net[i] = price(nets[i], duals, eps_rc);
      }));
    }
    for (auto& f : tasks) f.get();
  }

  std::vector<PricedColumn> out;
  if (opts.mode == ColumnsPerIter::PerNetwork) {
    for (auto& c : per_net)
      if (c) out.push_back(std::move(*c));
  } else {
    int best = -1;
    for (std::size_t i = 0; i < per_net.size(); ++i) {
      if (!per_net[i]) continue;
      if (best < 0 ||
          per_net[i]->reduced_cost <
              per_net[static_cast<std::size_t>(best)]->reduced_cost - kTieEps)
        best = static_cast<int>(i);
    }
    if (best >= 0)
      out.push_back(std::move(*per_net[static_cast<std::size_t>(best)]));
  }
  return out;
}

} // namespace evsp
