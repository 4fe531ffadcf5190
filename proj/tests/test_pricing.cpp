#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "evsp/bounds.hpp"
#include "evsp/pricing.hpp"
#include "test_helpers.hpp"

using namespace evsp;
using namespace evsp_test;

namespace {

DualVector zero_duals(const Instance& inst, const TimeBlocks& blocks) {
  DualVector d;
  d.sigma.assign(inst.trips.size(), 0.0);
  d.gamma.assign(inst.stations.size() * blocks.count, 0.0);
  return d;
}

// Reduced cost of a column under the given duals, recomputed from scratch.
double reduced_cost_of(const Column& col, const DualVector& duals) {
  double rc = col.cost;
  for (int t : col.trips) rc -= duals.sigma[t];
  for (int key : col.use_keys) rc -= duals.gamma[key];
  return rc;
}

} // namespace

TEST_CASE("pricing finds nothing when no dual makes a duty attractive") {
  Instance inst = small_instance(1, 5);
  SocGrid grid = default_grid();
  TimeBlocks blocks = blocks_for(inst);
  std::vector<Network> nets =
      build_all_networks(inst, grid, blocks, RoundingMode::Conservative);
  DualVector duals = zero_duals(inst, blocks);
  for (const Network& net : nets)
    CHECK(!price(net, duals, 1e-6).has_value());
}

TEST_CASE("a dual above the singleton cost prices out exactly that margin") {
  Instance inst = small_instance(2, 1);
  SocGrid grid = default_grid();
  TimeBlocks blocks = blocks_for(inst);
  std::vector<Network> nets =
      build_all_networks(inst, grid, blocks, RoundingMode::Conservative);
  REQUIRE(nets.size() == 1);

  // First learn the cheapest duty cost by making the trip irresistible.
  DualVector duals = zero_duals(inst, blocks);
  duals.sigma[0] = 1e9;
  auto probe = price(nets[0], duals, 1e-6);
  REQUIRE(probe.has_value());
  Cents cheapest = probe->col.cost;

  // Now pay exactly one cent more than that: the best duty must be the same
  // one, priced at minus one cent.
  duals.sigma[0] = cheapest + 1.0;
  auto hit = price(nets[0], duals, 1e-6);
  REQUIRE(hit.has_value());
  CHECK(hit->reduced_cost == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(hit->col.cost == doctest::Approx(cheapest));
  CHECK(hit->col.trips == std::vector<int>{0});

  // A cent less than the cheapest duty and nothing prices out.
  duals.sigma[0] = cheapest - 1.0;
  CHECK(!price(nets[0], duals, 1e-6).has_value());
}

TEST_CASE("pricing agrees with exhaustive duty enumeration") {
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    Instance inst = small_instance(seed, 5);
    SocGrid grid = default_grid();
    TimeBlocks blocks = blocks_for(inst);
    std::vector<Network> nets =
        build_all_networks(inst, grid, blocks, RoundingMode::Conservative);
    OracleResult oracle =
        oracle_solve(inst, OracleMode::NetworkPaths, grid, blocks,
                     RoundingMode::Conservative, OracleCaps{});
    REQUIRE(!oracle.refused);
    REQUIRE(oracle.n_columns > 0);

    std::mt19937_64 rng(seed * 77);
    std::uniform_real_distribution<double> sig(0.0, 2e6);
    std::uniform_real_distribution<double> gam(-1e5, 0.0);
    for (int round = 0; round < 20; ++round) {
      DualVector duals;
      duals.sigma.resize(inst.trips.size());
      for (double& s : duals.sigma) s = sig(rng);
      duals.gamma.resize(inst.stations.size() * blocks.count);
      for (double& g : duals.gamma) g = gam(rng);

      for (const Network& net : nets) {
        // Cheapest enumerated duty of this network under these duals. The
        // enumeration deduplicates duties by keeping the cheapest of each
        // (trips, uses) signature, which leaves the minimum untouched.
        double best = 0.0; // the empty duty is never priced, floor at 0
        bool any = false;
        for (const Column& col : oracle.columns)
          if (col.k == net.k) {
            double rc = reduced_cost_of(col, duals);
            if (!any || rc < best) best = rc;
            any = true;
          }
        REQUIRE(any);

        auto got = price(net, duals, 1e-6);
        if (best < -1e-6) {
          REQUIRE(got.has_value());
          CHECK(got->reduced_cost ==
                doctest::Approx(best).epsilon(1e-9).scale(1.0));
          CHECK(reduced_cost_of(got->col, duals) ==
                doctest::Approx(got->reduced_cost).epsilon(1e-9).scale(1.0));
        } else {
          CHECK(!got.has_value());
        }
      }
    }
  }
}

TEST_CASE("price_all is deterministic across thread counts") {
  Instance inst = small_instance(6, 7);
  SocGrid grid = default_grid();
  TimeBlocks blocks = blocks_for(inst);
  std::vector<Network> nets =
      build_all_networks(inst, grid, blocks, RoundingMode::Conservative);

  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> sig(0.0, 2e6);
  DualVector duals = zero_duals(inst, blocks);
  for (double& s : duals.sigma) s = sig(rng);

  PricingOptions one{ColumnsPerIter::PerNetwork, 1};
  PricingOptions four{ColumnsPerIter::PerNetwork, 4};
  std::vector<PricedColumn> a = price_all(nets, duals, 1e-6, one);
  std::vector<PricedColumn> b = price_all(nets, duals, 1e-6, four);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].col.k == b[i].col.k);
    CHECK(a[i].col.cost == b[i].col.cost);
    CHECK(a[i].col.trips == b[i].col.trips);
    CHECK(a[i].col.use_keys == b[i].col.use_keys);
    CHECK(a[i].reduced_cost == b[i].reduced_cost);
  }

  // Global-best returns at most one column: the smallest reduced cost seen,
  // with network index as the tie break.
  PricingOptions global{ColumnsPerIter::GlobalBest, 2};
  std::vector<PricedColumn> g = price_all(nets, duals, 1e-6, global);
  if (!a.empty()) {
    REQUIRE(g.size() == 1);
    double best = a[0].reduced_cost;
    for (const PricedColumn& pc : a) best = std::min(best, pc.reduced_cost);
    CHECK(g[0].reduced_cost == doctest::Approx(best));
  } else {
    CHECK(g.empty());
  }
}

TEST_CASE("pricing output is well formed") {
  Instance inst = small_instance(4, 6);
  SocGrid grid = default_grid();
  TimeBlocks blocks = blocks_for(inst);
  std::vector<Network> nets =
      build_all_networks(inst, grid, blocks, RoundingMode::Conservative);
  DualVector duals = zero_duals(inst, blocks);
  for (double& s : duals.sigma) s = 5e5;

  std::vector<PricedColumn> cols =
      price_all(nets, duals, 1e-6, PricingOptions{});
  REQUIRE(!cols.empty());
  for (const PricedColumn& pc : cols) {
    const Column& c = pc.col;
    CHECK(c.cost > 0.0);
    CHECK(!c.trips.empty());
    CHECK(std::is_sorted(c.trips.begin(), c.trips.end()));
    CHECK(std::adjacent_find(c.trips.begin(), c.trips.end()) ==
          c.trips.end());
    CHECK(std::is_sorted(c.use_keys.begin(), c.use_keys.end()));
    CHECK(!c.legs.empty());
    CHECK(c.k >= 0);
    CHECK(c.k < static_cast<int>(nets.size()));
    CHECK(c.vehicle_type == nets[c.k].vehicle_type);
    CHECK(c.depot == nets[c.k].depot);
    CHECK(!c.is_dummy);
  }
}
