#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "evsp/bounds.hpp"
#include "evsp/heuristics.hpp"
#include "evsp/validator.hpp"
#include "test_helpers.hpp"

using namespace evsp;
using namespace evsp_test;

namespace {

// One solved schedule reused by every tamper test below.
struct Solved {
  Instance inst;
  SocGrid grid;
  TimeBlocks blocks;
  Schedule schedule;
};

const Solved& solved_forced_recharge() {
  static Solved s = [] {
    Solved out;
    out.inst = forced_recharge_instance();
    out.grid = forced_recharge_grid();
    out.blocks = blocks_for(out.inst);
    auto nets = build_all_networks(out.inst, out.grid, out.blocks,
                                   RoundingMode::Conservative);
    HeuristicConfig cfg;
    cfg.kind = HeuristicKind::PriceAndBranch;
    HeuristicResult res = run_heuristic(out.inst, nets, cfg);
    REQUIRE(res.feasible);
    out.schedule = res.schedule;
    return out;
  }();
  return s;
}

bool any_violation_contains(const SimVerdict& v, const std::string& needle) {
  return std::any_of(v.violations.begin(), v.violations.end(),
                     [&](const std::string& msg) {
                       return msg.find(needle) != std::string::npos;
                     });
}

} // namespace

TEST_CASE("a solved schedule passes the independent audit") {
  const Solved& s = solved_forced_recharge();
  // One bus must run both trips with a recharge in between: two buses would
  // pay a second pull-out, which the cost structure makes strictly worse.
  CHECK(s.schedule.bus_count == 1);
  CHECK(s.schedule.uncovered_trips.empty());
  CHECK(s.schedule.total_charge_kwh > 0.0);

  SimVerdict verdict = simulate(s.schedule, s.inst, s.grid, s.blocks);
  CHECK(verdict.feasible);
  CHECK(verdict.violations.empty());
  REQUIRE(verdict.traces.size() == s.schedule.duties.size());
  // The continuous replay never loses energy relative to the planned grid.
  for (const DutyTrace& tr : verdict.traces) {
    REQUIRE(!tr.soc_in.empty());
    CHECK(tr.discarded_tenths >= -1e-9);
    for (std::size_t i = 0; i < tr.grid_soc.size(); ++i)
      CHECK(tr.soc_in[i] >= tr.grid_soc[i] - 1e-6);
  }
}

TEST_CASE("realize resolves a double-covered trip") {
  Instance inst = small_instance(3, 1);
  SocGrid grid = default_grid();
  TimeBlocks blocks = blocks_for(inst);
  OracleResult res =
      oracle_solve(inst, OracleMode::NetworkPaths, grid, blocks,
                   RoundingMode::Conservative, OracleCaps{});
  REQUIRE(!res.refused);
  REQUIRE(!res.columns.empty());

  // Pick any duty that covers the trip and hand it in twice.
  const Column& col = res.columns.front();
  Schedule schedule = realize(inst, {col, col}, grid, blocks);

  int covered = 0, empty = 0;
  for (const Duty& duty : schedule.duties) {
    covered += static_cast<int>(std::count(duty.trips.begin(),
                                           duty.trips.end(), 0));
    empty += static_cast<int>(std::count(duty.empty_trips.begin(),
                                         duty.empty_trips.end(), 0));
  }
  CHECK(covered == 1);
  CHECK(empty == 1);
  CHECK(schedule.uncovered_trips.empty());

  SimVerdict verdict = simulate(schedule, inst, grid, blocks);
  CHECK(verdict.feasible);
}

TEST_CASE("simulate catches a battery that cannot actually do the work") {
  const Solved& s = solved_forced_recharge();
  Instance hungry = s.inst;
  hungry.vehicle_types[0].consumption_kwh_per_km *= 10.0;
  SimVerdict verdict = simulate(s.schedule, hungry, s.grid, s.blocks);
  CHECK(!verdict.feasible);
  CHECK(any_violation_contains(verdict, "state of charge below the floor"));
}

TEST_CASE("simulate catches an overbooked charging station") {
  const Solved& s = solved_forced_recharge();
  Instance squeezed = s.inst;
  squeezed.stations[0].capacity = 0;
  SimVerdict verdict = simulate(s.schedule, squeezed, s.grid, s.blocks);
  CHECK(!verdict.feasible);
  CHECK(any_violation_contains(verdict, "capacity 0"));
  CHECK(any_violation_contains(verdict, "holds"));
}

TEST_CASE("simulate catches tampered costs") {
  const Solved& s = solved_forced_recharge();

  Schedule duty_off = s.schedule;
  duty_off.duties[0].cost += 5000.0;
  duty_off.total_cost += 5000.0; // keep the sum consistent: isolate the duty
  SimVerdict v1 = simulate(duty_off, s.inst, s.grid, s.blocks);
  CHECK(!v1.feasible);
  CHECK(any_violation_contains(v1, "differs from the recomputed cost"));

  Schedule total_off = s.schedule;
  total_off.total_cost += 5000.0;
  SimVerdict v2 = simulate(total_off, s.inst, s.grid, s.blocks);
  CHECK(!v2.feasible);
  CHECK(any_violation_contains(v2, "sum of duty costs"));
}

TEST_CASE("simulate catches a duplicated duty") {
  const Solved& s = solved_forced_recharge();
  Schedule doubled = s.schedule;
  doubled.duties.push_back(doubled.duties[0]);
  doubled.total_cost += doubled.duties[0].cost;
  doubled.bus_count += 1;
  SimVerdict verdict = simulate(doubled, s.inst, s.grid, s.blocks);
  CHECK(!verdict.feasible);
  CHECK(any_violation_contains(verdict, "covered 2 times"));
}

TEST_CASE("simulate catches an understated charge event") {
  const Solved& s = solved_forced_recharge();
  Schedule stingy = s.schedule;
  bool found = false;
  for (Duty& duty : stingy.duties)
    for (DutyEvent& ev : duty.events)
      if (!found && ev.type == DutyEventType::Charge && ev.kwh > 1.0) {
        // Claim less energy than the charger delivers, and move the cost
        // books along with it so only the energy check can fire.
        double delta = 0.9 * ev.kwh;
        ev.kwh -= delta;
        double dcost = s.inst.costs.energy_cost_per_kwh * delta;
        duty.cost -= dcost;
        stingy.total_cost -= dcost;
        found = true;
      }
  REQUIRE(found);
  SimVerdict verdict = simulate(stingy, s.inst, s.grid, s.blocks);
  CHECK(!verdict.feasible);
  CHECK(any_violation_contains(verdict, "understates the energy received"));
}

TEST_CASE("occupancy report covers the whole horizon") {
  const Solved& s = solved_forced_recharge();
  std::string csv = occupancy_csv(s.schedule, s.inst, s.blocks);
  std::istringstream is(csv);
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "station,block_start,charging,capacity");
  int rows = 0;
  int busiest = 0;
  while (std::getline(is, line)) {
    ++rows;
    int station, start, charging, capacity;
    REQUIRE(std::sscanf(line.c_str(), "%d,%d,%d,%d", &station, &start,
                        &charging, &capacity) == 4);
    CHECK(charging <= capacity);
    busiest = std::max(busiest, charging);
  }
  CHECK(rows == static_cast<int>(s.inst.stations.size()) * s.blocks.count);
  CHECK(busiest == 1); // the forced recharge really shows up
}

TEST_CASE("schedule JSON round trip is byte identical") {
  const Solved& s = solved_forced_recharge();
  std::string once = schedule_to_json(s.schedule);
  Schedule back = schedule_from_json(once);
  CHECK(schedule_to_json(back) == once);
  CHECK(back.duties.size() == s.schedule.duties.size());
  CHECK(back.total_cost == doctest::Approx(s.schedule.total_cost));

  std::string path = "/tmp/evsp_test_schedule.json";
  save_schedule(s.schedule, path);
  Schedule loaded = load_schedule(path);
  CHECK(schedule_to_json(loaded) == once);
  std::remove(path.c_str());
}

TEST_CASE("summarize mentions the headline numbers") {
  const Solved& s = solved_forced_recharge();
  std::string text = summarize(s.schedule, s.inst);
  CHECK(text.find("buses: 1") != std::string::npos);
  CHECK(text.find("trips covered: 2") != std::string::npos);
  CHECK(text.find("energy charged:") != std::string::npos);
  CHECK(text.find("uncovered") == std::string::npos);
}
