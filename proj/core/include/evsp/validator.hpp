#pragma once

#include <string>
#include <vector>

#include "evsp/pricing.hpp"

namespace evsp {

enum class DutyEventType { PullOut, Trip, Deadhead, Idle, Charge, PullIn };

struct DutyEvent {
  DutyEventType type = DutyEventType::Idle;
  Minute start = 0;
  Minute end = 0;
  int trip = -1;    // Trip events
  int station = -1; // Charge events
  int block = -1;   // Charge events
  double km = 0.0;  // Trip / Deadhead / PullOut / PullIn
  double kwh = 0.0; // energy drawn (negative) or charged (positive)
  SocTenths grid_soc = 0; // planned SoC entering this event
};

struct Duty {
  int vehicle_type = -1;
  int depot = -1;
  Cents cost = 0.0;
  std::vector<DutyEvent> events;
  std::vector<int> trips;       // trips this duty covers (revenue)
  std::vector<int> empty_trips; // trips driven without passengers
  std::vector<int> charge_uses; // station*blocks+block keys
};

struct Schedule {
  std::vector<Duty> duties;
  Cents total_cost = 0.0;
  int bus_count = 0;
  double total_km = 0.0;
  double total_deadhead_km = 0.0;
  double total_charge_kwh = 0.0;
  // Trips covered by no duty after overlap resolution (should be empty).
  std::vector<int> uncovered_trips;
};

// Continuous replay of one duty: per event, the exact SoC in/out alongside
// the planned grid SoC, for inspecting how much the discretization discards.
struct DutyTrace {
  int duty = -1;
  std::vector<double> soc_in;  // tenths, continuous
  std::vector<double> soc_out;
  std::vector<SocTenths> grid_soc;
  double discarded_tenths = 0.0; // total rounding loss across the duty
};

struct SimVerdict {
  bool feasible = false;
  std::vector<std::string> violations;
  std::vector<DutyTrace> traces;
};

// Turn chosen columns into a concrete schedule. Set covering may cover a
// trip twice; the realization keeps the copy whose removal saves the least
// and turns the other into empty running when the duty remains connected,
// otherwise leaves it as a (flagged) covered ride without passengers.
Schedule realize(const Instance& inst, const std::vector<Column>& chosen,
                 const SocGrid& grid, const TimeBlocks& blocks);

// Independent feasibility audit with continuous SoC: every trip covered,
// timeline gap-free per duty, SoC never below the floor at any activity
// boundary, station occupancy within capacity in every block, costs add up.
SimVerdict simulate(const Schedule& schedule, const Instance& inst,
                    const SocGrid& grid, const TimeBlocks& blocks);

// station,block,occupancy,capacity rows for every used (station, block).
std::string occupancy_csv(const Schedule& schedule, const Instance& inst,
                          const TimeBlocks& blocks);

std::string summarize(const Schedule& schedule, const Instance& inst);

// Deterministic JSON round trip.
void save_schedule(const Schedule& schedule, const std::string& path);
Schedule load_schedule(const std::string& path);
std::string schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const std::string& text);

} // namespace evsp
