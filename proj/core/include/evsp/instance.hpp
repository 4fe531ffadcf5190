#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evsp/common.hpp"

namespace evsp {

// A physical place buses can be at: trip endpoints, depots, charging sites.
struct Location {
  int id = -1;
  std::string name;
  double x_km = 0.0;
  double y_km = 0.0;
  bool is_depot = false;
  // Index into Instance::stations, or nullopt if no charger here.
  std::optional<int> station;
};

// A timetabled service trip that must be covered exactly once.
struct Trip {
  int id = -1;
  int origin = -1;      // location id
  int destination = -1; // location id
  Minute begin_time = 0;
  Minute end_time = 0;
  double distance_km = 0.0;

  Minute duration() const { return end_time - begin_time; }
};

struct VehicleType {
  int id = -1;
  std::string name;
  double battery_kwh = 0.0;
  double consumption_kwh_per_km = 0.0;
  double idle_kwh_per_min = 0.0;   // drawn while waiting with systems on
  double charge_kwh_per_min = 0.0; // gained while plugged in
  Cents invest_cost = 0.0;         // per bus pulled out of the depot
  Cents op_cost_per_km = 0.0;      // per km driven (trips and deadheads)
};

struct ChargingStation {
  int id = -1;
  int location = -1; // location id
  int capacity = 0;  // simultaneous buses per time block
};

struct Depot {
  int id = -1;
  int location = -1;              // location id
  std::vector<int> vehicle_types; // vehicle type ids housed here
};

// Dense minute/km matrices for empty movements between all locations.
struct DeadheadMatrix {
  int n = 0;
  std::vector<Minute> time;    // n*n, row-major
  std::vector<double> distance;

  Minute minutes(int from, int to) const { return time[from * n + to]; }
  double km(int from, int to) const { return distance[from * n + to]; }
};

struct CostParams {
  Cents energy_cost_per_kwh = 0.0;
  Cents crew_cost_per_min = 0.0;
  Cents charge_start_penalty = 0.0; // charged once per plug-in event
  Minute max_deadhead_min = 60;
  Minute max_idle_trip_min = 480;   // waiting allowed before a trip
  Minute max_idle_charge_min = 180; // waiting allowed before plugging in
};

struct Instance {
  std::string name;
  std::vector<Location> locations;
  std::vector<Trip> trips;
  std::vector<Depot> depots;
  std::vector<ChargingStation> stations;
  std::vector<VehicleType> vehicle_types;
  DeadheadMatrix deadhead;
  CostParams costs;
  Minute horizon_start = 0;
  Minute horizon_end = 0;

  // Throws EvspError with a descriptive message on the first problem found:
  // dangling ids, non-positive capacities, trips outside the horizon,
  // distance/time inconsistencies, depots without vehicle types.
  void validate() const;
};

// Percent of battery consumed/gained by the given energy amount.
double soc_of_energy(const VehicleType& vt, double kwh);

// Same in tenths of a percent (continuous; callers round where needed).
double soc_tenths_of_energy(const VehicleType& vt, double kwh);

// JSON file I/O. Serialization is deterministic: fixed key order, integers
// for money (cents; energy price in cents per MWh) and minutes, shortest
// round-trip representation for doubles.
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

} // namespace evsp
