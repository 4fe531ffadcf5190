#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evsp/instance.hpp"

namespace evsp {

// Knobs for the synthetic instance generator. Two presets:
//  - paper():   city-bus-like setting, 2 depots, 3 capacitated stations,
//               2 vehicle types, full-size batteries.
//  - compact(): deliberately tiny world (1 depot, 1 station of capacity 1,
//               1 type, half-size battery and charger) so that exhaustive
//               reference computations on instances with <= 8 trips stay
//               within a few million steps.
struct GeneratorProfile {
  std::string name;
  int n_depots = 2;
  int n_stations = 3;
  std::vector<int> station_capacities; // size n_stations
  double box_km = 15.0;                // locations drawn in [0, box]^2
  double speed_kmh = 25.0;             // deadhead and trip speed
  int n_extra_locations = 6;           // trip endpoints besides depots/stations
  Minute window_start = 300;           // earliest trip departure
  Minute window_len = 1080;            // departures in [start, start+len)
  Minute trip_min = 20;                // trip duration bounds
  Minute trip_max = 75;
  double winding_max = 1.4;            // trip km up to this factor over line distance
  double battery_scale = 1.0;
  double charge_rate_scale = 1.0;
  bool two_vehicle_types = true;
  Minute max_idle_trip_min = 480;
  Minute max_idle_charge_min = 180;
  Minute max_deadhead_min = 60;

  static GeneratorProfile paper();
  static GeneratorProfile compact();
};

// Deterministic: equal (seed, n_trips, profile) gives byte-identical
// instances. Locations are planar; deadheads are Euclidean at profile speed;
// trip distances respect the straight-line lower bound.
Instance generate_instance(std::uint64_t seed, int n_trips,
                           const GeneratorProfile& profile);

} // namespace evsp
