#include "evsp/generator.hpp"

#include <algorithm>
#include <cmath>

#include "evsp/rng.hpp"

namespace evsp {

GeneratorProfile GeneratorProfile::paper() {
  GeneratorProfile p;
  p.name = "paper";
  p.n_depots = 2;
  p.n_stations = 3;
  p.station_capacities = {5, 2, 2};
  p.box_km = 15.0;
  p.speed_kmh = 25.0;
  p.n_extra_locations = 6;
  p.window_start = 300; // 05:00
  p.window_len = 1080;  // departures until 23:00
  p.trip_min = 20;
  p.trip_max = 75;
  p.winding_max = 1.4;
  p.battery_scale = 1.0;
  p.charge_rate_scale = 1.0;
  p.two_vehicle_types = true;
  p.max_idle_trip_min = 480;
  p.max_idle_charge_min = 180;
  p.max_deadhead_min = 60;
  return p;
}

GeneratorProfile GeneratorProfile::compact() {
  GeneratorProfile p;
  p.name = "compact";
  p.n_depots = 1;
  p.n_stations = 1;
  p.station_capacities = {1};
  p.box_km = 6.0;
  p.speed_kmh = 25.0;
  p.n_extra_locations = 4;
  p.window_start = 420; // 07:00
  p.window_len = 240;
  p.trip_min = 20;
  p.trip_max = 45;
  p.winding_max = 1.3;
  // Half-size battery and charger: short duties hit the SoC floor early, so
  // even tiny instances exercise the charging machinery, while the small
  // world keeps exhaustive duty enumeration cheap.
  p.battery_scale = 0.5;
  p.charge_rate_scale = 0.5;
  p.two_vehicle_types = false;
  p.max_idle_trip_min = 120;
  p.max_idle_charge_min = 15;
  p.max_deadhead_min = 60;
  return p;
}

namespace {

double eucl_km(const Location& a, const Location& b) {
  double dx = a.x_km - b.x_km;
  double dy = a.y_km - b.y_km;
  return std::sqrt(dx * dx + dy * dy);
}

} // namespace

Instance generate_instance(std::uint64_t seed, int n_trips,
                           const GeneratorProfile& profile) {
  if (n_trips < 1) throw EvspError("generator needs n_trips >= 1");
  if (static_cast<int>(profile.station_capacities.size()) !=
      profile.n_stations)
    throw EvspError("profile station capacities do not match station count");

  Rng rng(seed);
  Instance inst;
  inst.name = "gen-" + profile.name + "-s" + std::to_string(seed) + "-t" +
              std::to_string(n_trips);

  // Locations: depots, then stations (jittered next to a depot so charging
  // detours stay short), then plain trip endpoints. The draw order below is
  // part of the determinism contract; do not reorder.
  for (int d = 0; d < profile.n_depots; ++d) {
    Location loc;
    loc.id = static_cast<int>(inst.locations.size());
    loc.name = "depot" + std::to_string(d);
    loc.x_km = rng.uniform_real(0.0, profile.box_km);
    loc.y_km = rng.uniform_real(0.0, profile.box_km);
    loc.is_depot = true;
    inst.locations.push_back(std::move(loc));
  }
  for (int s = 0; s < profile.n_stations; ++s) {
    const Location& home = inst.locations[s % profile.n_depots];
    double j = profile.box_km / 20.0;
    Location loc;
    loc.id = static_cast<int>(inst.locations.size());
    loc.name = "station" + std::to_string(s);
    loc.x_km = std::clamp(home.x_km + rng.uniform_real(-j, j), 0.0,
                          profile.box_km);
    loc.y_km = std::clamp(home.y_km + rng.uniform_real(-j, j), 0.0,
                          profile.box_km);
    loc.station = s;
    inst.locations.push_back(std::move(loc));
  }
  for (int e = 0; e < profile.n_extra_locations; ++e) {
    Location loc;
    loc.id = static_cast<int>(inst.locations.size());
    loc.name = "loc" + std::to_string(e);
    loc.x_km = rng.uniform_real(0.0, profile.box_km);
    loc.y_km = rng.uniform_real(0.0, profile.box_km);
    inst.locations.push_back(std::move(loc));
  }

  const int n_loc = static_cast<int>(inst.locations.size());

  // Deadheads: straight-line distance at profile speed, minutes rounded up.
  inst.deadhead.n = n_loc;
  inst.deadhead.time.assign(static_cast<std::size_t>(n_loc) * n_loc, 0);
  inst.deadhead.distance.assign(static_cast<std::size_t>(n_loc) * n_loc, 0.0);
  for (int a = 0; a < n_loc; ++a)
    for (int b = 0; b < n_loc; ++b) {
      if (a == b) continue;
      double km = eucl_km(inst.locations[a], inst.locations[b]);
      inst.deadhead.distance[a * n_loc + b] = km;
      inst.deadhead.time[a * n_loc + b] =
          static_cast<Minute>(std::ceil(km * 60.0 / profile.speed_kmh));
    }

  // Trips: endpoints anywhere, departure in the service window, duration at
  // least the straight-line driving time, route length capped by the winding
  // factor so distances stay tied to the geography.
  struct Draft {
    int origin, destination;
    Minute begin, duration;
    double km;
  };
  std::vector<Draft> drafts;
  for (int t = 0; t < n_trips; ++t) {
    Draft d;
    d.origin = rng.uniform_int(0, n_loc - 1);
    do {
      d.destination = rng.uniform_int(0, n_loc - 1);
    } while (d.destination == d.origin);
    d.begin = profile.window_start + rng.uniform_int(0, profile.window_len - 1);
    d.duration = rng.uniform_int(profile.trip_min, profile.trip_max);
    double line = eucl_km(inst.locations[d.origin],
                          inst.locations[d.destination]);
    Minute line_time =
        static_cast<Minute>(std::ceil(line * 60.0 / profile.speed_kmh));
    d.duration = std::max(d.duration, line_time);
    double winding = rng.uniform_real(1.0, profile.winding_max);
    double drivable = d.duration * profile.speed_kmh / 60.0;
    d.km = std::max(line, std::min(drivable, line * winding));
    drafts.push_back(d);
  }
  std::sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    if (a.origin != b.origin) return a.origin < b.origin;
    return a.duration < b.duration;
  });
  for (int t = 0; t < n_trips; ++t) {
    const Draft& d = drafts[t];
    Trip trip;
    trip.id = t;
    trip.origin = d.origin;
    trip.destination = d.destination;
    trip.begin_time = d.begin;
    trip.end_time = d.begin + d.duration;
    trip.distance_km = d.km;
    inst.trips.push_back(trip);
  }

  // Horizon: start of the hour of the first departure, through the hour
  // after the last arrival plus one spare hour for pull-ins and end-of-day
  // charging.
  Minute first = inst.trips.front().begin_time;
  Minute last = 0;
  for (const auto& t : inst.trips) last = std::max(last, t.end_time);
  inst.horizon_start = (first / 60) * 60;
  inst.horizon_end = ((last + 59) / 60) * 60 + 60;

  for (int d = 0; d < profile.n_depots; ++d) {
    Depot dep;
    dep.id = d;
    dep.location = d;
    dep.vehicle_types.push_back(0);
    if (profile.two_vehicle_types) dep.vehicle_types.push_back(1);
    inst.depots.push_back(std::move(dep));
  }

  for (int s = 0; s < profile.n_stations; ++s) {
    ChargingStation st;
    st.id = s;
    st.location = profile.n_depots + s;
    st.capacity = profile.station_capacities[s];
    inst.stations.push_back(st);
  }

  // Standard 12m and 18m electric bus figures; kWh/min rates.
  VehicleType t1;
  t1.id = 0;
  t1.name = "type1";
  t1.battery_kwh = 155.0 * profile.battery_scale;
  t1.consumption_kwh_per_km = 1.3;
  t1.idle_kwh_per_min = 0.1002;
  t1.charge_kwh_per_min = 3.834 * profile.charge_rate_scale;
  t1.invest_cost = 5'000'000;
  t1.op_cost_per_km = 100;
  inst.vehicle_types.push_back(std::move(t1));
  if (profile.two_vehicle_types) {
    VehicleType t2;
    t2.id = 1;
    t2.name = "type2";
    t2.battery_kwh = 210.0 * profile.battery_scale;
    t2.consumption_kwh_per_km = 1.4;
    t2.idle_kwh_per_min = 0.1002;
    t2.charge_kwh_per_min = 5.334 * profile.charge_rate_scale;
    t2.invest_cost = 5'250'000;
    t2.op_cost_per_km = 105;
    inst.vehicle_types.push_back(std::move(t2));
  }

  inst.costs.energy_cost_per_kwh = 13.61;
  inst.costs.crew_cost_per_min = 67;
  inst.costs.charge_start_penalty = 1000;
  inst.costs.max_deadhead_min = profile.max_deadhead_min;
  inst.costs.max_idle_trip_min = profile.max_idle_trip_min;
  inst.costs.max_idle_charge_min = profile.max_idle_charge_min;

  inst.validate();
  return inst;
}

} // namespace evsp
