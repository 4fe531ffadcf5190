#include "evsp/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace evsp {

using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw EvspError(msg); }

void check(bool ok, const std::string& msg) {
  if (!ok) fail(msg);
}

} // namespace

void Instance::validate() const {
  const int n_loc = static_cast<int>(locations.size());
  check(!locations.empty(), "instance has no locations");
  check(!trips.empty(), "instance has no trips");
  check(!depots.empty(), "instance has no depots");
  check(!vehicle_types.empty(), "instance has no vehicle types");
  check(horizon_start < horizon_end, "instance horizon is empty");

  for (int i = 0; i < n_loc; ++i) {
    const auto& loc = locations[i];
    check(loc.id == i, "location ids must equal their index; got id " +
                           std::to_string(loc.id) + " at index " +
                           std::to_string(i));
    if (loc.station) {
      int s = *loc.station;
      check(s >= 0 && s < static_cast<int>(stations.size()) &&
                stations[s].location == i,
            "location " + std::to_string(i) +
                " references station " + std::to_string(s) +
                " which does not point back");
    }
  }

  for (std::size_t i = 0; i < trips.size(); ++i) {
    const auto& t = trips[i];
    std::string tag = "trip " + std::to_string(t.id);
    check(t.id == static_cast<int>(i), "trip ids must equal their index");
    check(t.origin >= 0 && t.origin < n_loc, tag + " has a bad origin");
    check(t.destination >= 0 && t.destination < n_loc,
          tag + " has a bad destination");
    check(t.begin_time < t.end_time, tag + " ends before it begins");
    check(t.distance_km > 0.0, tag + " has non-positive distance");
    check(t.begin_time >= horizon_start && t.end_time <= horizon_end,
          tag + " lies outside the horizon");
  }

  for (std::size_t i = 0; i < stations.size(); ++i) {
    const auto& st = stations[i];
    std::string tag = "station " + std::to_string(st.id);
    check(st.id == static_cast<int>(i), "station ids must equal their index");
    check(st.location >= 0 && st.location < n_loc, tag + " has a bad location");
    check(locations[st.location].station == static_cast<int>(i),
          tag + "'s location does not point back at it");
    check(st.capacity >= 1, tag + " has capacity < 1");
  }

  for (std::size_t i = 0; i < depots.size(); ++i) {
    const auto& d = depots[i];
    std::string tag = "depot " + std::to_string(d.id);
    check(d.id == static_cast<int>(i), "depot ids must equal their index");
    check(d.location >= 0 && d.location < n_loc, tag + " has a bad location");
    check(locations[d.location].is_depot,
          tag + "'s location is not marked as a depot");
    check(!d.vehicle_types.empty(), tag + " houses no vehicle types");
    for (int vt : d.vehicle_types)
      check(vt >= 0 && vt < static_cast<int>(vehicle_types.size()),
            tag + " references unknown vehicle type " + std::to_string(vt));
  }

  for (std::size_t i = 0; i < vehicle_types.size(); ++i) {
    const auto& vt = vehicle_types[i];
    std::string tag = "vehicle type " + std::to_string(vt.id);
    check(vt.id == static_cast<int>(i),
          "vehicle type ids must equal their index");
    check(vt.battery_kwh > 0.0, tag + " has non-positive battery");
    check(vt.consumption_kwh_per_km > 0.0, tag + " has non-positive consumption");
    check(vt.charge_kwh_per_min > 0.0, tag + " has non-positive charge rate");
    check(vt.idle_kwh_per_min >= 0.0, tag + " has negative idle draw");
    check(vt.invest_cost > 0.0, tag + " has non-positive pull-out cost");
    check(vt.op_cost_per_km >= 0.0, tag + " has negative km cost");
  }

  check(deadhead.n == n_loc, "deadhead matrix size does not match locations");
  check(deadhead.time.size() == static_cast<std::size_t>(n_loc) * n_loc &&
            deadhead.distance.size() == static_cast<std::size_t>(n_loc) * n_loc,
        "deadhead matrix arrays have the wrong length");
  for (int a = 0; a < n_loc; ++a) {
    check(deadhead.minutes(a, a) == 0 && deadhead.km(a, a) == 0.0,
          "deadhead diagonal must be zero at location " + std::to_string(a));
    for (int b = 0; b < n_loc; ++b) {
      check(deadhead.minutes(a, b) >= 0 && deadhead.km(a, b) >= 0.0,
            "negative deadhead between locations " + std::to_string(a) +
                " and " + std::to_string(b));
    }
  }

  // Each trip must be pullable from some depot within the deadhead limit,
  // otherwise no duty can ever cover it.
  for (const auto& t : trips) {
    bool ok = false;
    for (const auto& d : depots)
      if (deadhead.minutes(d.location, t.origin) <= costs.max_deadhead_min)
        ok = true;
    check(ok, "trip " + std::to_string(t.id) +
                  " is out of deadhead range of every depot");
  }

  check(costs.energy_cost_per_kwh >= 0.0, "negative energy cost");
  check(costs.crew_cost_per_min >= 0.0, "negative crew cost");
  check(costs.charge_start_penalty >= 0.0, "negative charge start penalty");
  check(costs.max_deadhead_min > 0, "max deadhead must be positive");
  check(costs.max_idle_trip_min >= 0, "negative idle-before-trip limit");
  check(costs.max_idle_charge_min >= 0, "negative idle-before-charge limit");
}

double soc_of_energy(const VehicleType& vt, double kwh) {
  return 100.0 * kwh / vt.battery_kwh;
}

double soc_tenths_of_energy(const VehicleType& vt, double kwh) {
  return 1000.0 * kwh / vt.battery_kwh;
}

namespace {

long long as_cents(Cents c, const std::string& what) {
  double r = std::round(c);
  if (std::abs(c - r) > 1e-6)
    fail(what + " is not an integer number of cents");
  return static_cast<long long>(r);
}

ordered_json location_to_json(const Location& l) {
  ordered_json j;
  j["id"] = l.id;
  j["name"] = l.name;
  j["x_km"] = l.x_km;
  j["y_km"] = l.y_km;
  j["is_depot"] = l.is_depot;
  if (l.station) j["station"] = *l.station;
  return j;
}

} // namespace

std::string instance_to_json(const Instance& inst) {
  ordered_json j;
  j["name"] = inst.name;
  j["horizon"] = {{"start", inst.horizon_start}, {"end", inst.horizon_end}};

  j["locations"] = ordered_json::array();
  for (const auto& l : inst.locations)
    j["locations"].push_back(location_to_json(l));

  j["trips"] = ordered_json::array();
  for (const auto& t : inst.trips) {
    ordered_json tj;
    tj["id"] = t.id;
    tj["origin"] = t.origin;
    tj["destination"] = t.destination;
    tj["begin"] = t.begin_time;
    tj["end"] = t.end_time;
    tj["distance_km"] = t.distance_km;
    j["trips"].push_back(tj);
  }

  j["depots"] = ordered_json::array();
  for (const auto& d : inst.depots) {
    ordered_json dj;
    dj["id"] = d.id;
    dj["location"] = d.location;
    dj["vehicle_types"] = d.vehicle_types;
    j["depots"].push_back(dj);
  }

  j["stations"] = ordered_json::array();
  for (const auto& s : inst.stations) {
    ordered_json sj;
    sj["id"] = s.id;
    sj["location"] = s.location;
    sj["capacity"] = s.capacity;
    j["stations"].push_back(sj);
  }

  j["vehicle_types"] = ordered_json::array();
  for (const auto& v : inst.vehicle_types) {
    ordered_json vj;
    vj["id"] = v.id;
    vj["name"] = v.name;
    vj["battery_kwh"] = v.battery_kwh;
    vj["consumption_kwh_per_km"] = v.consumption_kwh_per_km;
    vj["idle_kwh_per_min"] = v.idle_kwh_per_min;
    vj["charge_kwh_per_min"] = v.charge_kwh_per_min;
    vj["invest_cost_cents"] = as_cents(v.invest_cost, "invest cost");
    vj["op_cost_cents_per_km"] = as_cents(v.op_cost_per_km, "km cost");
    j["vehicle_types"].push_back(vj);
  }

  // Energy price lives in cents per MWh so that everyday prices like
  // 13.61 ct/kWh still serialize as integers.
  ordered_json cj;
  cj["energy_cost_cents_per_mwh"] =
      as_cents(inst.costs.energy_cost_per_kwh * 1000.0, "energy cost");
  cj["crew_cost_cents_per_min"] =
      as_cents(inst.costs.crew_cost_per_min, "crew cost");
  cj["charge_start_penalty_cents"] =
      as_cents(inst.costs.charge_start_penalty, "charge start penalty");
  cj["max_deadhead_min"] = inst.costs.max_deadhead_min;
  cj["max_idle_trip_min"] = inst.costs.max_idle_trip_min;
  cj["max_idle_charge_min"] = inst.costs.max_idle_charge_min;
  j["costs"] = cj;

  ordered_json mj;
  mj["n"] = inst.deadhead.n;
  mj["time_min"] = inst.deadhead.time;
  mj["distance_km"] = inst.deadhead.distance;
  j["deadhead"] = mj;

  return j.dump(2) + "\n";
}

namespace {

// Wraps json access so a malformed file reports which field is broken
// instead of a bare type error.
template <typename T>
T get(const ordered_json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const std::exception&) {
    fail(where + ": field '" + key + "' has the wrong type");
  }
}

} // namespace

Instance instance_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    fail(std::string("instance is not valid JSON: ") + e.what());
  }

  Instance inst;
  inst.name = get<std::string>(j, "name", "instance");
  const auto& hj = j.at("horizon");
  inst.horizon_start = get<Minute>(hj, "start", "horizon");
  inst.horizon_end = get<Minute>(hj, "end", "horizon");

  for (const auto& lj : j.at("locations")) {
    Location l;
    l.id = get<int>(lj, "id", "location");
    std::string where = "location " + std::to_string(l.id);
    l.name = get<std::string>(lj, "name", where);
    l.x_km = get<double>(lj, "x_km", where);
    l.y_km = get<double>(lj, "y_km", where);
    l.is_depot = get<bool>(lj, "is_depot", where);
    if (lj.contains("station")) l.station = get<int>(lj, "station", where);
    inst.locations.push_back(std::move(l));
  }

  for (const auto& tj : j.at("trips")) {
    Trip t;
    t.id = get<int>(tj, "id", "trip");
    std::string where = "trip " + std::to_string(t.id);
    t.origin = get<int>(tj, "origin", where);
    t.destination = get<int>(tj, "destination", where);
    t.begin_time = get<Minute>(tj, "begin", where);
    t.end_time = get<Minute>(tj, "end", where);
    t.distance_km = get<double>(tj, "distance_km", where);
    inst.trips.push_back(t);
  }

  for (const auto& dj : j.at("depots")) {
    Depot d;
    d.id = get<int>(dj, "id", "depot");
    std::string where = "depot " + std::to_string(d.id);
    d.location = get<int>(dj, "location", where);
    d.vehicle_types = get<std::vector<int>>(dj, "vehicle_types", where);
    inst.depots.push_back(std::move(d));
  }

  for (const auto& sj : j.at("stations")) {
    ChargingStation s;
    s.id = get<int>(sj, "id", "station");
    std::string where = "station " + std::to_string(s.id);
    s.location = get<int>(sj, "location", where);
    s.capacity = get<int>(sj, "capacity", where);
    inst.stations.push_back(s);
  }

  for (const auto& vj : j.at("vehicle_types")) {
    VehicleType v;
    v.id = get<int>(vj, "id", "vehicle type");
    std::string where = "vehicle type " + std::to_string(v.id);
    v.name = get<std::string>(vj, "name", where);
    v.battery_kwh = get<double>(vj, "battery_kwh", where);
    v.consumption_kwh_per_km = get<double>(vj, "consumption_kwh_per_km", where);
    v.idle_kwh_per_min = get<double>(vj, "idle_kwh_per_min", where);
    v.charge_kwh_per_min = get<double>(vj, "charge_kwh_per_min", where);
    v.invest_cost = static_cast<Cents>(
        get<long long>(vj, "invest_cost_cents", where));
    v.op_cost_per_km = static_cast<Cents>(
        get<long long>(vj, "op_cost_cents_per_km", where));
    inst.vehicle_types.push_back(std::move(v));
  }

  const auto& cj = j.at("costs");
  inst.costs.energy_cost_per_kwh = static_cast<Cents>(get<long long>(
                                       cj, "energy_cost_cents_per_mwh",
                                       "costs")) /
                                   1000.0;
  inst.costs.crew_cost_per_min = static_cast<Cents>(
      get<long long>(cj, "crew_cost_cents_per_min", "costs"));
  inst.costs.charge_start_penalty = static_cast<Cents>(
      get<long long>(cj, "charge_start_penalty_cents", "costs"));
  inst.costs.max_deadhead_min = get<Minute>(cj, "max_deadhead_min", "costs");
  inst.costs.max_idle_trip_min = get<Minute>(cj, "max_idle_trip_min", "costs");
  inst.costs.max_idle_charge_min =
      get<Minute>(cj, "max_idle_charge_min", "costs");

  const auto& mj = j.at("deadhead");
  inst.deadhead.n = get<int>(mj, "n", "deadhead");
  inst.deadhead.time = get<std::vector<Minute>>(mj, "time_min", "deadhead");
  inst.deadhead.distance =
      get<std::vector<double>>(mj, "distance_km", "deadhead");

  inst.validate();
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write instance file: " + path);
  out << instance_to_json(inst);
}

} // namespace evsp
