#include "evsp/validator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evsp/network.hpp"

namespace evsp {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kSocEps = 1e-6;

// An anchor is one timetabled activity of a duty: a trip or one charging
// block. Everything between anchors (deadheads, idling) is implied by the
// anchor times and locations.
struct Anchor {
  NodeKind kind = NodeKind::TripNode;
  int trip = -1;
  int station = -1;
  int block = -1;
  SocTenths soc = 0;  // grid SoC entering the activity, refreshed on rebuild
  bool empty = false; // trip driven without passengers
};

struct Draft {
  int vehicle_type = -1;
  int depot = -1;
  std::vector<Anchor> anchors;
  bool dead = false;
};

struct Built {
  bool ok = false;
  Cents cost = 0.0;
  std::vector<DutyEvent> events;
};

Minute anchor_begin(const Instance& inst, const TimeBlocks& blocks,
                    const Anchor& a) {
  return a.kind == NodeKind::TripNode ? inst.trips[a.trip].begin_time
                                      : blocks.block_start(a.block);
}

Minute anchor_end(const Instance& inst, const TimeBlocks& blocks,
                  const Anchor& a) {
  return a.kind == NodeKind::TripNode ? inst.trips[a.trip].end_time
                                      : blocks.block_end(a.block);
}

int anchor_begin_loc(const Instance& inst, const Anchor& a) {
  return a.kind == NodeKind::TripNode
             ? inst.trips[a.trip].origin
             : inst.stations[a.station].location;
}

int anchor_end_loc(const Instance& inst, const Anchor& a) {
  return a.kind == NodeKind::TripNode
             ? inst.trips[a.trip].destination
             : inst.stations[a.station].location;
}

double rate_tenths_per_min(const VehicleType& vt) {
  return vt.charge_kwh_per_min * 1000.0 / vt.battery_kwh;
}

Cents event_cost(const DutyEvent& ev, const VehicleType& vt,
                 const CostParams& costs, bool starts_charge_run) {
  Minute dur = ev.end - ev.start;
  switch (ev.type) {
    case DutyEventType::PullOut:
    case DutyEventType::Deadhead:
    case DutyEventType::PullIn:
    case DutyEventType::Trip:
      return vt.op_cost_per_km * ev.km + costs.crew_cost_per_min * dur;
    case DutyEventType::Idle:
      return costs.crew_cost_per_min * dur;
    case DutyEventType::Charge:
      return costs.energy_cost_per_kwh * ev.kwh +
             (starts_charge_run ? costs.charge_start_penalty : 0.0);
  }
  return 0.0;
}

Cents cost_of_events(const std::vector<DutyEvent>& events,
                     const VehicleType& vt, const CostParams& costs) {
  Cents total = vt.invest_cost;
  bool prev_charge = false;
  for (const DutyEvent& ev : events) {
    bool is_charge = ev.type == DutyEventType::Charge;
    total += event_cost(ev, vt, costs, is_charge && !prev_charge);
    prev_charge = is_charge;
  }
  return total;
}

// Replays an anchor sequence from a full battery with conservative rounding,
// refreshing the anchors' grid SoC values and emitting the event list. ok is
// false when the sequence is not drivable (timing windows or the SoC floor).
// An empty sequence builds an empty, zero-cost duty (the bus stays home).
Built build_duty(const Instance& inst, const SocGrid& grid,
                 const TimeBlocks& blocks, int vt_id, int depot_id,
                 std::vector<Anchor>& anchors) {
  Built out;
  if (anchors.empty()) {
    out.ok = true;
    return out;
  }
  const VehicleType& vt = inst.vehicle_types[vt_id];
  const int depot_loc = inst.depots[depot_id].location;
  const double rate = rate_tenths_per_min(vt);
  const double kwh_per_tenth = vt.battery_kwh / 1000.0;

  auto move = [&](int from, int to) {
    return std::pair<Minute, double>{inst.deadhead.minutes(from, to),
                                     inst.deadhead.km(from, to)};
  };

  // Pull-out: leave the depot just in time for the first activity.
  {
    const Anchor& first = anchors.front();
    auto [dh_min, dh_km] = move(depot_loc, anchor_begin_loc(inst, first));
    if (dh_min > inst.costs.max_deadhead_min) return out;
    Minute depart = anchor_begin(inst, blocks, first) - dh_min;
    out.events.push_back({DutyEventType::PullOut, depart, depart + dh_min, -1,
                          -1, -1, dh_km,
                          -dh_km * vt.consumption_kwh_per_km, grid.s_full});
  }

  double carried = static_cast<double>(grid.s_full);
  SocTenths prev_grid = grid.s_full;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    Anchor& a = anchors[i];
    Minute begin = anchor_begin(inst, blocks, a);
    int begin_loc = anchor_begin_loc(inst, a);
    double raw;
    if (i == 0) {
      auto [dh_min, dh_km] = move(depot_loc, begin_loc);
      raw = grid.s_full - tau_soc(vt, dh_km, 0);
    } else {
      const Anchor& p = anchors[i - 1];
      Minute free_at = anchor_end(inst, blocks, p);
      int from_loc = anchor_end_loc(inst, p);
      auto [dh_min, dh_km] = move(from_loc, begin_loc);
      Minute idle = begin - free_at - dh_min;
      // Only waiting between two trips gets the long allowance; any leg
      // touching a charger uses the short one.
      Minute max_idle = (p.kind == NodeKind::TripNode &&
                         a.kind == NodeKind::TripNode)
                            ? inst.costs.max_idle_trip_min
                            : inst.costs.max_idle_charge_min;
      if (dh_min > inst.costs.max_deadhead_min || idle < 0 ||
          idle > max_idle)
        return out;
      double depart_soc = carried;
      if (p.kind == NodeKind::ChargeNode) {
        double gain = std::min(rate * blocks.length,
                               static_cast<double>(grid.s_full) - carried);
        depart_soc = carried + std::max(0.0, gain);
      } else {
        depart_soc = carried - tau_soc(vt, inst.trips[p.trip].distance_km, 0);
      }
      if (dh_min > 0 || dh_km > 0)
        out.events.push_back({DutyEventType::Deadhead, free_at,
                              free_at + dh_min, -1, -1, -1, dh_km,
                              -dh_km * vt.consumption_kwh_per_km, prev_grid});
      if (idle > 0)
        out.events.push_back({DutyEventType::Idle, free_at + dh_min, begin, -1,
                              -1, -1, 0.0, -idle * vt.idle_kwh_per_min,
                              prev_grid});
      raw = depart_soc - tau_soc(vt, dh_km, idle);
    }
    std::optional<SocTenths> snapped =
        round_soc(grid, RoundingMode::Conservative, raw);
    if (!snapped) return out;
    a.soc = *snapped;
    if (a.kind == NodeKind::TripNode) {
      const Trip& t = inst.trips[a.trip];
      double f = tau_soc(vt, t.distance_km, 0);
      if (a.soc < grid.s_min + f - kSocEps) return out;
      out.events.push_back({DutyEventType::Trip, t.begin_time, t.end_time,
                            t.id, -1, -1, t.distance_km,
                            -t.distance_km * vt.consumption_kwh_per_km,
                            a.soc});
    } else {
      double gain = std::max(
          0.0, std::min(rate * blocks.length,
                        static_cast<double>(grid.s_full) - a.soc));
      out.events.push_back({DutyEventType::Charge,
                            blocks.block_start(a.block),
                            blocks.block_end(a.block), -1, a.station, a.block,
                            0.0, gain * kwh_per_tenth, a.soc});
    }
    carried = a.soc;
    prev_grid = a.soc;
  }

  // Pull-in from the last activity; the continuous value must stay above the
  // floor but needs no grid point.
  {
    const Anchor& last = anchors.back();
    Minute free_at = anchor_end(inst, blocks, last);
    int from_loc = anchor_end_loc(inst, last);
    auto [dh_min, dh_km] = move(from_loc, depot_loc);
    if (dh_min > inst.costs.max_deadhead_min) return out;
    double depart_soc = carried;
    if (last.kind == NodeKind::ChargeNode) {
      double gain = std::min(rate * blocks.length,
                             static_cast<double>(grid.s_full) - carried);
      depart_soc = carried + std::max(0.0, gain);
    } else {
      depart_soc =
          carried - tau_soc(vt, inst.trips[last.trip].distance_km, 0);
    }
    if (depart_soc - tau_soc(vt, dh_km, 0) < grid.s_min - kSocEps) return out;
    out.events.push_back({DutyEventType::PullIn, free_at, free_at + dh_min,
                          -1, -1, -1, dh_km,
                          -dh_km * vt.consumption_kwh_per_km, prev_grid});
  }

  out.cost = cost_of_events(out.events, vt, inst.costs);
  out.ok = true;
  return out;
}

// Drops the trip from the anchor sequence; a sequence left without any trip
// collapses to the empty duty (its charging blocks served no purpose).
std::vector<Anchor> anchors_without_trip(const std::vector<Anchor>& anchors,
                                         int trip) {
  std::vector<Anchor> out;
  bool any_trip = false;
  for (const Anchor& a : anchors) {
    if (a.kind == NodeKind::TripNode && a.trip == trip) continue;
    if (a.kind == NodeKind::TripNode) any_trip = true;
    out.push_back(a);
  }
  if (!any_trip) out.clear();
  return out;
}

std::string event_type_name(DutyEventType t) {
  switch (t) {
    case DutyEventType::PullOut: return "pullout";
    case DutyEventType::Trip: return "trip";
    case DutyEventType::Deadhead: return "deadhead";
    case DutyEventType::Idle: return "idle";
    case DutyEventType::Charge: return "charge";
    case DutyEventType::PullIn: return "pullin";
  }
  return "?";
}

DutyEventType event_type_of(const std::string& s) {
  if (s == "pullout") return DutyEventType::PullOut;
  if (s == "trip") return DutyEventType::Trip;
  if (s == "deadhead") return DutyEventType::Deadhead;
  if (s == "idle") return DutyEventType::Idle;
  if (s == "charge") return DutyEventType::Charge;
  if (s == "pullin") return DutyEventType::PullIn;
  throw EvspError("unknown duty event type '" + s + "'");
}

} // namespace

Schedule realize(const Instance& inst, const std::vector<Column>& chosen,
                 const SocGrid& grid, const TimeBlocks& blocks) {
  std::vector<Draft> drafts;
  for (const Column& col : chosen) {
    if (col.is_dummy) continue;
    Draft d;
    d.vehicle_type = col.vehicle_type;
    d.depot = col.depot;
    for (const ColumnLeg& leg : col.legs)
      d.anchors.push_back(
          {leg.kind, leg.trip, leg.station, leg.block, leg.soc, false});
    drafts.push_back(std::move(d));
  }

  // Resolve trips covered more than once. For each such trip, removal is
  // tried in every holding duty; the trip stays (as revenue) in the duty
  // where removal saves the least, is removed where possible, and rides along
  // as empty running where removal would break the duty.
  for (const Trip& trip : inst.trips) {
    std::vector<int> holders;
    for (std::size_t d = 0; d < drafts.size(); ++d) {
      if (drafts[d].dead) continue;
      for (const Anchor& a : drafts[d].anchors)
        if (a.kind == NodeKind::TripNode && a.trip == trip.id && !a.empty)
          holders.push_back(static_cast<int>(d));
    }
    if (holders.size() < 2) continue;

    std::vector<int> stuck;                    // removal infeasible
    std::vector<std::pair<Cents, int>> moves;  // (savings, duty)
    std::vector<std::vector<Anchor>> candidates(drafts.size());
    for (int d : holders) {
      Draft& dr = drafts[static_cast<std::size_t>(d)];
      std::vector<Anchor> cur = dr.anchors;
      Built now = build_duty(inst, grid, blocks, dr.vehicle_type, dr.depot,
                             cur);
      std::vector<Anchor> cand = anchors_without_trip(dr.anchors, trip.id);
      Built after = build_duty(inst, grid, blocks, dr.vehicle_type, dr.depot,
                               cand);
      if (!now.ok)
        throw EvspError("realize: duty replay failed for trip " +
                        std::to_string(trip.id));
      if (after.ok) {
        moves.push_back({now.cost - after.cost, d});
        candidates[static_cast<std::size_t>(d)] = std::move(cand);
      } else {
        stuck.push_back(d);
      }
    }

    int keeper;
    if (!stuck.empty()) {
      // Some duty cannot shed the trip, so it drives it anyway; count the
      // passengers there and shed the trip everywhere else.
      keeper = stuck.front();
    } else {
      std::sort(moves.begin(), moves.end(),
                [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first < b.first;
                  return a.second < b.second;
                });
      keeper = moves.front().second;
    }
    for (int d : holders) {
      if (d == keeper) continue;
      Draft& dr = drafts[static_cast<std::size_t>(d)];
      bool removable =
          std::find(stuck.begin(), stuck.end(), d) == stuck.end();
      if (removable) {
        dr.anchors = std::move(candidates[static_cast<std::size_t>(d)]);
        if (dr.anchors.empty()) dr.dead = true;
      } else {
        for (Anchor& a : dr.anchors)
          if (a.kind == NodeKind::TripNode && a.trip == trip.id)
            a.empty = true;
      }
    }
  }

  Schedule sched;
  std::set<int> covered;
  for (Draft& dr : drafts) {
    if (dr.dead) continue;
    Built built = build_duty(inst, grid, blocks, dr.vehicle_type, dr.depot,
                             dr.anchors);
    if (!built.ok)
      throw EvspError("realize: final duty replay failed unexpectedly");
    Duty duty;
    duty.vehicle_type = dr.vehicle_type;
    duty.depot = dr.depot;
    duty.cost = built.cost;
    duty.events = std::move(built.events);
    for (const Anchor& a : dr.anchors) {
      if (a.kind == NodeKind::TripNode) {
        (a.empty ? duty.empty_trips : duty.trips).push_back(a.trip);
        if (!a.empty) covered.insert(a.trip);
      } else {
        duty.charge_uses.push_back(a.station * blocks.count + a.block);
      }
    }
    std::sort(duty.trips.begin(), duty.trips.end());
    std::sort(duty.empty_trips.begin(), duty.empty_trips.end());
    std::sort(duty.charge_uses.begin(), duty.charge_uses.end());
    sched.total_cost += duty.cost;
    for (const DutyEvent& ev : duty.events) {
      sched.total_km += ev.km;
      if (ev.type == DutyEventType::PullOut ||
          ev.type == DutyEventType::Deadhead ||
          ev.type == DutyEventType::PullIn)
        sched.total_deadhead_km += ev.km;
      if (ev.type == DutyEventType::Charge) sched.total_charge_kwh += ev.kwh;
    }
    sched.duties.push_back(std::move(duty));
  }
  sched.bus_count = static_cast<int>(sched.duties.size());
  for (const Trip& t : inst.trips)
    if (!covered.count(t.id)) sched.uncovered_trips.push_back(t.id);
  return sched;
}

SimVerdict simulate(const Schedule& schedule, const Instance& inst,
                    const SocGrid& grid, const TimeBlocks& blocks) {
  SimVerdict verdict;
  auto flag = [&](const std::string& msg) {
    verdict.violations.push_back(msg);
  };

  std::map<int, int> coverage;
  std::map<std::pair<int, int>, int> occupancy;
  Cents cost_sum = 0.0;

  for (std::size_t di = 0; di < schedule.duties.size(); ++di) {
    const Duty& duty = schedule.duties[di];
    const std::string tag = "duty " + std::to_string(di) + ": ";
    if (duty.vehicle_type < 0 ||
        duty.vehicle_type >= static_cast<int>(inst.vehicle_types.size())) {
      flag(tag + "unknown vehicle type");
      continue;
    }
    if (duty.depot < 0 ||
        duty.depot >= static_cast<int>(inst.depots.size())) {
      flag(tag + "unknown depot");
      continue;
    }
    const VehicleType& vt = inst.vehicle_types[duty.vehicle_type];
    const int depot_loc = inst.depots[duty.depot].location;
    const double rate = rate_tenths_per_min(vt);

    DutyTrace trace;
    trace.duty = static_cast<int>(di);

    for (int t : duty.trips) coverage[t] += 1;

    // Loaded schedules may list trips in any order.
    std::vector<int> revenue_trips = duty.trips;
    std::vector<int> empty_trips = duty.empty_trips;
    std::sort(revenue_trips.begin(), revenue_trips.end());
    std::sort(empty_trips.begin(), empty_trips.end());

    if (duty.events.empty()) {
      flag(tag + "no events");
      continue;
    }
    if (duty.events.front().type != DutyEventType::PullOut)
      flag(tag + "does not start with a pull-out");
    if (duty.events.back().type != DutyEventType::PullIn)
      flag(tag + "does not end with a pull-in");

    // Target of each movement: the next trip origin / charger, or the depot.
    auto target_loc = [&](std::size_t i) -> int {
      for (std::size_t j = i + 1; j < duty.events.size(); ++j) {
        const DutyEvent& ev = duty.events[j];
        if (ev.type == DutyEventType::Trip) return inst.trips[ev.trip].origin;
        if (ev.type == DutyEventType::Charge)
          return inst.stations[ev.station].location;
        if (ev.type == DutyEventType::Deadhead ||
            ev.type == DutyEventType::PullIn)
          break; // two movements in a row never happen in a valid duty
      }
      return depot_loc;
    };

    double s = static_cast<double>(grid.s_full); // continuous, tenths
    double g_raw = static_cast<double>(grid.s_full); // grid plan, unrounded
    int cur_loc = depot_loc;
    std::set<int> seen_trips;
    for (std::size_t i = 0; i < duty.events.size(); ++i) {
      const DutyEvent& ev = duty.events[i];
      const std::string etag =
          tag + event_type_name(ev.type) + " at " + std::to_string(ev.start) +
          ": ";
      if (i > 0 && ev.start != duty.events[i - 1].end)
        flag(etag + "timeline gap after previous event");
      if (ev.end < ev.start) flag(etag + "negative duration");
      trace.soc_in.push_back(s);
      trace.grid_soc.push_back(ev.grid_soc);
      switch (ev.type) {
        case DutyEventType::PullOut:
        case DutyEventType::Deadhead:
        case DutyEventType::PullIn: {
          int to = ev.type == DutyEventType::PullIn ? depot_loc
                                                    : target_loc(i);
          Minute want_min = inst.deadhead.minutes(cur_loc, to);
          double want_km = inst.deadhead.km(cur_loc, to);
          if (ev.end - ev.start != want_min)
            flag(etag + "duration differs from the deadhead matrix");
          if (std::abs(ev.km - want_km) > 1e-6)
            flag(etag + "distance differs from the deadhead matrix");
          if (want_min > inst.costs.max_deadhead_min)
            flag(etag + "deadhead longer than the allowed maximum");
          s -= tau_soc(vt, want_km, 0);
          g_raw -= tau_soc(vt, want_km, 0);
          cur_loc = to;
          break;
        }
        case DutyEventType::Idle: {
          if (ev.km != 0.0) flag(etag + "idle event with distance");
          Minute dur = ev.end - ev.start;
          s -= tau_soc(vt, 0, dur);
          g_raw -= tau_soc(vt, 0, dur);
          break;
        }
        case DutyEventType::Trip: {
          if (ev.trip < 0 || ev.trip >= static_cast<int>(inst.trips.size())) {
            flag(etag + "unknown trip");
            break;
          }
          const Trip& t = inst.trips[ev.trip];
          if (ev.start != t.begin_time || ev.end != t.end_time)
            flag(etag + "trip times differ from the timetable");
          if (cur_loc != t.origin)
            flag(etag + "bus is not at the trip origin");
          if (!seen_trips.insert(ev.trip).second)
            flag(etag + "trip driven twice in one duty");
          bool revenue = std::binary_search(revenue_trips.begin(),
                                            revenue_trips.end(), ev.trip);
          bool empty_run = std::binary_search(empty_trips.begin(),
                                              empty_trips.end(), ev.trip);
          if (!revenue && !empty_run)
            flag(etag + "trip event missing from the duty's trip lists");
          // grid_soc is the plan's SoC entering the trip; settle the rounding
          // loss first, then spend the trip's own energy.
          double loss = g_raw - ev.grid_soc;
          if (loss < -kSocEps)
            flag(etag + "planned SoC exceeds what the battery can hold");
          trace.discarded_tenths += std::max(0.0, loss);
          g_raw = ev.grid_soc;
          s -= tau_soc(vt, t.distance_km, 0);
          g_raw -= tau_soc(vt, t.distance_km, 0);
          cur_loc = t.destination;
          break;
        }
        case DutyEventType::Charge: {
          if (ev.station < 0 ||
              ev.station >= static_cast<int>(inst.stations.size())) {
            flag(etag + "unknown station");
            break;
          }
          if (inst.stations[ev.station].location != cur_loc)
            flag(etag + "bus is not at the charging station");
          if (ev.block < 0 || ev.block >= blocks.count ||
              ev.start != blocks.block_start(ev.block) ||
              ev.end != blocks.block_end(ev.block))
            flag(etag + "charge event not aligned to its time block");
          double loss = g_raw - ev.grid_soc;
          if (loss < -kSocEps)
            flag(etag + "planned SoC exceeds what the battery can hold");
          trace.discarded_tenths += std::max(0.0, loss);
          g_raw = ev.grid_soc;
          double gain = std::max(
              0.0, std::min(rate * (ev.end - ev.start),
                            static_cast<double>(grid.s_full) - s));
          double g_gain = std::max(
              0.0, std::min(rate * (ev.end - ev.start),
                            static_cast<double>(grid.s_full) - g_raw));
          if (ev.kwh + 1e-6 < gain * vt.battery_kwh / 1000.0)
            flag(etag + "charge event understates the energy received");
          s += gain;
          g_raw += g_gain;
          occupancy[{ev.station, ev.block}] += 1;
          break;
        }
      }
      if (s < grid.s_min - kSocEps)
        flag(etag + "state of charge below the floor");
      if (s > grid.s_full + kSocEps)
        flag(etag + "state of charge above full");
      trace.soc_out.push_back(s);
    }
    if (cur_loc != depot_loc) flag(tag + "does not return to the depot");

    Cents recomputed = cost_of_events(duty.events, vt, inst.costs);
    if (std::abs(recomputed - duty.cost) >
        std::max(0.01, 1e-9 * std::abs(recomputed)))
      flag(tag + "stored cost differs from the recomputed cost");
    cost_sum += duty.cost;
    verdict.traces.push_back(std::move(trace));
  }

  for (const Trip& t : inst.trips) {
    int c = coverage.count(t.id) ? coverage[t.id] : 0;
    if (c == 0)
      flag("trip " + std::to_string(t.id) + " is not covered");
    else if (c > 1)
      flag("trip " + std::to_string(t.id) + " is covered " +
           std::to_string(c) + " times");
  }
  for (const auto& [key, used] : occupancy) {
    int cap = inst.stations[key.first].capacity;
    if (used > cap)
      flag("station " + std::to_string(key.first) + " block " +
           std::to_string(key.second) + " holds " + std::to_string(used) +
           " buses, capacity " + std::to_string(cap));
  }
  if (std::abs(cost_sum - schedule.total_cost) >
      std::max(0.01, 1e-9 * std::abs(cost_sum)))
    flag("schedule total cost differs from the sum of duty costs");
  if (schedule.bus_count != static_cast<int>(schedule.duties.size()))
    flag("schedule bus count differs from the number of duties");

  verdict.feasible = verdict.violations.empty();
  return verdict;
}

std::string occupancy_csv(const Schedule& schedule, const Instance& inst,
                          const TimeBlocks& blocks) {
  std::map<std::pair<int, int>, int> used;
  for (const Duty& duty : schedule.duties)
    for (const DutyEvent& ev : duty.events)
      if (ev.type == DutyEventType::Charge)
        used[{ev.station, ev.block}] += 1;
  std::ostringstream os;
  os << "station,block_start,charging,capacity\n";
  for (const ChargingStation& st : inst.stations)
    for (int b = 0; b < blocks.count; ++b) {
      auto it = used.find({st.id, b});
      os << st.id << ',' << blocks.block_start(b) << ','
         << (it == used.end() ? 0 : it->second) << ',' << st.capacity << '\n';
    }
  return os.str();
}

std::string summarize(const Schedule& schedule, const Instance& inst) {
  std::ostringstream os;
  os.precision(2);
  os.setf(std::ios::fixed);
  int revenue = 0, empty = 0;
  double dh_min = 0, idle_min = 0, charge_min = 0;
  double min_soc_pct = 100.0;
  int min_soc_duty = -1;
  for (std::size_t di = 0; di < schedule.duties.size(); ++di) {
    const Duty& duty = schedule.duties[di];
    revenue += static_cast<int>(duty.trips.size());
    empty += static_cast<int>(duty.empty_trips.size());
    const VehicleType& vt = inst.vehicle_types[duty.vehicle_type];
    double kwh = vt.battery_kwh;
    for (const DutyEvent& ev : duty.events) {
      Minute dur = ev.end - ev.start;
      switch (ev.type) {
        case DutyEventType::PullOut:
        case DutyEventType::Deadhead:
        case DutyEventType::PullIn: dh_min += dur; break;
        case DutyEventType::Idle: idle_min += dur; break;
        case DutyEventType::Charge: charge_min += dur; break;
        default: break;
      }
      kwh += ev.kwh;
      kwh = std::min(kwh, vt.battery_kwh);
      double pct = 100.0 * kwh / vt.battery_kwh;
      if (pct < min_soc_pct) {
        min_soc_pct = pct;
        min_soc_duty = static_cast<int>(di);
      }
    }
  }
  int n = std::max<int>(1, schedule.bus_count);
  os << "buses: " << schedule.bus_count << "\n";
  os << "total cost: " << schedule.total_cost << " cents\n";
  os << "trips covered: " << revenue;
  if (empty > 0) os << " (plus " << empty << " driven empty)";
  os << "\n";
  if (!schedule.uncovered_trips.empty()) {
    os << "uncovered trips:";
    for (int t : schedule.uncovered_trips) os << ' ' << t;
    os << "\n";
  }
  os << "total km: " << schedule.total_km << " (deadhead "
     << schedule.total_deadhead_km << ")\n";
  os << "energy charged: " << schedule.total_charge_kwh << " kWh\n";
  os << "per duty: deadhead " << dh_min / n << " min, idle " << idle_min / n
     << " min, charging " << charge_min / n << " min\n";
  if (min_soc_duty >= 0)
    os << "lowest state of charge: " << min_soc_pct << "% (duty "
       << min_soc_duty << ")\n";
  return os.str();
}

std::string schedule_to_json(const Schedule& schedule) {
  ordered_json j;
  j["total_cost"] = schedule.total_cost;
  j["bus_count"] = schedule.bus_count;
  j["total_km"] = schedule.total_km;
  j["total_deadhead_km"] = schedule.total_deadhead_km;
  j["total_charge_kwh"] = schedule.total_charge_kwh;
  j["uncovered_trips"] = schedule.uncovered_trips;
  ordered_json duties = ordered_json::array();
  for (const Duty& duty : schedule.duties) {
    ordered_json d;
    d["vehicle_type"] = duty.vehicle_type;
    d["depot"] = duty.depot;
    d["cost"] = duty.cost;
    d["trips"] = duty.trips;
    d["empty_trips"] = duty.empty_trips;
    d["charge_uses"] = duty.charge_uses;
    ordered_json events = ordered_json::array();
    for (const DutyEvent& ev : duty.events) {
      ordered_json e;
      e["type"] = event_type_name(ev.type);
      e["start"] = ev.start;
      e["end"] = ev.end;
      e["trip"] = ev.trip;
      e["station"] = ev.station;
      e["block"] = ev.block;
      e["km"] = ev.km;
      e["kwh"] = ev.kwh;
      e["grid_soc"] = ev.grid_soc;
      events.push_back(std::move(e));
    }
    d["events"] = std::move(events);
    duties.push_back(std::move(d));
  }
  j["duties"] = std::move(duties);
  return j.dump(2) + "\n";
}

Schedule schedule_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw EvspError(std::string("schedule JSON parse error: ") + e.what());
  }
  try {
    Schedule s;
    s.total_cost = j.at("total_cost").get<double>();
    s.bus_count = j.at("bus_count").get<int>();
    s.total_km = j.at("total_km").get<double>();
    s.total_deadhead_km = j.at("total_deadhead_km").get<double>();
    s.total_charge_kwh = j.at("total_charge_kwh").get<double>();
    s.uncovered_trips = j.at("uncovered_trips").get<std::vector<int>>();
    for (const auto& d : j.at("duties")) {
      Duty duty;
      duty.vehicle_type = d.at("vehicle_type").get<int>();
      duty.depot = d.at("depot").get<int>();
      duty.cost = d.at("cost").get<double>();
      duty.trips = d.at("trips").get<std::vector<int>>();
      duty.empty_trips = d.at("empty_trips").get<std::vector<int>>();
      duty.charge_uses = d.at("charge_uses").get<std::vector<int>>();
      for (const auto& e : d.at("events")) {
        DutyEvent ev;
        ev.type = event_type_of(e.at("type").get<std::string>());
        ev.start = e.at("start").get<Minute>();
        ev.end = e.at("end").get<Minute>();
        ev.trip = e.at("trip").get<int>();
        ev.station = e.at("station").get<int>();
        ev.block = e.at("block").get<int>();
        ev.km = e.at("km").get<double>();
        ev.kwh = e.at("kwh").get<double>();
        ev.grid_soc = e.at("grid_soc").get<SocTenths>();
        duty.events.push_back(ev);
      }
      s.duties.push_back(std::move(duty));
    }
    return s;
  } catch (const ordered_json::exception& e) {
    throw EvspError(std::string("schedule JSON field error: ") + e.what());
  }
}

void save_schedule(const Schedule& schedule, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EvspError("cannot open '" + path + "' for writing");
  out << schedule_to_json(schedule);
  if (!out) throw EvspError("failed writing '" + path + "'");
}

Schedule load_schedule(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EvspError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return schedule_from_json(buf.str());
}

} // namespace evsp
