#include "rss/domain.hpp"

#include <algorithm>

namespace rss {

Seconds Passenger::clock(Seconds t) const {
  switch (status_) {
    case PassengerStatus::waiting:
      return t - request_time_;
    case PassengerStatus::onboard:
      return t - *pickup_time_;
    case PassengerStatus::delivered:
      return *dropoff_time_ - *pickup_time_;
  }
  return 0.0;
}

std::optional<Seconds> Passenger::waiting_time() const {
  if (!pickup_time_) return std::nullopt;
  return *pickup_time_ - request_time_;
}

std::optional<Seconds> Passenger::traveling_time() const {
  if (!dropoff_time_) return std::nullopt;
  return *dropoff_time_ - *pickup_time_;
}

void Passenger::board(VehicleId v, Seconds t) {
  status_ = PassengerStatus::onboard;
  vehicle_ = v;
  pickup_time_ = t;
}

void Passenger::alight(Seconds t) {
  status_ = PassengerStatus::delivered;
  dropoff_time_ = t;
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::request: return "alpha";
    case EventKind::join: return "beta";
    case EventKind::leave: return "gamma";
    case EventKind::pickup: return "pi";
    case EventKind::dropoff: return "delta";
    case EventKind::node_arrival: return "zeta";
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (auto k : {EventKind::request, EventKind::join, EventKind::leave, EventKind::pickup,
                 EventKind::dropoff, EventKind::node_arrival}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view to_string(GuardKind k) {
  switch (k) {
    case GuardKind::capacity: return "capacity";
    case GuardKind::wrong_state: return "wrong-state";
    case GuardKind::nonzero_occupancy_departure: return "nonzero-occupancy-departure";
    case GuardKind::unknown_subject: return "unknown-subject";
    case GuardKind::duplicate_subject: return "duplicate-subject";
    case GuardKind::time_reversal: return "time-reversal";
    case GuardKind::missing_payload: return "missing-payload";
  }
  return "?";
}

SimEvent SimEvent::make_request(Seconds t, PassengerId p, GraphPoint origin, GraphPoint dest) {
  SimEvent e;
  e.time = t;
  e.kind = EventKind::request;
  e.passenger = p;
  e.request = RequestPayload{origin, dest};
  return e;
}

SimEvent SimEvent::make_join(Seconds t, VehicleId v, GraphPoint at, int capacity, double speed) {
  SimEvent e;
  e.time = t;
  e.kind = EventKind::join;
  e.vehicle = v;
  e.join = JoinPayload{at, capacity, speed};
  return e;
}

SimEvent SimEvent::make_leave(Seconds t, VehicleId v) {
  SimEvent e;
  e.time = t;
  e.kind = EventKind::leave;
  e.vehicle = v;
  return e;
}

SimEvent SimEvent::make_pickup(Seconds t, PassengerId p, VehicleId v) {
  SimEvent e;
  e.time = t;
  e.kind = EventKind::pickup;
  e.passenger = p;
  e.vehicle = v;
  return e;
}

SimEvent SimEvent::make_dropoff(Seconds t, PassengerId p, VehicleId v) {
  SimEvent e;
  e.time = t;
  e.kind = EventKind::dropoff;
  e.passenger = p;
  e.vehicle = v;
  return e;
}

SimEvent SimEvent::make_node_arrival(Seconds t, NodeIndex n, VehicleId v) {
  SimEvent e;
  e.time = t;
  e.kind = EventKind::node_arrival;
  e.vehicle = v;
  e.node = n;
  return e;
}

std::strong_ordering compare_events(const SimEvent& a, const SimEvent& b) {
  if (a.time < b.time) return std::strong_ordering::less;
  if (b.time < a.time) return std::strong_ordering::greater;
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  if (auto c = a.vehicle <=> b.vehicle; c != 0) return c;
  if (auto c = a.passenger <=> b.passenger; c != 0) return c;
  return a.node <=> b.node;
}

const Vehicle* SystemState::find_vehicle(VehicleId id) const {
  const auto it = vehicles.find(id);
  return it == vehicles.end() ? nullptr : &it->second;
}

const Passenger* SystemState::find_passenger(PassengerId id) const {
  const auto it = passengers.find(id);
  return it == passengers.end() ? nullptr : &it->second;
}

namespace {

[[noreturn]] void violate(GuardKind kind, const SimEvent& ev, std::string_view detail) {
  throw GuardViolation(kind, std::string(to_string(ev.kind)) + " at t=" +
                                 std::to_string(ev.time) + ": " + std::string(detail));
}

Vehicle& vehicle_or_throw(SystemState& s, const SimEvent& ev) {
  const auto it = s.vehicles.find(ev.vehicle);
  if (it == s.vehicles.end()) violate(GuardKind::unknown_subject, ev, "no such vehicle");
  return it->second;
}

Passenger& passenger_or_throw(SystemState& s, const SimEvent& ev) {
  const auto it = s.passengers.find(ev.passenger);
  if (it == s.passengers.end()) violate(GuardKind::unknown_subject, ev, "no such passenger");
  return it->second;
}

bool ever_seen(const SystemState& s, PassengerId id) {
  if (s.passengers.count(id)) return true;
  return std::any_of(s.delivered.begin(), s.delivered.end(),
                     [id](const Passenger& p) { return p.id() == id; });
}

}  // namespace

void apply_event(const RoadNetwork& net, SystemState& state, const SimEvent& ev) {
  if (ev.time < state.time) violate(GuardKind::time_reversal, ev, "event precedes state clock");

  switch (ev.kind) {
    case EventKind::request: {
      if (!ev.request) violate(GuardKind::missing_payload, ev, "request without trip");
      if (ever_seen(state, ev.passenger)) {
        violate(GuardKind::duplicate_subject, ev, "passenger id already used");
      }
      state.passengers.emplace(ev.passenger, Passenger(ev.passenger, ev.request->origin,
                                                       ev.request->destination, ev.time));
      break;
    }
    case EventKind::join: {
      if (!ev.join) violate(GuardKind::missing_payload, ev, "join without vehicle spec");
      if (state.vehicles.count(ev.vehicle)) {
        violate(GuardKind::duplicate_subject, ev, "vehicle already present");
      }
      if (ev.join->capacity < 1 || !(ev.join->max_speed_mps > 0.0)) {
        violate(GuardKind::wrong_state, ev, "vehicle needs capacity >= 1 and positive speed");
      }
      Vehicle v;
      v.id = ev.vehicle;
      v.position = ev.join->position;
      v.capacity = ev.join->capacity;
      v.max_speed_mps = ev.join->max_speed_mps;
      // initial control: the closest intersection ahead
      const auto at = net.node_at(v.position);
      v.control = Control::idle_at(at ? v.position : net.node_point(net.arc(v.position.arc).to));
      state.vehicles.emplace(v.id, std::move(v));
      break;
    }
    case EventKind::leave: {
      const Vehicle& v = vehicle_or_throw(state, ev);
      if (v.occupancy() != 0) {
        violate(GuardKind::nonzero_occupancy_departure, ev, "vehicle still carries passengers");
      }
      state.vehicles.erase(ev.vehicle);
      break;
    }
    case EventKind::pickup: {
      Vehicle& v = vehicle_or_throw(state, ev);
      Passenger& p = passenger_or_throw(state, ev);
      if (p.status() != PassengerStatus::waiting) {
        violate(GuardKind::wrong_state, ev, "passenger is not waiting");
      }
      if (v.occupancy() >= v.capacity) violate(GuardKind::capacity, ev, "vehicle is full");
      p.board(v.id, ev.time);
      v.onboard.push_back(p.id());
      v.position = p.origin();
      break;
    }
    case EventKind::dropoff: {
      Vehicle& v = vehicle_or_throw(state, ev);
      Passenger& p = passenger_or_throw(state, ev);
      if (p.status() != PassengerStatus::onboard || p.vehicle() != v.id) {
        violate(GuardKind::wrong_state, ev, "passenger is not on board this vehicle");
      }
      p.alight(ev.time);
      v.onboard.erase(std::find(v.onboard.begin(), v.onboard.end(), p.id()));
      v.position = p.trip_destination();
      state.delivered.push_back(p);
      state.passengers.erase(ev.passenger);
      break;
    }
    case EventKind::node_arrival: {
      Vehicle& v = vehicle_or_throw(state, ev);
      if (ev.node < 0 || static_cast<std::size_t>(ev.node) >= net.node_count()) {
        violate(GuardKind::unknown_subject, ev, "no such node");
      }
      v.position = net.node_point(ev.node);
      break;
    }
  }
  state.time = ev.time;
}

SystemState applied(const RoadNetwork& net, SystemState state, const SimEvent& ev) {
  apply_event(net, state, ev);
  return state;
}

}  // namespace rss
