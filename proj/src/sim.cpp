#include "rss/sim.hpp"

#include <algorithm>

namespace rss {

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::time_limit: return "time-limit";
    case StopReason::delivered_target: return "delivered-target";
    case StopReason::drained: return "drained";
    case StopReason::stalled: return "stalled";
    case StopReason::event_limit: return "event-limit";
  }
  return "?";
}

namespace {

enum class Source { exogenous, deferred, endogenous, tick };

// H_k below this is treated as "a target is already reached"; no tick is
// scheduled because nothing would move before it fires
constexpr Seconds kMinTick = 1e-9;

}  // namespace

Simulator::Simulator(const RoadNetwork& net, std::vector<SimEvent> exogenous,
                     Controller& controller, SimOptions options, SimObserver* observer)
    : net_(net),
      controller_(controller),
      options_(options),
      observer_(observer),
      exogenous_(std::move(exogenous)) {
  std::stable_sort(exogenous_.begin(), exogenous_.end(), event_before);
  if (!exogenous_.empty()) state_.time = std::min(0.0, exogenous_.front().time);
}

Meters Simulator::stop_offset(const Vehicle& v, const Motion& m) const {
  const Meters len = net_.arc(m.arc).length_m;
  const GraphPoint& dest = v.control.destination;
  if (dest.arc == m.arc && dest.offset > m.offset) return dest.offset;
  return len;
}

void Simulator::advance_to(Seconds t) {
  const Seconds dt = t - state_.time;
  if (dt > 0.0) {
    for (auto& [id, m] : motion_) {
      if (m.speed == 0.0) continue;
      Vehicle& v = state_.vehicles.at(id);
      m.offset = std::min(stop_offset(v, m), m.offset + m.speed * dt);
      v.position = net_.point_on_arc(m.arc, m.offset);
    }
  }
  state_.time = t;
}

void Simulator::route(VehicleId id) {
  Vehicle& v = state_.vehicles.at(id);
  Motion& m = motion_.at(id);
  const GraphPoint here = net_.point_on_arc(m.arc, m.offset);
  const GraphPoint& dest = v.control.destination;
  if (dest == here) {
    m.speed = 0.0;
    return;
  }

  if (const auto at = net_.node_at(here); at && m.offset < net_.arc(m.arc).length_m) {
    // at a node: pick the first arc of a shortest path to the destination
    ArcIndex next;
    if (const auto dn = net_.node_at(dest)) {
      next = net_.next_arc(*at, *dn);
    } else {
      const NodeIndex tail = net_.arc(dest.arc).from;
      next = tail == *at ? dest.arc : net_.next_arc(*at, tail);
    }
    if (m.offset != 0.0 || next != m.arc || !m.factor_drawn) {
      m.arc = next;
      m.offset = 0.0;
      m.factor = 1.0;
      if (options_.random_speed) {
        std::uniform_real_distribution<double> draw(options_.speed_factor_lo, 1.0);
        m.factor = draw(m.rng);
      }
      m.factor_drawn = true;
    }
  }
  const Arc& arc = net_.arc(m.arc);
  m.speed = std::min(v.max_speed_mps, arc.speed_mps) * m.factor;
}

std::optional<SimEvent> Simulator::predict_next_endogenous(VehicleId id) const {
  const Vehicle& v = state_.vehicles.at(id);
  const Motion& m = motion_.at(id);
  const Control& c = v.control;

  auto target_event = [&](Seconds t) -> std::optional<SimEvent> {
    if (!c.target) return std::nullopt;
    const Passenger* p = state_.find_passenger(c.target->passenger);
    if (!p) return std::nullopt;
    if (c.target->kind == TargetKind::pickup) {
      if (p->status() == PassengerStatus::waiting && v.occupancy() < v.capacity &&
          p->origin() == c.destination) {
        return SimEvent::make_pickup(t, p->id(), v.id);
      }
    } else if (p->status() == PassengerStatus::onboard && p->vehicle() == v.id &&
               p->trip_destination() == c.destination) {
      return SimEvent::make_dropoff(t, p->id(), v.id);
    }
    return std::nullopt;
  };

  if (m.speed == 0.0) {
    if (net_.point_on_arc(m.arc, m.offset) == c.destination) return target_event(state_.time);
    return std::nullopt;
  }

  const Meters len = net_.arc(m.arc).length_m;
  const Meters stop = stop_offset(v, m);
  const Seconds t = state_.time + std::max(0.0, stop - m.offset) / m.speed;
  if (net_.point_on_arc(m.arc, stop) == c.destination) {
    if (auto ev = target_event(t)) return ev;
  }
  if (stop >= len) return SimEvent::make_node_arrival(t, net_.arc(m.arc).to, v.id);
  return std::nullopt;  // parks at an interior destination
}

std::optional<Simulator::Pending> Simulator::next_pending() const {
  std::optional<Pending> best;
  auto consider = [&](const SimEvent& ev) {
    if (!best || event_before(ev, *best->event)) best = Pending{ev, 0.0, false};
  };
  if (next_exogenous_ < exogenous_.size()) consider(exogenous_[next_exogenous_]);
  for (const auto& ev : deferred_) consider(ev);
  for (const auto& [id, m] : motion_) {
    if (auto ev = predict_next_endogenous(id)) consider(*ev);
  }
  if (replan_tick_ && (!best || *replan_tick_ < best->event->time)) {
    best = Pending{std::nullopt, *replan_tick_, true};
  }
  return best;
}

void Simulator::record(const SimEvent& ev) {
  log_.push_back(ev);
  if (observer_) observer_->on_event(state_, ev);
}

int Simulator::measured_deliveries() const {
  return static_cast<int>(state_.delivered.size()) - options_.stop.warmup;
}

bool Simulator::check_stop_after(const SimEvent& ev) {
  return ev.kind == EventKind::dropoff && options_.stop.delivered_target &&
         measured_deliveries() >= *options_.stop.delivered_target;
}

void Simulator::invoke_controller(const std::optional<SimEvent>& trigger) {
  Decision d = controller_.decide(state_, trigger);
  ++controller_calls_;
  for (const auto& [id, c] : d.controls) {
    if (auto it = state_.vehicles.find(id); it != state_.vehicles.end()) it->second.control = c;
  }
  for (const auto& [id, m] : motion_) route(id);

  replan_tick_.reset();
  if (options_.replan_ticks && d.planning_horizon && *d.planning_horizon > kMinTick) {
    replan_tick_ = state_.time + std::max(*d.planning_horizon, options_.min_replan_s);
  }
  if (observer_) observer_->on_decision(state_, trigger, d);
}

bool Simulator::step() {
  if (reason_) return false;
  if (processed_ >= options_.max_events) {
    reason_ = StopReason::event_limit;
    return false;
  }

  // locate the earliest pending item and remember where it came from
  const auto pending = next_pending();
  if (!pending) {
    reason_ = state_.passengers.empty() ? StopReason::drained : StopReason::stalled;
    return false;
  }
  const Seconds t = pending->is_tick ? pending->tick : pending->event->time;
  if (t > options_.stop.time_limit) {
    advance_to(std::max(state_.time, options_.stop.time_limit));
    reason_ = StopReason::time_limit;
    return false;
  }

  Source source = Source::tick;
  if (!pending->is_tick) {
    const SimEvent& ev = *pending->event;
    if (next_exogenous_ < exogenous_.size() &&
        compare_events(exogenous_[next_exogenous_], ev) == 0) {
      source = Source::exogenous;
    } else if (std::any_of(deferred_.begin(), deferred_.end(),
                           [&](const SimEvent& d) { return compare_events(d, ev) == 0; })) {
      source = Source::deferred;
    } else {
      source = Source::endogenous;
    }
  }

  advance_to(t);
  ++processed_;

  if (source == Source::tick) {
    invoke_controller(std::nullopt);
    return true;
  }

  const SimEvent ev = *pending->event;
  if (source == Source::exogenous) ++next_exogenous_;
  if (source == Source::deferred) {
    deferred_.erase(std::find_if(deferred_.begin(), deferred_.end(), [&](const SimEvent& d) {
      return compare_events(d, ev) == 0;
    }));
  }

  // a leave request waits until the vehicle is empty
  if (ev.kind == EventKind::leave) {
    auto it = state_.vehicles.find(ev.vehicle);
    if (it != state_.vehicles.end() && it->second.occupancy() > 0) {
      it->second.departing = true;
      invoke_controller(std::nullopt);
      return true;
    }
  }

  apply_event(net_, state_, ev);

  switch (ev.kind) {
    case EventKind::join: {
      const Vehicle& v = state_.vehicles.at(ev.vehicle);
      Motion m;
      m.arc = v.position.arc;
      m.offset = v.position.offset;
      std::seed_seq seq{static_cast<std::uint32_t>(options_.seed),
                        static_cast<std::uint32_t>(options_.seed >> 32),
                        static_cast<std::uint32_t>(raw(v.id))};
      m.rng.seed(seq);
      motion_.emplace(ev.vehicle, std::move(m));
      break;
    }
    case EventKind::leave:
      motion_.erase(ev.vehicle);
      break;
    case EventKind::pickup:
    case EventKind::dropoff:
    case EventKind::node_arrival: {
      const Vehicle& v = state_.vehicles.at(ev.vehicle);
      Motion& m = motion_.at(ev.vehicle);
      if (net_.node_at(v.position)) m.factor_drawn = false;
      m.arc = v.position.arc;
      m.offset = v.position.offset;
      m.speed = 0.0;
      break;
    }
    case EventKind::request:
      break;
  }
  record(ev);

  if (ev.kind == EventKind::dropoff) {
    const Vehicle& v = state_.vehicles.at(ev.vehicle);
    if (v.departing && v.occupancy() == 0) deferred_.push_back(SimEvent::make_leave(t, v.id));
  }

  if (check_stop_after(ev)) {
    reason_ = StopReason::delivered_target;
    return false;
  }

  if (ev.kind == EventKind::node_arrival && options_.zeta_mode == ZetaMode::vehicle_refresh) {
    route(ev.vehicle);
  } else {
    invoke_controller(ev);
  }
  return true;
}

RunResult Simulator::run() {
  while (step()) {
  }
  RunResult r;
  r.log = log_;
  r.final_state = state_;
  r.reason = *reason_;
  r.end_time = state_.time;
  r.controller_calls = controller_calls_;
  return r;
}

void Simulator::set_control(VehicleId v, const Control& c) {
  state_.vehicles.at(v).control = c;
  route(v);
}

double Simulator::current_speed(VehicleId v) const { return motion_.at(v).speed; }

RunResult run(const RoadNetwork& net, std::vector<SimEvent> exogenous, Controller& controller,
              const SimOptions& options, SimObserver* observer) {
  Simulator sim(net, std::move(exogenous), controller, options, observer);
  return sim.run();
}

}  // namespace rss
