#include <algorithm>
#include <stdexcept>

#include "rss/rhc.hpp"
#include "values.hpp"

namespace rss::rhc {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// The n targets nearest to `from`, ties by passenger id.
std::vector<PassengerId> nearest(const RoadNetwork& net, const GraphPoint& from,
                                 std::vector<std::pair<PassengerId, GraphPoint>> pool,
                                 int n) {
  if (n <= 0 || pool.empty()) return {};
  std::vector<std::pair<Meters, PassengerId>> ranked;
  ranked.reserve(pool.size());
  for (const auto& [id, pt] : pool) ranked.emplace_back(net.manhattan_distance(from, pt), id);
  const auto keep = std::min(ranked.size(), static_cast<std::size_t>(n));
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end());
  std::vector<PassengerId> out;
  out.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) out.push_back(ranked[k].second);
  return out;
}

}  // namespace

std::string_view to_string(PriorityMode m) {
  return m == PriorityMode::concatenate ? "concatenate" : "per-class";
}

PriorityMode parse_priority_mode(std::string_view s) {
  if (s == "concatenate") return PriorityMode::concatenate;
  if (s == "per-class") return PriorityMode::per_class;
  throw std::invalid_argument("unknown priority mode: " + std::string(s));
}

std::string_view to_string(SearchMethod m) {
  return m == SearchMethod::exhaustive ? "exhaustive" : "branch-and-bound";
}

SearchMethod parse_search_method(std::string_view s) {
  if (s == "exhaustive") return SearchMethod::exhaustive;
  if (s == "branch-and-bound") return SearchMethod::branch_and_bound;
  throw std::invalid_argument("unknown search method: " + std::string(s));
}

void RhcConfig::validate() const {
  require(omega >= 0.0 && omega <= 1.0, "rhc.omega must be in [0, 1]");
  require(mu >= 0.0 && mu <= 1.0, "rhc.mu must be in [0, 1]");
  require(w_max > 0.0, "rhc.w_max_s must be positive");
  require(y_max > 0.0, "rhc.y_max_s must be positive");
  require(theta >= 0.0, "rhc.theta must be non-negative");
  require(gamma >= 0.0 && gamma < 0.5, "rhc.gamma must be in [0, 0.5)");
  require(b >= 1, "rhc.b must be at least 1");
  require(!kappa || *kappa >= 0.0, "rhc.kappa must be non-negative");
  require(priority_depth >= 1, "rhc.priority_depth must be at least 1");
  require(enumeration_cap >= 1, "rhc.enumeration_cap must be at least 1");
  require(!diameter_m || *diameter_m > 0.0, "rhc.diameter_m must be positive");
  require(reward_horizon > 0.0, "rhc.reward_horizon_s must be positive");
}

std::optional<Target> target_for(const Passenger& p, const Vehicle& v) {
  if (p.status() == PassengerStatus::waiting) {
    if (v.can_pick_up()) return Target{p.id(), TargetKind::pickup};
    return std::nullopt;
  }
  if (p.status() == PassengerStatus::onboard && p.vehicle() == v.id) {
    return Target{p.id(), TargetKind::dropoff};
  }
  return std::nullopt;
}

GraphPoint target_point(const SystemState& state, const Target& t) {
  const Passenger* p = state.find_passenger(t.passenger);
  if (!p) throw std::out_of_range("target of unknown passenger");
  return t.kind == TargetKind::pickup ? p->origin() : p->trip_destination();
}

std::optional<Seconds> planning_horizon(const RoadNetwork& net, const SystemState& state) {
  std::optional<Seconds> best;
  for (const auto& [vid, v] : state.vehicles) {
    for (const auto& [pid, p] : state.passengers) {
      const auto t = target_for(p, v);
      if (!t) continue;
      const Seconds h = net.manhattan_distance(v.position, target_point(state, *t)) /
                        v.max_speed_mps;
      if (!best || h < *best) best = h;
    }
  }
  return best;
}

double travel_value(const Epoch& e, const Passenger& p, const Vehicle& v, const GraphPoint& x,
                    Seconds t) {
  const double mu = e.cfg.mu;
  if (p.status() == PassengerStatus::waiting) {
    const double elapsed = clamp01((t - p.request_time()) / e.cfg.w_max);
    const double near = clamp01((e.diameter - e.net.manhattan_distance(x, p.origin())) /
                                e.diameter);
    return (1.0 - mu) * elapsed + mu * near;
  }
  if (p.status() == PassengerStatus::onboard && p.vehicle() == v.id) {
    const double elapsed = clamp01((t - *p.pickup_time()) / e.cfg.y_max);
    const double near = clamp01(
        (e.diameter - e.net.manhattan_distance(x, p.trip_destination())) / e.diameter);
    return (1.0 - mu) * elapsed + mu * near;
  }
  return 0.0;
}

FutureSets candidate_future_sets(const Epoch& e, const Passenger& p, const Vehicle& v) {
  const auto t = target_for(p, v);
  if (!t) return {};
  const GraphPoint c = target_point(e.state, *t);
  const int free = v.capacity - v.occupancy();
  const int n = v.occupancy();
  const bool pickup = t->kind == TargetKind::pickup;

  std::vector<std::pair<PassengerId, GraphPoint>> waiting, riding;
  for (const auto& [pid, q] : e.state.passengers) {
    if (pid == p.id()) continue;
    if (q.status() == PassengerStatus::waiting) {
      waiting.emplace_back(pid, q.origin());
    } else if (q.status() == PassengerStatus::onboard && q.vehicle() == v.id) {
      riding.emplace_back(pid, q.trip_destination());
    }
  }

  FutureSets out;
  out.pickups = nearest(e.net, c, std::move(waiting), pickup ? free - 1 : free + 1);
  out.dropoffs = nearest(e.net, c, std::move(riding), pickup ? n + 1 : n - 1);
  return out;
}

double future_value(const Epoch& e, const FutureSets& sets, const Vehicle& v,
                    const GraphPoint& from, Seconds t) {
  double best = 0.0;
  for (const auto* ids : {&sets.pickups, &sets.dropoffs}) {
    for (PassengerId id : *ids) {
      best = std::max(best, travel_value(e, e.state.passengers.at(id), v, from, t));
    }
  }
  return best;
}

double total_travel_value(const Epoch& e, const Passenger& p, const Vehicle& v,
                          const GraphPoint& x, Seconds t) {
  detail::VehicleValues values(e, v);
  return values.total(p, x, t);
}

std::vector<GraphPoint> reachable_set(const Epoch& e, const Vehicle& v, Seconds horizon) {
  return e.net.reachable_points(v.position, v.max_speed_mps * horizon);
}

std::vector<Target> active_targets(const Epoch& e, const Vehicle& v, Seconds horizon) {
  detail::VehicleValues values(e, v);
  return detail::active_targets(e, values, horizon);
}

namespace detail {

const FutureSets& VehicleValues::sets(const Passenger& p) {
  auto it = sets_.find(p.id());
  if (it == sets_.end()) it = sets_.emplace(p.id(), candidate_future_sets(e_, p, v_)).first;
  return it->second;
}

double VehicleValues::total(const Passenger& p, const GraphPoint& x, Seconds t) {
  const double v = travel_value(e_, p, v_, x, t);
  const auto target = target_for(p, v_);
  if (!target) return v;
  return v + future_value(e_, sets(p), v_, target_point(e_.state, *target), t);
}

std::vector<Target> active_targets(const Epoch& e, VehicleValues& values, Seconds horizon) {
  const Vehicle& v = values.vehicle();
  const Seconds t = e.now() + horizon;

  // the follow-up term does not depend on the horizon point
  struct Entry {
    const Passenger* p;
    std::optional<Target> target;
    double bonus;
  };
  std::vector<Entry> entries;
  entries.reserve(e.state.passengers.size());
  for (const auto& [pid, p] : e.state.passengers) {
    const auto target = target_for(p, v);
    double bonus = 0.0;
    if (target) bonus = future_value(e, values.sets(p), v, target_point(e.state, *target), t);
    entries.push_back({&p, target, bonus});
  }
  if (entries.empty()) return {};

  auto argmax_at = [&](const GraphPoint& x, bool feasible_only) -> const Entry* {
    const Entry* best = nullptr;
    double best_value = 0.0;
    for (const auto& en : entries) {
      if (feasible_only && !en.target) continue;
      const double val = travel_value(e, *en.p, v, x, t) + en.bonus;
      if (!best || val > best_value) {
        best = &en;
        best_value = val;
      }
    }
    return best;
  };

  std::vector<Target> out;
  for (const auto& x : reachable_set(e, v, horizon)) {
    const Entry* best = argmax_at(x, false);
    if (best && best->target) out.push_back(*best->target);
  }
  if (out.empty()) {
    // every horizon maximizer is out of reach (e.g. a full vehicle drawn to
    // waiting passengers): fall back to the best target it can act on
    if (const Entry* best = argmax_at(v.position, true)) out.push_back(*best->target);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

}  // namespace rss::rhc
