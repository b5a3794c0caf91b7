#include <algorithm>
#include <cmath>
#include <limits>

#include "rss/kernels.hpp"
#include "rss/rhc.hpp"
#include "values.hpp"

namespace rss::rhc {

namespace detail {

namespace {

struct Candidate {
  const Passenger* p;
  Target target;
  GraphPoint point;
};

// Greedy walk over the classes: at each position take the candidate with
// the highest V-bar from the previous stop, drawing from the first class
// that still has a candidate the vehicle can serve.
void walk(const Epoch& e, VehicleValues& values, std::vector<std::vector<Candidate>> pools,
          TourStop from, int occupancy, std::size_t chain, std::vector<TourStop>& out) {
  const Vehicle& v = values.vehicle();
  while (true) {
    const Candidate* pick = nullptr;
    std::size_t pick_class = 0;
    double pick_value = 0.0;
    for (std::size_t m = 0; m < pools.size() && !pick; ++m) {
      for (const auto& c : pools[m]) {
        // a pickup that would overfill the vehicle waits for a drop-off
        if (c.target.kind == TargetKind::pickup && occupancy >= v.capacity) continue;
        const double val = values.total(*c.p, from.point, from.eta);
        if (!pick || val > pick_value) {
          pick = &c;
          pick_value = val;
          pick_class = m;
        }
      }
    }
    if (!pick) return;

    TourStop stop{pick->target, pick->point,
                  from.eta + e.net.manhattan_distance(from.point, pick->point) / v.max_speed_mps,
                  chain};
    occupancy += pick->target.kind == TargetKind::pickup ? 1 : -1;
    out.push_back(stop);
    from = stop;
    auto& pool = pools[pick_class];
    pool.erase(pool.begin() + (pick - pool.data()));
  }
}

}  // namespace

Tour build_tour(const Epoch& e, VehicleValues& values, const Target& u,
                const PriorityClasses& classes) {
  const Vehicle& v = values.vehicle();
  Tour tour;
  tour.head.target = u;
  tour.head.point = target_point(e.state, u);
  tour.head.eta =
      e.now() + e.net.manhattan_distance(v.position, tour.head.point) / v.max_speed_mps;

  // target_for drops waiting passengers when the vehicle is full at t_k, so
  // a full vehicle only plans its own drop-offs
  std::vector<std::vector<Candidate>> pools(classes.size());
  for (std::size_t m = 0; m < classes.size(); ++m) {
    for (PassengerId pid : classes[m]) {
      if (pid == u.passenger) continue;
      const Passenger& p = e.state.passengers.at(pid);
      const auto t = target_for(p, v);
      if (!t) continue;
      pools[m].push_back({&p, *t, target_point(e.state, *t)});
    }
  }

  const int occupancy = v.occupancy() + (u.kind == TargetKind::pickup ? 1 : -1);
  if (e.cfg.priority_mode == PriorityMode::concatenate) {
    walk(e, values, std::move(pools), tour.head, occupancy, 0, tour.stops);
  } else {
    for (std::size_t m = 0; m < pools.size(); ++m) {
      std::vector<std::vector<Candidate>> single;
      single.push_back(std::move(pools[m]));
      walk(e, values, std::move(single), tour.head, occupancy, m, tour.stops);
    }
  }
  return tour;
}

}  // namespace detail

Tour order_and_time_tour(const Epoch& e, const Vehicle& v, const Target& u,
                         const PriorityClasses& classes) {
  detail::VehicleValues values(e, v);
  return detail::build_tour(e, values, u, classes);
}

double target_reward(const Epoch& e, const Target& t, Seconds eta) {
  const Passenger* p = e.state.find_passenger(t.passenger);
  if (!p) return 0.0;
  const Seconds horizon = e.cfg.reward_horizon;
  if (t.kind == TargetKind::pickup) {
    const Seconds w = std::clamp(eta - p->request_time(), 0.0, horizon);
    return e.cfg.mu_w() * (horizon - w);
  }
  if (!p->pickup_time()) return 0.0;
  const Seconds y = std::clamp(eta - *p->pickup_time(), 0.0, horizon);
  return e.cfg.mu_y() * (horizon - y);
}

double tour_reward(const Epoch& e, const Tour& tour) {
  double total = target_reward(e, tour.head.target, tour.head.eta);
  const double kappa = e.cfg.discount_rate();
  for (const auto& s : tour.stops) {
    total += std::exp(-kappa * (s.eta - e.now())) * target_reward(e, s.target, s.eta);
  }
  return total;
}

double joint_reward(const Epoch& e, const JointControl& u,
                    const std::map<VehicleId, PriorityClasses>& classes) {
  double total = 0.0;
  for (const auto& [vid, target] : u) {
    if (!target) continue;
    total += tour_reward(e, order_and_time_tour(e, e.state.vehicles.at(vid), *target,
                                                classes.at(vid)));
  }
  return total;
}

Pin threshold_update(const Epoch& e, PassengerId pid) {
  Pin pin;
  const Passenger* p = e.state.find_passenger(pid);
  if (!p || p->status() != PassengerStatus::waiting) return pin;
  pin.passenger = pid;
  for (const auto& [vid, v] : e.state.vehicles) {
    if (!v.can_pick_up()) continue;
    detail::VehicleValues values(e, v);
    const double gain = values.total(*p, v.position, e.now());
    double current = 0.0;
    if (const auto& t = v.control.target) {
      const Passenger* q = e.state.find_passenger(t->passenger);
      if (q && target_for(*q, v) == *t) current = values.total(*q, v.position, e.now());
    }
    if (gain - current > e.cfg.theta) {
      pin.vehicle = vid;
      break;
    }
  }
  return pin;
}

namespace {

constexpr std::int64_t kIdleKey = std::numeric_limits<std::int64_t>::max();

std::int64_t order_key(const Target& t) {
  return raw(t.passenger) * 2 + (t.kind == TargetKind::dropoff ? 1 : 0);
}

// Sweeps vehicles in id order, moving each to its best option given the
// others, until nothing changes or the sweep limit is hit.
std::vector<std::size_t> coordinate_ascent(const std::vector<kernels::SlotOptions>& slots,
                                           std::vector<std::size_t> choice) {
  constexpr int kMaxSweeps = 5;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool changed = false;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto& opt = slots[s];
      std::size_t best = choice[s];
      for (std::size_t o = 0; o < opt.value.size(); ++o) {
        const auto key = opt.conflict_key[o];
        bool taken = false;
        for (std::size_t r = 0; r < slots.size() && key >= 0; ++r) {
          if (r != s && slots[r].conflict_key[choice[r]] == key) taken = true;
        }
        if (taken) continue;
        if (opt.value[o] > opt.value[best] ||
            (opt.value[o] == opt.value[best] && opt.order_key[o] < opt.order_key[best])) {
          best = o;
        }
      }
      if (best != choice[s]) {
        choice[s] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return choice;
}

}  // namespace

PlanContext optimize(const Epoch& e, const Pin& pin) {
  PlanContext ctx;
  ctx.t_k = e.now();
  ctx.pin = pin;
  for (const auto& [vid, v] : e.state.vehicles) ctx.choice[vid] = std::nullopt;

  ctx.horizon = planning_horizon(e.net, e.state);
  if (!ctx.horizon) return ctx;
  const Seconds horizon = *ctx.horizon;
  ctx.classes = responsibility_partition(e);

  std::vector<VehicleId> ids;
  std::vector<kernels::SlotOptions> slots;
  std::vector<std::vector<std::optional<Target>>> options;
  std::vector<std::vector<Tour>> tours;

  for (const auto& [vid, v] : e.state.vehicles) {
    detail::VehicleValues values(e, v);
    ctx.reachable[vid] = reachable_set(e, v, horizon);
    auto active = detail::active_targets(e, values, horizon);

    const bool pinned = pin.vehicle && *pin.vehicle == vid;
    if (pin.passenger) {
      const Target fresh{*pin.passenger, TargetKind::pickup};
      std::erase(active, fresh);
      if (pinned) active = {fresh};
    }
    ctx.active[vid] = active;

    kernels::SlotOptions slot;
    std::vector<std::optional<Target>> opts;
    std::vector<Tour> vt;
    for (const auto& t : active) {
      Tour tour = detail::build_tour(e, values, t, ctx.classes.at(vid));
      slot.value.push_back(tour_reward(e, tour));
      slot.conflict_key.push_back(t.kind == TargetKind::pickup ? raw(t.passenger) : -1);
      slot.order_key.push_back(order_key(t));
      opts.emplace_back(t);
      vt.push_back(std::move(tour));
    }
    if (!pinned) {
      slot.value.push_back(0.0);
      slot.conflict_key.push_back(-1);
      slot.order_key.push_back(kIdleKey);
      opts.emplace_back(std::nullopt);
      vt.emplace_back();
    }
    ids.push_back(vid);
    slots.push_back(std::move(slot));
    options.push_back(std::move(opts));
    tours.push_back(std::move(vt));
  }

  kernels::SearchResult result;
  const auto cap = e.cfg.enumeration_cap;
  if (e.cfg.search == SearchMethod::exhaustive) {
    if (kernels::product_size(slots, cap) <= cap) {
      result = e.cfg.parallel ? kernels::exhaustive_search_parallel(slots)
                              : kernels::exhaustive_search_serial(slots);
    }
  } else {
    result = kernels::branch_and_bound_search(slots, cap);
  }

  std::vector<std::size_t> choice;
  if (result.found) {
    choice = result.choice;
    ctx.score = result.score;
  } else {
    ctx.exact = false;
    choice.assign(slots.size(), 0);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      choice[s] = slots[s].value.size() - 1;  // idle, or the pinned pickup
    }
    choice = coordinate_ascent(slots, std::move(choice));
    ctx.score = 0.0;
    for (std::size_t s = 0; s < slots.size(); ++s) ctx.score += slots[s].value[choice[s]];
  }

  for (std::size_t s = 0; s < ids.size(); ++s) {
    ctx.choice[ids[s]] = options[s][choice[s]];
    if (options[s][choice[s]]) ctx.tours[ids[s]] = tours[s][choice[s]];
  }
  return ctx;
}

}  // namespace rss::rhc
