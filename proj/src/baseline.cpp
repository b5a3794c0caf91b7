#include "rss/baseline.hpp"

#include <algorithm>

namespace rss::baseline {

GraphPoint stop_point(const SystemState& state, const Stop& s) {
  const Passenger& p = state.passengers.at(s.passenger);
  return s.kind == TargetKind::pickup ? p.origin() : p.trip_destination();
}

Seconds sequence_time(const RoadNetwork& net, const SystemState& state, const Vehicle& v,
                      const DestinationSequence& seq) {
  Meters total = 0.0;
  GraphPoint at = v.position;
  for (const auto& s : seq) {
    const GraphPoint next = stop_point(state, s);
    total += net.manhattan_distance(at, next);
    at = next;
  }
  return total / v.max_speed_mps;
}

bool sequence_feasible(const SystemState& state, const Vehicle& v,
                       const DestinationSequence& seq) {
  int load = v.occupancy();
  std::vector<PassengerId> aboard = v.onboard;
  for (const auto& s : seq) {
    if (s.kind == TargetKind::pickup) {
      const Passenger* p = state.find_passenger(s.passenger);
      if (!p || p->status() != PassengerStatus::waiting) return false;
      if (++load > v.capacity) return false;
      aboard.push_back(s.passenger);
    } else {
      const auto it = std::find(aboard.begin(), aboard.end(), s.passenger);
      if (it == aboard.end()) return false;
      aboard.erase(it);
      --load;
    }
  }
  return true;
}

DestinationSequence with_insertion(const DestinationSequence& seq, PassengerId p,
                                   std::size_t pickup_slot, std::size_t dropoff_slot) {
  DestinationSequence out = seq;
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(pickup_slot), {p, TargetKind::pickup});
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(dropoff_slot), {p, TargetKind::dropoff});
  return out;
}

std::optional<Insertion> best_insertion(const RoadNetwork& net, const SystemState& state,
                                        const std::map<VehicleId, DestinationSequence>& plans,
                                        PassengerId p) {
  std::optional<Insertion> best;
  static const DestinationSequence kEmpty;
  for (const auto& [vid, v] : state.vehicles) {
    if (v.departing) continue;
    const auto it = plans.find(vid);
    const DestinationSequence& seq = it == plans.end() ? kEmpty : it->second;
    const Seconds base = sequence_time(net, state, v, seq);
    for (std::size_t a = 0; a <= seq.size(); ++a) {
      for (std::size_t b = a + 1; b <= seq.size() + 1; ++b) {
        const auto cand = with_insertion(seq, p, a, b);
        if (!sequence_feasible(state, v, cand)) continue;
        const Seconds cost = sequence_time(net, state, v, cand) - base;
        if (!best || cost < best->cost) best = Insertion{vid, a, b, cost};
      }
    }
  }
  return best;
}

void GreedyInsertionController::sync(const SystemState& state) {
  // drop vehicles that left; their passengers were all delivered
  for (auto it = plans_.begin(); it != plans_.end();) {
    it = state.vehicles.contains(it->first) ? std::next(it) : plans_.erase(it);
  }
  for (const auto& [vid, v] : state.vehicles) {
    auto& seq = plans_[vid];
    std::vector<PassengerId> released;
    std::erase_if(seq, [&](const Stop& s) {
      const Passenger* p = state.find_passenger(s.passenger);
      if (!p) return true;
      if (s.kind == TargetKind::pickup) {
        if (p->status() != PassengerStatus::waiting) return true;
        if (v.departing) {
          released.push_back(s.passenger);
          return true;
        }
        return false;
      }
      if (p->status() == PassengerStatus::onboard) return p->vehicle() != v.id;
      // drop-off of a passenger still waiting: keep unless released above
      return std::find(released.begin(), released.end(), s.passenger) != released.end();
    });
    for (PassengerId p : released) queue_.push_back(p);
  }
  std::erase_if(queue_, [&](PassengerId p) {
    const Passenger* q = state.find_passenger(p);
    return !q || q->status() != PassengerStatus::waiting;
  });
}

bool GreedyInsertionController::try_assign(const SystemState& state, PassengerId p) {
  const auto ins = best_insertion(net_, state, plans_, p);
  if (!ins) return false;
  auto& seq = plans_[ins->vehicle];
  seq = with_insertion(seq, p, ins->pickup_slot, ins->dropoff_slot);
  return true;
}

void GreedyInsertionController::retry_queue(const SystemState& state) {
  std::deque<PassengerId> still;
  for (PassengerId p : queue_) {
    if (!try_assign(state, p)) still.push_back(p);
  }
  queue_ = std::move(still);
}

Decision GreedyInsertionController::decide(const SystemState& state,
                                           const std::optional<SimEvent>& trigger) {
  const std::size_t queued_before = queue_.size();
  sync(state);
  if (queue_.size() > queued_before) retry_queue(state);  // released by a departing vehicle

  if (trigger) {
    switch (trigger->kind) {
      case EventKind::request:
        if (const Passenger* p = state.find_passenger(trigger->passenger);
            p && p->status() == PassengerStatus::waiting && !try_assign(state, p->id())) {
          queue_.push_back(p->id());
        }
        break;
      case EventKind::dropoff:
      case EventKind::join:
        retry_queue(state);
        break;
      default:
        break;
    }
  }

  Decision d;
  for (const auto& [vid, v] : state.vehicles) {
    const auto& seq = plans_[vid];
    if (seq.empty()) {
      d.controls[vid] = Control::idle_at(v.position);
    } else {
      d.controls[vid] = Control{stop_point(state, seq.front()),
                                Target{seq.front().passenger, seq.front().kind}};
    }
  }
  return d;
}

}  // namespace rss::baseline
