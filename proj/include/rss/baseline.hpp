#pragma once

// Greedy insertion dispatch: each new request is inserted, pickup and
// drop-off together, at the cheapest position of any vehicle's committed
// stop sequence. Sequences are executed first to last.

#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "rss/sim.hpp"

namespace rss::baseline {

struct Stop {
  PassengerId passenger{};
  TargetKind kind = TargetKind::pickup;

  friend bool operator==(const Stop&, const Stop&) = default;
};

using DestinationSequence = std::vector<Stop>;

/// Location of a stop. Reads trip destinations directly: the baseline plans
/// whole trips at request time.
GraphPoint stop_point(const SystemState& state, const Stop& s);

/// Driving time from the vehicle's position through every stop in order.
Seconds sequence_time(const RoadNetwork& net, const SystemState& state, const Vehicle& v,
                      const DestinationSequence& seq);

/// Running occupancy never exceeds capacity and every drop-off follows its
/// pickup (or the passenger is already on board).
bool sequence_feasible(const SystemState& state, const Vehicle& v,
                       const DestinationSequence& seq);

/// `seq` with the pickup inserted at index `pickup_slot` and then the
/// drop-off inserted at index `dropoff_slot` of the grown sequence.
DestinationSequence with_insertion(const DestinationSequence& seq, PassengerId p,
                                   std::size_t pickup_slot, std::size_t dropoff_slot);

struct Insertion {
  VehicleId vehicle{};
  std::size_t pickup_slot = 0;
  std::size_t dropoff_slot = 0;
  Seconds cost = 0.0;  // increase of the sequence's driving time
};

/// Cheapest feasible insertion of waiting passenger `p` over all vehicles
/// that can take passengers; ties go to the smaller vehicle id, then the
/// earlier pickup slot, then the earlier drop-off slot.
std::optional<Insertion> best_insertion(const RoadNetwork& net, const SystemState& state,
                                        const std::map<VehicleId, DestinationSequence>& plans,
                                        PassengerId p);

class GreedyInsertionController final : public Controller {
 public:
  explicit GreedyInsertionController(const RoadNetwork& net) : net_(net) {}

  std::string_view name() const override { return "gh"; }
  Decision decide(const SystemState& state, const std::optional<SimEvent>& trigger) override;

  const std::map<VehicleId, DestinationSequence>& sequences() const { return plans_; }
  /// Requests that found no feasible insertion yet, oldest first.
  const std::deque<PassengerId>& queue() const { return queue_; }

 private:
  void sync(const SystemState& state);
  bool try_assign(const SystemState& state, PassengerId p);
  void retry_queue(const SystemState& state);

  const RoadNetwork& net_;
  std::map<VehicleId, DestinationSequence> plans_;
  std::deque<PassengerId> queue_;
};

}  // namespace rss::baseline
