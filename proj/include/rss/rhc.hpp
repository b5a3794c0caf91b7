#pragma once

// Event-driven receding-horizon dispatch controller.
//
// At every decision epoch t_k the controller computes a planning horizon
// H_k (time for the nearest vehicle to reach its nearest valid target), the
// horizon points each vehicle can reach within H_k, the active targets that
// look best from those points, per-vehicle future tours built from
// responsibility classes, and finally the joint control maximizing immediate
// plus discounted future reward.

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "rss/sim.hpp"

namespace rss::rhc {

enum class PriorityMode {
  concatenate,  // one tour walks class 1, then 2, ... up to the depth
  per_class,    // one tour per class, each starting at the commanded target
};

enum class SearchMethod {
  branch_and_bound,  // exact, pruned depth-first search
  exhaustive,        // exact, full enumeration (OpenMP kernel)
};

std::string_view to_string(PriorityMode m);
PriorityMode parse_priority_mode(std::string_view s);
std::string_view to_string(SearchMethod m);
SearchMethod parse_search_method(std::string_view s);

struct RhcConfig {
  double omega = 0.5;           // weight of waiting vs traveling time
  double mu = 0.5;              // weight of distance vs elapsed time in travel values
  Seconds w_max = 2820.0;       // waiting-time bound
  Seconds y_max = 2820.0;       // traveling-time bound
  double theta = 0.3;           // switch threshold on new requests
  double gamma = 0.2;           // cooperation parameter, in [0, 0.5)
  int b = 3;                    // neighborhood size for relative distances
  std::optional<double> kappa;  // discount rate, default 1 / w_max
  int priority_depth = 3;       // number of responsibility classes M
  /// Joint choices beyond this fall back to coordinate ascent (it is also
  /// the node budget of the branch-and-bound search).
  std::uint64_t enumeration_cap = 1'000'000;
  std::optional<Meters> diameter_m;  // defaults to the network bound
  PriorityMode priority_mode = PriorityMode::concatenate;
  SearchMethod search = SearchMethod::branch_and_bound;
  bool parallel = true;              // exhaustive search on the OpenMP kernel
  Seconds reward_horizon = 18000.0;  // T in the per-target reward T - w

  double mu_w() const { return omega / w_max; }
  double mu_y() const { return (1.0 - omega) / y_max; }
  double discount_rate() const { return kappa.value_or(1.0 / w_max); }

  /// Throws std::invalid_argument naming the first field out of range.
  void validate() const;
};

/// Read-only inputs of one decision epoch.
struct Epoch {
  const RoadNetwork& net;
  const SystemState& state;
  const RhcConfig& cfg;
  Meters diameter;

  Epoch(const RoadNetwork& n, const SystemState& s, const RhcConfig& c)
      : net(n), state(s), cfg(c), diameter(c.diameter_m.value_or(n.diameter_distance())) {}
  Seconds now() const { return state.time; }
};

/// The target passenger `p` represents for vehicle `v`: its pickup if it is
/// waiting and `v` can take it, its drop-off if it rides `v`, otherwise none.
std::optional<Target> target_for(const Passenger& p, const Vehicle& v);

/// Location of a target (pickup origin or drop-off destination).
GraphPoint target_point(const SystemState& state, const Target& t);

/// H_k, or empty when no vehicle has a valid target.
std::optional<Seconds> planning_horizon(const RoadNetwork& net, const SystemState& state);

/// V_{i,j}(x, t), in [0, 2]; zero for passengers riding another vehicle.
double travel_value(const Epoch& e, const Passenger& p, const Vehicle& v, const GraphPoint& x,
                    Seconds t);

struct FutureSets {
  std::vector<PassengerId> pickups;   // nearest waiting passengers to c_i
  std::vector<PassengerId> dropoffs;  // nearest on-board drop-offs of the vehicle
};

/// Candidate next targets after reaching passenger `p`'s target. Empty when
/// `p` has no target for `v`.
FutureSets candidate_future_sets(const Epoch& e, const Passenger& p, const Vehicle& v);

/// The best travel value among `sets`, seen from `from` at time `t`.
double future_value(const Epoch& e, const FutureSets& sets, const Vehicle& v,
                    const GraphPoint& from, Seconds t);

/// V-bar_{i,j}(x, t): travel value plus the best follow-up value.
double total_travel_value(const Epoch& e, const Passenger& p, const Vehicle& v,
                          const GraphPoint& x, Seconds t);

/// Horizon points of the vehicle for horizon H.
std::vector<GraphPoint> reachable_set(const Epoch& e, const Vehicle& v, Seconds horizon);

/// S_j: targets that maximize V-bar at some horizon point, restricted to
/// targets the vehicle can act on. Sorted by (passenger, kind).
std::vector<Target> active_targets(const Epoch& e, const Vehicle& v, Seconds horizon);

/// p(d-bar) for a relative distance d-bar in [0, 1].
double responsibility(double relative_distance, double gamma);

/// Relative distances of every vehicle to one point, by vehicle id order of
/// `state.vehicles`. Vehicles outside the b-neighborhood get 1.
std::map<VehicleId, double> relative_distances(const Epoch& e, const GraphPoint& target);

double relative_responsibility(const Epoch& e, const GraphPoint& target, VehicleId v);

/// Responsibility classes of one vehicle: classes[m] holds passengers of
/// priority m + 1, ascending ids.
using PriorityClasses = std::vector<std::vector<PassengerId>>;

/// Every waiting passenger is ranked across vehicles by responsibility
/// (higher first, smaller vehicle id on ties) and lands in class m of the
/// vehicle ranked m, for m up to the priority depth. On-board passengers
/// sit in class 1 of their own vehicle.
std::map<VehicleId, PriorityClasses> responsibility_partition(const Epoch& e);

struct TourStop {
  Target target;
  GraphPoint point;
  Seconds eta = 0.0;
  /// Chain the stop belongs to: always 0 when classes are concatenated, the
  /// class index in per-class mode where every class restarts at the head.
  std::size_t chain = 0;
};

struct Tour {
  TourStop head;                // the commanded target
  std::vector<TourStop> stops;  // estimated future visits
};

/// Orders the vehicle's responsibility classes behind commanded target `u`
/// and estimates arrival times.
Tour order_and_time_tour(const Epoch& e, const Vehicle& v, const Target& u,
                         const PriorityClasses& classes);

/// Reward of visiting `t` at `eta`: mu_w (T - w) or mu_y (T - y) with the
/// estimated time clamped to [0, T].
double target_reward(const Epoch& e, const Target& t, Seconds eta);

/// Immediate reward of the head plus discounted rewards of the stops.
double tour_reward(const Epoch& e, const Tour& tour);

/// A choice per vehicle; empty = idle.
using JointControl = std::map<VehicleId, std::optional<Target>>;

/// Immediate plus estimated future reward of a joint control, summed over
/// vehicles. Idle vehicles contribute nothing.
double joint_reward(const Epoch& e, const JointControl& u,
                    const std::map<VehicleId, PriorityClasses>& classes);

/// Restrictions applied on a request event after the switch test.
struct Pin {
  std::optional<VehicleId> vehicle;      // vehicle forced onto the new pickup
  std::optional<PassengerId> passenger;  // the new passenger
};

/// Switch test on request of passenger `p`: the first vehicle (by id) with
/// room whose V-bar gain of the new pickup over its current target exceeds
/// theta takes it.
Pin threshold_update(const Epoch& e, PassengerId p);

struct PlanContext {
  Seconds t_k = 0.0;
  std::optional<Seconds> horizon;
  std::map<VehicleId, std::vector<GraphPoint>> reachable;
  std::map<VehicleId, std::vector<Target>> active;
  std::map<VehicleId, PriorityClasses> classes;
  std::map<VehicleId, Tour> tours;  // tours of the chosen targets
  JointControl choice;
  double score = 0.0;
  bool exact = true;  // false when coordinate ascent was used
  Pin pin;
};

/// One full planning pass. Without a horizon every vehicle idles.
PlanContext optimize(const Epoch& e, const Pin& pin = {});

class RhcController final : public Controller {
 public:
  RhcController(const RoadNetwork& net, RhcConfig cfg);

  std::string_view name() const override { return "rhc"; }
  Decision decide(const SystemState& state, const std::optional<SimEvent>& trigger) override;

  const PlanContext& last_plan() const { return last_; }
  const RhcConfig& config() const { return cfg_; }

 private:
  const RoadNetwork& net_;
  RhcConfig cfg_;
  PlanContext last_;
};

}  // namespace rss::rhc
