#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rss/network.hpp"

namespace rss {

enum class PassengerId : std::int64_t {};
enum class VehicleId : std::int64_t {};

constexpr std::int64_t raw(PassengerId id) { return static_cast<std::int64_t>(id); }
constexpr std::int64_t raw(VehicleId id) { return static_cast<std::int64_t>(id); }

enum class TargetKind { pickup, dropoff };

/// A passenger-bound destination: o_i for a pickup, r_i for a drop-off.
struct Target {
  PassengerId passenger{};
  TargetKind kind = TargetKind::pickup;

  friend bool operator==(const Target&, const Target&) = default;
  friend auto operator<=>(const Target&, const Target&) = default;
};

/// Commanded destination u_j. `target` is set when the destination is a
/// passenger's pickup or drop-off point; otherwise the vehicle just drives to
/// `destination` (or stays put when it is already there).
struct Control {
  GraphPoint destination{};
  std::optional<Target> target;

  static Control idle_at(const GraphPoint& p) { return {p, std::nullopt}; }
  bool is_idle() const { return !target.has_value(); }

  friend bool operator==(const Control&, const Control&) = default;
};

enum class PassengerStatus { waiting, onboard, delivered };

/// Passenger record. Clocks are stored as origin timestamps: the clock z_i
/// runs from the request time while waiting and from the pickup time while
/// on board.
class Passenger {
 public:
  Passenger(PassengerId id, GraphPoint origin, GraphPoint destination, Seconds request_time)
      : id_(id), origin_(origin), destination_(destination), request_time_(request_time) {}

  PassengerId id() const { return id_; }
  const GraphPoint& origin() const { return origin_; }
  Seconds request_time() const { return request_time_; }
  PassengerStatus status() const { return status_; }
  std::optional<VehicleId> vehicle() const { return vehicle_; }
  std::optional<Seconds> pickup_time() const { return pickup_time_; }
  std::optional<Seconds> dropoff_time() const { return dropoff_time_; }

  /// Revealed destination; empty while the passenger is still waiting.
  std::optional<GraphPoint> destination() const {
    if (status_ == PassengerStatus::waiting) return std::nullopt;
    return destination_;
  }

  /// Trip destination regardless of status. Reserved for the simulator,
  /// event-log export and the insertion baseline, which plans whole trips.
  const GraphPoint& trip_destination() const { return destination_; }

  /// z_i(t)
  Seconds clock(Seconds t) const;

  /// w_i = rho - phi, once picked up.
  std::optional<Seconds> waiting_time() const;
  /// y_i = sigma - rho, once delivered.
  std::optional<Seconds> traveling_time() const;

  void board(VehicleId v, Seconds t);
  void alight(Seconds t);

 private:
  PassengerId id_;
  GraphPoint origin_;
  GraphPoint destination_;
  Seconds request_time_;
  PassengerStatus status_ = PassengerStatus::waiting;
  std::optional<VehicleId> vehicle_;
  std::optional<Seconds> pickup_time_;
  std::optional<Seconds> dropoff_time_;
};

struct Vehicle {
  VehicleId id{};
  GraphPoint position{};
  int capacity = 1;
  double max_speed_mps = 1.0;
  Control control{};
  std::vector<PassengerId> onboard;
  bool departing = false;  // a leave request is waiting for the vehicle to empty

  int occupancy() const { return static_cast<int>(onboard.size()); }
  bool full() const { return occupancy() >= capacity; }
  /// Can take another passenger now.
  bool can_pick_up() const { return !departing && !full(); }
};

/// Event alphabet, declared in tie-break rank order.
enum class EventKind {
  request,       // alpha_i
  join,          // beta_j
  leave,         // gamma_j
  pickup,        // pi_ij
  dropoff,       // delta_ij
  node_arrival,  // zeta_mj
};

std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);

struct RequestPayload {
  GraphPoint origin{};
  GraphPoint destination{};
};

struct JoinPayload {
  GraphPoint position{};
  int capacity = 1;
  double max_speed_mps = 1.0;
};

struct SimEvent {
  Seconds time = 0.0;
  EventKind kind = EventKind::request;
  PassengerId passenger{-1};
  VehicleId vehicle{-1};
  NodeIndex node = -1;
  std::optional<RequestPayload> request;  // alpha only
  std::optional<JoinPayload> join;        // beta only

  static SimEvent make_request(Seconds t, PassengerId p, GraphPoint origin, GraphPoint dest);
  static SimEvent make_join(Seconds t, VehicleId v, GraphPoint at, int capacity, double speed);
  static SimEvent make_leave(Seconds t, VehicleId v);
  static SimEvent make_pickup(Seconds t, PassengerId p, VehicleId v);
  static SimEvent make_dropoff(Seconds t, PassengerId p, VehicleId v);
  static SimEvent make_node_arrival(Seconds t, NodeIndex n, VehicleId v);
};

/// Deterministic total order: time, then kind rank, then subject ids.
std::strong_ordering compare_events(const SimEvent& a, const SimEvent& b);
inline bool event_before(const SimEvent& a, const SimEvent& b) {
  return compare_events(a, b) < 0;
}

struct SystemState {
  Seconds time = 0.0;
  std::map<VehicleId, Vehicle> vehicles;      // A(t)
  std::map<PassengerId, Passenger> passengers;  // P(t): waiting and on board
  std::vector<Passenger> delivered;           // archive, in delivery order

  const Vehicle* find_vehicle(VehicleId id) const;
  const Passenger* find_passenger(PassengerId id) const;
};

enum class GuardKind {
  capacity,
  wrong_state,
  nonzero_occupancy_departure,
  unknown_subject,
  duplicate_subject,
  time_reversal,
  missing_payload,
};

std::string_view to_string(GuardKind k);

class GuardViolation : public std::runtime_error {
 public:
  GuardViolation(GuardKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  GuardKind kind() const { return kind_; }

 private:
  GuardKind kind_;
};

/// Applies one event to the state. Guards are checked before anything is
/// modified, so a throwing call leaves the state untouched.
void apply_event(const RoadNetwork& net, SystemState& state, const SimEvent& ev);

/// Value-returning form.
SystemState applied(const RoadNetwork& net, SystemState state, const SimEvent& ev);

// Event-log text format, one event per line:
//   t_s,alpha,passenger,origin,destination
//   t_s,beta,vehicle,position,capacity,max_speed_mps
//   t_s,gamma,vehicle
//   t_s,pi,passenger,vehicle
//   t_s,delta,passenger,vehicle
//   t_s,zeta,node_id,vehicle
// Points are `n:<node id>` or `a:<arc id>:<offset m>`.

std::string format_point(const RoadNetwork& net, const GraphPoint& p);
GraphPoint parse_point(const RoadNetwork& net, std::string_view s);

std::string format_event(const RoadNetwork& net, const SimEvent& ev);
SimEvent parse_event(const RoadNetwork& net, std::string_view line);

void write_event_log(std::ostream& out, const RoadNetwork& net,
                     const std::vector<SimEvent>& events);
std::vector<SimEvent> read_event_log(std::istream& in, const RoadNetwork& net);

}  // namespace rss
