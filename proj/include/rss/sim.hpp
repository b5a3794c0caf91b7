#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "rss/domain.hpp"

namespace rss {

/// Joint control returned by a controller at one invocation.
struct Decision {
  std::map<VehicleId, Control> controls;  // vehicles not listed keep theirs
  std::optional<Seconds> planning_horizon;  // H_k, when the controller has one
};

/// Dispatch policy invoked by the simulator after every event and at re-plan
/// ticks (`trigger` is empty for a tick).
class Controller {
 public:
  virtual ~Controller() = default;
  virtual std::string_view name() const = 0;
  virtual Decision decide(const SystemState& state, const std::optional<SimEvent>& trigger) = 0;
};

/// Optional hooks for tests and tracing.
class SimObserver {
 public:
  virtual ~SimObserver() = default;
  /// After an event has been applied, before the controller runs.
  virtual void on_event(const SystemState& /*state*/, const SimEvent& /*ev*/) {}
  virtual void on_decision(const SystemState& /*state*/,
                           const std::optional<SimEvent>& /*trigger*/,
                           const Decision& /*decision*/) {}
};

enum class ZetaMode {
  full_replan,      // node arrivals invoke the controller like any event
  vehicle_refresh,  // node arrivals only re-route the arriving vehicle
};

struct StopRule {
  Seconds time_limit = 18000.0;
  /// Stop once this many passengers have been delivered after warm-up.
  std::optional<int> delivered_target;
  /// Deliveries excluded from metrics before measurement starts.
  int warmup = 0;
};

struct SimOptions {
  StopRule stop;
  bool random_speed = false;
  double speed_factor_lo = 0.8;
  std::uint64_t seed = 0;
  ZetaMode zeta_mode = ZetaMode::full_replan;
  bool replan_ticks = true;
  /// Shortest gap between a decision and its re-plan tick. An idle vehicle
  /// parked just short of a target keeps H_k near zero and would otherwise
  /// re-plan thousands of times per simulated second.
  Seconds min_replan_s = 1.0;
  std::size_t max_events = 5'000'000;
};

enum class StopReason { time_limit, delivered_target, drained, stalled, event_limit };
std::string_view to_string(StopReason r);

struct RunResult {
  std::vector<SimEvent> log;
  SystemState final_state;
  StopReason reason = StopReason::drained;
  Seconds end_time = 0.0;
  std::size_t controller_calls = 0;
};

/// Discrete-event engine. Vehicles follow shortest paths toward their
/// commanded destination at min(max speed, arc limit) times an optional
/// per-arc random factor; pickups and drop-offs fire only when the commanded
/// target is reached and the event guard holds.
class Simulator {
 public:
  Simulator(const RoadNetwork& net, std::vector<SimEvent> exogenous, Controller& controller,
            SimOptions options, SimObserver* observer = nullptr);

  /// Processes the next event. Returns false once a stop rule fired.
  bool step();
  RunResult run();

  const SystemState& state() const { return state_; }
  const std::vector<SimEvent>& log() const { return log_; }
  bool finished() const { return reason_.has_value(); }

  /// Next pickup, drop-off or node arrival of this vehicle under its
  /// current control and motion, or empty for a vehicle at rest.
  std::optional<SimEvent> predict_next_endogenous(VehicleId v) const;

  /// Overrides a control and re-routes the vehicle (tests, tooling).
  void set_control(VehicleId v, const Control& c);

  /// Current speed of a vehicle along its arc (0 when at rest).
  double current_speed(VehicleId v) const;

 private:
  struct Motion {
    ArcIndex arc = 0;       // arc being traversed, or any out-arc at a node
    Meters offset = 0.0;    // raw offset along `arc`
    double speed = 0.0;     // 0 = at rest
    double factor = 1.0;    // random speed factor of the current arc
    bool factor_drawn = false;
    std::mt19937_64 rng;
  };

  struct Pending {
    std::optional<SimEvent> event;
    Seconds tick = 0.0;
    bool is_tick = false;
  };

  void advance_to(Seconds t);
  void route(VehicleId v);
  void invoke_controller(const std::optional<SimEvent>& trigger);
  std::optional<Pending> next_pending() const;
  void record(const SimEvent& ev);
  bool check_stop_after(const SimEvent& ev);
  Meters stop_offset(const Vehicle& v, const Motion& m) const;
  int measured_deliveries() const;

  const RoadNetwork& net_;
  Controller& controller_;
  SimOptions options_;
  SimObserver* observer_;

  std::vector<SimEvent> exogenous_;  // sorted, consumed from `next_exogenous_`
  std::size_t next_exogenous_ = 0;
  std::vector<SimEvent> deferred_;  // leave events released once a vehicle empties

  SystemState state_;
  std::map<VehicleId, Motion> motion_;
  std::vector<SimEvent> log_;
  std::optional<Seconds> replan_tick_;
  std::optional<StopReason> reason_;
  std::size_t controller_calls_ = 0;
  std::size_t processed_ = 0;
};

RunResult run(const RoadNetwork& net, std::vector<SimEvent> exogenous, Controller& controller,
              const SimOptions& options, SimObserver* observer = nullptr);

}  // namespace rss
