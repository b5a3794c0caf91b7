#include <doctest.h>

#include <functional>

#include "rss/sim.hpp"

using namespace rss;

namespace {

const RoadNetwork& grid() {
  static const RoadNetwork net = make_grid({3, 3, 100, 10, GridScheme::two_way});
  return net;
}

GraphPoint node(int n) { return grid().node_point(n); }

struct Scripted final : Controller {
  using Fn = std::function<Decision(const SystemState&, const std::optional<SimEvent>&)>;
  explicit Scripted(Fn f) : fn(std::move(f)) {}
  std::string_view name() const override { return "scripted"; }
  Decision decide(const SystemState& s, const std::optional<SimEvent>& ev) override {
    ++calls;
    if (!ev) ++ticks;
    return fn(s, ev);
  }
  Fn fn;
  int calls = 0;
  int ticks = 0;
};

// serve passengers one at a time: drop off whoever is aboard, else fetch the
// lowest waiting id
Decision serve_one(const SystemState& s, const std::optional<SimEvent>&) {
  Decision d;
  for (const auto& [vid, v] : s.vehicles) {
    if (!v.onboard.empty()) {
      const Passenger& p = s.passengers.at(v.onboard.front());
      d.controls[vid] = Control{p.trip_destination(), Target{p.id(), TargetKind::dropoff}};
      continue;
    }
    for (const auto& [pid, p] : s.passengers) {
      if (p.status() == PassengerStatus::waiting) {
        d.controls[vid] = Control{p.origin(), Target{pid, TargetKind::pickup}};
        break;
      }
    }
  }
  return d;
}

Decision keep(const SystemState&, const std::optional<SimEvent>&) { return {}; }

SimOptions opts(double time_limit = 1000) {
  SimOptions o;
  o.stop.time_limit = time_limit;
  return o;
}

std::vector<SimEvent> of_kind(const std::vector<SimEvent>& log, EventKind k) {
  std::vector<SimEvent> out;
  for (const auto& e : log)
    if (e.kind == k) out.push_back(e);
  return out;
}

}  // namespace

TEST_CASE("single trip kinematics") {
  Scripted c(serve_one);
  const auto r = run(grid(),
                     {SimEvent::make_join(0, VehicleId{1}, node(0), 4, 10),
                      SimEvent::make_request(1, PassengerId{1}, node(0), node(8))},
                     c, opts());
  const auto picks = of_kind(r.log, EventKind::pickup);
  const auto drops = of_kind(r.log, EventKind::dropoff);
  REQUIRE(picks.size() == 1);
  REQUIRE(drops.size() == 1);
  CHECK(picks[0].time == 1.0);
  CHECK(drops[0].time == doctest::Approx(1.0 + 400.0 / 10.0));
  CHECK(r.reason == StopReason::drained);
  // node arrivals along the way, each 10 s apart
  const auto zetas = of_kind(r.log, EventKind::node_arrival);
  CHECK(zetas.size() == 3);
  for (std::size_t k = 0; k < zetas.size(); ++k) CHECK(zetas[k].time == doctest::Approx(11.0 + 10.0 * k));
}

TEST_CASE("pickup 100 m away fires after 10 s") {
  Scripted c(serve_one);
  const auto r = run(grid(),
                     {SimEvent::make_join(0, VehicleId{1}, node(0), 4, 10),
                      SimEvent::make_request(0, PassengerId{1}, node(1), node(2))},
                     c, opts());
  const auto picks = of_kind(r.log, EventKind::pickup);
  REQUIRE(picks.size() == 1);
  CHECK(picks[0].time == doctest::Approx(10.0));
}

TEST_CASE("arc speed limit caps the vehicle") {
  const auto slow = make_grid({2, 2, 100, 5, GridScheme::two_way});
  Scripted c(serve_one);
  const auto r = run(slow,
                     {SimEvent::make_join(0, VehicleId{1}, slow.node_point(0), 4, 10),
                      SimEvent::make_request(0, PassengerId{1}, slow.node_point(1), slow.node_point(3))},
                     c, opts());
  CHECK(of_kind(r.log, EventKind::pickup).at(0).time == doctest::Approx(20.0));
}

TEST_CASE("mid-arc vehicle reaches the next node") {
  Scripted c(keep);
  // arc 0 runs node 0 -> node 1; start 60 m along it, 40 m short of node 1
  const auto r = run(grid(), {SimEvent::make_join(0, VehicleId{1}, grid().point_on_arc(0, 60), 4, 10)},
                     c, opts());
  const auto zetas = of_kind(r.log, EventKind::node_arrival);
  REQUIRE(zetas.size() == 1);
  CHECK(zetas[0].time == doctest::Approx(4.0));
  CHECK(zetas[0].node == grid().arc(0).to);
}

TEST_CASE("full vehicle never picks up") {
  Scripted c([](const SystemState& s, const std::optional<SimEvent>&) {
    Decision d;
    if (auto it = s.passengers.find(PassengerId{2}); it != s.passengers.end() &&
                                                   it->second.status() == PassengerStatus::waiting) {
      d.controls[VehicleId{1}] = Control{it->second.origin(), Target{PassengerId{2}, TargetKind::pickup}};
    }
    return d;
  });
  const auto r = run(grid(),
                     {SimEvent::make_join(0, VehicleId{1}, node(0), 1, 10),
                      SimEvent::make_request(0, PassengerId{1}, node(0), node(2)),
                      SimEvent::make_pickup(0, PassengerId{1}, VehicleId{1}),
                      SimEvent::make_request(0, PassengerId{2}, node(1), node(4))},
                     c, opts());
  const auto picks = of_kind(r.log, EventKind::pickup);
  REQUIRE(picks.size() == 1);
  CHECK(picks[0].passenger == PassengerId{1});
  CHECK(r.reason == StopReason::stalled);
  CHECK(r.final_state.vehicles.at(VehicleId{1}).position == node(1));
}

TEST_CASE("nobody to serve: time limit with the passenger still waiting") {
  Scripted c(serve_one);
  const auto r = run(grid(), {SimEvent::make_request(5, PassengerId{1}, node(0), node(8))}, c, opts(50));
  // the request is the only event; with nothing pending the run stalls
  CHECK(r.reason == StopReason::stalled);
  CHECK(r.final_state.passengers.at(PassengerId{1}).status() == PassengerStatus::waiting);

  const auto r2 = run(grid(),
                      {SimEvent::make_request(5, PassengerId{1}, node(0), node(8)),
                       SimEvent::make_request(500, PassengerId{2}, node(0), node(8))},
                      c, opts(50));
  CHECK(r2.reason == StopReason::time_limit);
  CHECK(r2.end_time == 50.0);
}

TEST_CASE("re-plan ticks fire at t + H") {
  Scripted c([](const SystemState&, const std::optional<SimEvent>& ev) {
    Decision d;
    if (ev) d.planning_horizon = 7.0;  // ticks do not schedule further ticks
    return d;
  });
  const auto r = run(grid(), {SimEvent::make_join(0, VehicleId{1}, node(4), 4, 10),
                              SimEvent::make_request(100, PassengerId{1}, node(0), node(8))},
                     c, opts(200));
  CHECK(c.ticks == 2);  // after the join and after the request

  SimOptions off = opts(200);
  off.replan_ticks = false;
  Scripted c2(c.fn);
  run(grid(), {SimEvent::make_join(0, VehicleId{1}, node(4), 4, 10)}, c2, off);
  CHECK(c2.ticks == 0);
}

TEST_CASE("re-plan ticks keep a minimum spacing") {
  std::vector<Seconds> at;
  Scripted c([&](const SystemState& s, const std::optional<SimEvent>& ev) {
    if (!ev) at.push_back(s.time);
    Decision d;
    d.planning_horizon = 0.001;
    return d;
  });
  SimOptions o = opts(10);
  o.min_replan_s = 2.5;
  run(grid(), {SimEvent::make_join(0, VehicleId{1}, node(4), 4, 10)}, c, o);
  CHECK(at == std::vector<Seconds>{2.5, 5.0, 7.5, 10.0});
}

TEST_CASE("leave is deferred until the vehicle is empty") {
  Scripted c(serve_one);
  const auto r = run(grid(),
                     {SimEvent::make_join(0, VehicleId{1}, node(0), 4, 10),
                      SimEvent::make_request(0, PassengerId{1}, node(0), node(2)),
                      SimEvent::make_leave(5, VehicleId{1})},
                     c, opts());
  const auto drops = of_kind(r.log, EventKind::dropoff);
  const auto leaves = of_kind(r.log, EventKind::leave);
  REQUIRE(drops.size() == 1);
  REQUIRE(leaves.size() == 1);
  CHECK(leaves[0].time == drops[0].time);
  CHECK(r.final_state.vehicles.empty());
}

TEST_CASE("departing vehicle takes no new passengers") {
  const auto r = [] {
    Scripted c(serve_one);
    return run(grid(),
               {SimEvent::make_join(0, VehicleId{1}, node(0), 4, 10),
                SimEvent::make_request(0, PassengerId{1}, node(0), node(2)),
                SimEvent::make_leave(1, VehicleId{1}),
                SimEvent::make_request(2, PassengerId{2}, node(1), node(5))},
               c, opts());
  }();
  for (const auto& e : of_kind(r.log, EventKind::pickup)) CHECK(e.passenger == PassengerId{1});
}

TEST_CASE("stop after delivered target past warm-up") {
  std::vector<SimEvent> ex{SimEvent::make_join(0, VehicleId{1}, node(0), 4, 10)};
  for (int k = 1; k <= 6; ++k) ex.push_back(SimEvent::make_request(k, PassengerId{k}, node(k % 9), node((k + 4) % 9)));
  SimOptions o = opts(100000);
  o.stop.warmup = 2;
  o.stop.delivered_target = 3;
  Scripted c(serve_one);
  const auto r = run(grid(), ex, c, o);
  CHECK(r.reason == StopReason::delivered_target);
  CHECK(of_kind(r.log, EventKind::dropoff).size() == 5);
  CHECK(r.log.back().kind == EventKind::dropoff);
}

TEST_CASE("event limit") {
  SimOptions o = opts();
  o.max_events = 3;
  Scripted c(serve_one);
  const auto r = run(grid(),
                     {SimEvent::make_join(0, VehicleId{1}, node(0), 4, 10),
                      SimEvent::make_request(1, PassengerId{1}, node(0), node(8))},
                     c, o);
  CHECK(r.reason == StopReason::event_limit);
  CHECK(r.log.size() == 3);
}

TEST_CASE("node arrivals in refresh mode skip the controller") {
  SimOptions o = opts();
  o.zeta_mode = ZetaMode::vehicle_refresh;
  Scripted c(serve_one);
  const auto r = run(grid(),
                     {SimEvent::make_join(0, VehicleId{1}, node(0), 4, 10),
                      SimEvent::make_request(1, PassengerId{1}, node(0), node(8))},
                     c, o);
  const auto zetas = of_kind(r.log, EventKind::node_arrival).size();
  CHECK(zetas == 3);
  CHECK(static_cast<std::size_t>(c.calls) == r.log.size() - zetas);
  CHECK(of_kind(r.log, EventKind::dropoff).at(0).time == doctest::Approx(41.0));
}

TEST_CASE("random speed factors are seeded and bounded") {
  auto once = [](std::uint64_t seed) {
    SimOptions o = opts();
    o.random_speed = true;
    o.speed_factor_lo = 0.5;
    o.seed = seed;
    Scripted c(serve_one);
    return run(grid(),
               {SimEvent::make_join(0, VehicleId{1}, node(0), 4, 10),
                SimEvent::make_request(0, PassengerId{1}, node(0), node(8))},
               c, o);
  };
  const auto a = once(3), b = once(3), other = once(4);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t k = 0; k < a.log.size(); ++k) CHECK(a.log[k].time == b.log[k].time);
  const double trip = of_kind(a.log, EventKind::dropoff).at(0).time;
  CHECK(trip >= 40.0);
  CHECK(trip <= 80.0);
  CHECK(trip != of_kind(other.log, EventKind::dropoff).at(0).time);
}

TEST_CASE("predicted endogenous event follows the control") {
  Scripted c(keep);
  Simulator sim(grid(), {SimEvent::make_join(0, VehicleId{1}, node(0), 4, 10)}, c, opts());
  REQUIRE(sim.step());
  sim.set_control(VehicleId{1}, Control::idle_at(grid().point_on_arc(0, 30)));
  CHECK(sim.current_speed(VehicleId{1}) == 10.0);
  // parks mid-arc: no event predicted
  CHECK_FALSE(sim.predict_next_endogenous(VehicleId{1}).has_value());
  sim.set_control(VehicleId{1}, Control::idle_at(node(2)));
  const auto ev = sim.predict_next_endogenous(VehicleId{1});
  REQUIRE(ev.has_value());
  CHECK(ev->kind == EventKind::node_arrival);
  CHECK(ev->time == doctest::Approx(10.0));
}
