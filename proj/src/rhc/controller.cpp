#include "rss/rhc.hpp"

namespace rss::rhc {

RhcController::RhcController(const RoadNetwork& net, RhcConfig cfg)
    : net_(net), cfg_(std::move(cfg)) {
  cfg_.validate();
}

Decision RhcController::decide(const SystemState& state, const std::optional<SimEvent>& trigger) {
  const Epoch e(net_, state, cfg_);
  Pin pin;
  if (trigger && trigger->kind == EventKind::request) pin = threshold_update(e, trigger->passenger);
  last_ = optimize(e, pin);

  Decision d;
  d.planning_horizon = last_.horizon;
  for (const auto& [vid, target] : last_.choice) {
    const Vehicle& v = state.vehicles.at(vid);
    d.controls[vid] = target ? Control{target_point(state, *target), target}
                             : Control::idle_at(v.position);
  }
  return d;
}

}  // namespace rss::rhc
