#pragma once

// Per-vehicle cache of follow-up sets. The sets depend only on the state at
// t_k, so one decision epoch computes each (passenger, vehicle) pair once and
// reuses it for every horizon point and tour position.

#include <map>

#include "rss/rhc.hpp"

namespace rss::rhc::detail {

class VehicleValues {
 public:
  VehicleValues(const Epoch& e, const Vehicle& v) : e_(e), v_(v) {}

  const Vehicle& vehicle() const { return v_; }
  const FutureSets& sets(const Passenger& p);
  double total(const Passenger& p, const GraphPoint& x, Seconds t);

 private:
  const Epoch& e_;
  const Vehicle& v_;
  std::map<PassengerId, FutureSets> sets_;
};

std::vector<Target> active_targets(const Epoch& e, VehicleValues& values, Seconds horizon);

Tour build_tour(const Epoch& e, VehicleValues& values, const Target& u,
                const PriorityClasses& classes);

}  // namespace rss::rhc::detail
