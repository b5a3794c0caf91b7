#include <algorithm>

#include "rss/rhc.hpp"

namespace rss::rhc {

double responsibility(double d, double gamma) {
  if (d <= gamma) return 1.0;
  if (d <= 1.0 - gamma) return (1.0 - gamma - d) / (1.0 - 2.0 * gamma);
  return 0.0;
}

std::map<VehicleId, double> relative_distances(const Epoch& e, const GraphPoint& target) {
  std::vector<std::pair<Meters, VehicleId>> ranked;
  for (const auto& [vid, v] : e.state.vehicles) {
    ranked.emplace_back(e.net.manhattan_distance(v.position, target), vid);
  }
  std::sort(ranked.begin(), ranked.end());
  const auto b = std::min(ranked.size(), static_cast<std::size_t>(e.cfg.b));

  Meters sum = 0.0;
  for (std::size_t k = 0; k < b; ++k) sum += ranked[k].first;

  std::map<VehicleId, double> out;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    double d = 1.0;
    if (k < b) {
      if (sum > 0.0) {
        d = ranked[k].first / sum;
      } else if (k == 0) {
        d = 0.0;  // the nearest vehicle sits on the target
      }
    }
    out.emplace(ranked[k].second, d);
  }
  return out;
}

double relative_responsibility(const Epoch& e, const GraphPoint& target, VehicleId v) {
  const auto d = relative_distances(e, target);
  const auto it = d.find(v);
  return it == d.end() ? 0.0 : responsibility(it->second, e.cfg.gamma);
}

std::map<VehicleId, PriorityClasses> responsibility_partition(const Epoch& e) {
  const auto depth = static_cast<std::size_t>(e.cfg.priority_depth);
  std::map<VehicleId, PriorityClasses> out;
  for (const auto& [vid, v] : e.state.vehicles) out[vid].assign(depth, {});
  if (out.empty()) return out;

  for (const auto& [pid, p] : e.state.passengers) {
    if (p.status() == PassengerStatus::onboard) {
      if (auto it = out.find(*p.vehicle()); it != out.end()) it->second[0].push_back(pid);
      continue;
    }
    if (p.status() != PassengerStatus::waiting) continue;

    std::vector<std::pair<double, VehicleId>> ranked;  // (-p, id) sorts as wanted
    for (const auto& [vid, d] : relative_distances(e, p.origin())) {
      ranked.emplace_back(-responsibility(d, e.cfg.gamma), vid);
    }
    std::sort(ranked.begin(), ranked.end());
    for (std::size_t m = 0; m < std::min(depth, ranked.size()); ++m) {
      out[ranked[m].second][m].push_back(pid);
    }
  }
  return out;
}

}  // namespace rss::rhc
