#include "rss/metrics.hpp"

#include <cmath>
#include <map>
#include <ostream>

#include "rss/detail/text.hpp"

namespace rss::metrics {

namespace {

constexpr double kSecondsPerMinute = 60.0;

std::string num(double x) { return detail::format_double(x); }

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : "none"; }

}  // namespace

Histogram histogram(std::span<const double> values_min, double width_min) {
  Histogram h;
  h.width_min = width_min;
  for (double v : values_min) {
    const auto bin = static_cast<std::size_t>(std::floor(std::max(0.0, v) / width_min));
    if (bin >= h.counts.size()) h.counts.resize(bin + 1, 0);
    ++h.counts[bin];
  }
  return h;
}

double weighted_objective(double wait, double travel, double omega, double w_max,
                          double y_max) {
  return omega * wait / w_max + (1.0 - omega) * travel / y_max;
}

std::optional<double> weighted_objective(std::span<const PassengerRecord> records, double omega,
                                         Seconds w_max, Seconds y_max) {
  if (records.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& r : records) {
    sum += weighted_objective(r.waiting(), r.traveling(), omega, w_max, y_max);
  }
  return sum / static_cast<double>(records.size());
}

RunReport build_report(std::span<const SimEvent> log, const ReportOptions& opt,
                       std::optional<Seconds> end_time) {
  RunReport r;
  r.events = log.size();

  std::map<PassengerId, PassengerRecord> open;
  std::map<VehicleId, int> riders;
  std::size_t vehicles = 0;
  int riding_total = 0;
  double rider_seconds = 0.0, vehicle_seconds = 0.0;
  Seconds last = log.empty() ? 0.0 : log.front().time;

  for (const auto& ev : log) {
    rider_seconds += riding_total * (ev.time - last);
    vehicle_seconds += static_cast<double>(vehicles) * (ev.time - last);
    last = ev.time;

    switch (ev.kind) {
      case EventKind::request:
        ++r.requests;
        open[ev.passenger] = PassengerRecord{ev.passenger, VehicleId{-1}, ev.time, 0, 0, 0};
        break;
      case EventKind::join:
        ++vehicles;
        riders[ev.vehicle] = 0;
        break;
      case EventKind::leave:
        --vehicles;
        riders.erase(ev.vehicle);
        break;
      case EventKind::pickup: {
        auto& rec = open.at(ev.passenger);
        rec.vehicle = ev.vehicle;
        rec.pickup = ev.time;
        rec.occupancy_at_pickup = ++riders[ev.vehicle];
        ++riding_total;
        break;
      }
      case EventKind::dropoff: {
        auto node = open.extract(ev.passenger);
        PassengerRecord rec = node.mapped();
        rec.dropoff = ev.time;
        --riders[ev.vehicle];
        --riding_total;
        ++r.delivered_total;
        if (r.delivered_total <= static_cast<std::size_t>(opt.warmup)) {
          ++r.warmup_excluded;
        } else if (!opt.measured_limit ||
                   r.measured.size() < static_cast<std::size_t>(*opt.measured_limit)) {
          r.measured.push_back(rec);
        }
        break;
      }
      case EventKind::node_arrival:
        break;
    }
  }
  r.end_time = end_time.value_or(last);
  rider_seconds += riding_total * (r.end_time - last);
  vehicle_seconds += static_cast<double>(vehicles) * (r.end_time - last);

  for (const auto& [id, rec] : open) {
    if (rec.vehicle == VehicleId{-1}) {
      ++r.censored_waiting;
    } else {
      ++r.censored_onboard;
    }
  }

  std::vector<double> waits, travels;
  double occ = 0.0;
  for (const auto& rec : r.measured) {
    waits.push_back(rec.waiting() / kSecondsPerMinute);
    travels.push_back(rec.traveling() / kSecondsPerMinute);
    occ += rec.occupancy_at_pickup;
  }
  if (!r.measured.empty()) {
    const auto n = static_cast<double>(r.measured.size());
    double sw = 0.0, st = 0.0;
    for (double w : waits) sw += w;
    for (double t : travels) st += t;
    r.mean_wait_min = sw / n;
    r.mean_travel_min = st / n;
    r.occupancy = occ / n;
    r.objective = weighted_objective(r.measured, opt.omega, opt.w_max, opt.y_max);
  }
  if (vehicle_seconds > 0.0) r.time_weighted_occupancy = rider_seconds / vehicle_seconds;
  r.hist_wait = histogram(waits, opt.bin_width_min);
  r.hist_travel = histogram(travels, opt.bin_width_min);
  return r;
}

void write_report(std::ostream& out, const RunReport& r, const Echo& echo) {
  for (const auto& [k, v] : echo) out << k << " = " << v << '\n';
  out << "result.requests = " << r.requests << '\n';
  out << "result.delivered_total = " << r.delivered_total << '\n';
  out << "result.warmup_excluded = " << r.warmup_excluded << '\n';
  out << "result.measured = " << r.measured.size() << '\n';
  out << "result.censored_waiting = " << r.censored_waiting << '\n';
  out << "result.censored_onboard = " << r.censored_onboard << '\n';
  out << "result.events = " << r.events << '\n';
  out << "result.end_time_s = " << num(r.end_time) << '\n';
  out << "result.mean_wait_min = " << opt_num(r.mean_wait_min) << '\n';
  out << "result.mean_travel_min = " << opt_num(r.mean_travel_min) << '\n';
  out << "result.objective = " << opt_num(r.objective) << '\n';
  out << "result.occupancy = " << opt_num(r.occupancy) << '\n';
  out << "result.time_weighted_occupancy = " << opt_num(r.time_weighted_occupancy) << '\n';
}

void write_passengers_csv(std::ostream& out, const RunReport& r) {
  out << "passenger,vehicle,request_s,pickup_s,dropoff_s,wait_s,travel_s,occupancy_at_pickup\n";
  for (const auto& p : r.measured) {
    out << raw(p.id) << ',' << raw(p.vehicle) << ',' << num(p.request) << ',' << num(p.pickup)
        << ',' << num(p.dropoff) << ',' << num(p.waiting()) << ',' << num(p.traveling()) << ','
        << p.occupancy_at_pickup << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_start_min,bin_end_min,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    out << num(static_cast<double>(k) * h.width_min) << ','
        << num(static_cast<double>(k + 1) * h.width_min) << ',' << h.counts[k] << '\n';
  }
}

}  // namespace rss::metrics
