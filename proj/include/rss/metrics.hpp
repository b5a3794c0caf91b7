#pragma once

// Run statistics computed from the event log alone, so a saved log
// reproduces its report exactly.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rss/domain.hpp"

namespace rss::metrics {

struct PassengerRecord {
  PassengerId id{};
  VehicleId vehicle{};
  Seconds request = 0.0;
  Seconds pickup = 0.0;
  Seconds dropoff = 0.0;
  int occupancy_at_pickup = 0;  // riders right after this pickup, itself included

  Seconds waiting() const { return pickup - request; }
  Seconds traveling() const { return dropoff - pickup; }
};

struct Histogram {
  double width_min = 1.0;
  std::vector<std::size_t> counts;  // counts[k] covers [k w, (k+1) w) minutes
};

/// Left-closed bins of `width_min` starting at 0.
Histogram histogram(std::span<const double> values_min, double width_min);

/// omega * wait / w_max + (1 - omega) * travel / y_max. Any consistent time
/// unit works; the reports use minutes.
double weighted_objective(double wait, double travel, double omega, double w_max,
                          double y_max);

/// Mean of the per-passenger weighted objective; empty for no passengers.
std::optional<double> weighted_objective(std::span<const PassengerRecord> records, double omega,
                                         Seconds w_max, Seconds y_max);

struct ReportOptions {
  int warmup = 0;                     // deliveries skipped before measuring
  std::optional<int> measured_limit;  // at most this many measured deliveries
  double omega = 0.5;
  Seconds w_max = 2820.0;
  Seconds y_max = 2820.0;
  double bin_width_min = 1.0;
};

struct RunReport {
  std::vector<PassengerRecord> measured;  // in delivery order
  std::size_t requests = 0;
  std::size_t delivered_total = 0;
  std::size_t warmup_excluded = 0;
  std::size_t censored_waiting = 0;  // still waiting at the end
  std::size_t censored_onboard = 0;  // still riding at the end
  std::size_t events = 0;
  Seconds end_time = 0.0;

  std::optional<double> mean_wait_min;
  std::optional<double> mean_travel_min;
  std::optional<double> objective;
  /// Mean riders right after each measured pickup.
  std::optional<double> occupancy;
  /// Time average of riders per vehicle over the whole run.
  std::optional<double> time_weighted_occupancy;
  Histogram hist_wait;
  Histogram hist_travel;
};

/// `end_time` closes the time-weighted occupancy integral; it defaults to the
/// last event time.
RunReport build_report(std::span<const SimEvent> log, const ReportOptions& opt,
                       std::optional<Seconds> end_time = std::nullopt);

using Echo = std::vector<std::pair<std::string, std::string>>;

/// key = value lines; `echo` entries are emitted first, verbatim.
void write_report(std::ostream& out, const RunReport& r, const Echo& echo);
void write_passengers_csv(std::ostream& out, const RunReport& r);
void write_histogram_csv(std::ostream& out, const Histogram& h);

}  // namespace rss::metrics
