#pragma once

// Scenario execution: building the world, running a controller, collecting
// reports, and seed-replicated comparisons and sweeps.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "rss/io.hpp"
#include "rss/metrics.hpp"

namespace rss {

RoadNetwork build_network(const io::Scenario& s);
std::vector<io::TripRecord> build_trips(const io::Scenario& s, const RoadNetwork& net);

/// Vehicle joins at t = 0 (ids 1..count) followed by one request per trip
/// (ids 1..n in trip order).
std::vector<SimEvent> build_exogenous(const io::Scenario& s, const RoadNetwork& net,
                                      const std::vector<io::TripRecord>& trips);

std::unique_ptr<Controller> make_controller(const io::Scenario& s, const RoadNetwork& net);
metrics::ReportOptions report_options(const io::Scenario& s);

struct RunOutput {
  RunResult result;
  metrics::RunReport report;
};

RunOutput run_scenario(const io::Scenario& s, const RoadNetwork& net);

/// Contents of report.txt: the scenario echo followed by the results.
std::string report_text(const io::Scenario& s, const RunOutput& out);

/// report.txt, passengers.csv, hist_wait.csv, hist_travel.csv, events.log;
/// each written atomically.
void write_results(const std::filesystem::path& dir, const io::Scenario& s,
                   const RoadNetwork& net, const RunOutput& out);

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for fewer than two values
  std::size_t n = 0;
};

Stat stat_of(const std::vector<double>& xs);

struct Summary {
  std::string label;
  std::size_t runs = 0;
  Stat wait_min;
  Stat travel_min;
  Stat objective;
  Stat occupancy;
  Stat time_weighted_occupancy;
  std::size_t censored = 0;  // summed over runs
  std::vector<double> objectives;  // per seed, in seed order
};

/// Runs seeds s.seed, s.seed + 1, ... in parallel; reports in seed order.
std::vector<metrics::RunReport> replicate(const io::Scenario& s, const RoadNetwork& net,
                                          int seeds);

Summary summarize(std::string label, const std::vector<metrics::RunReport>& reports);

/// Both controllers on the same seeds (and so the same demand and fleet).
std::vector<Summary> compare(const io::Scenario& s, const RoadNetwork& net, int seeds);

/// One row per value of `key`.
std::vector<Summary> sweep(const io::Scenario& s, const std::string& key,
                           const std::vector<std::string>& values, int seeds);

void write_summary_table(std::ostream& out, const std::vector<Summary>& rows);

}  // namespace rss
