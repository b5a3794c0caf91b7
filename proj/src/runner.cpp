#include "rss/runner.hpp"

#include <cmath>
#include <exception>
#include <ostream>
#include <random>
#include <sstream>

#include "rss/baseline.hpp"
#include "rss/detail/text.hpp"

namespace rss {

namespace {

std::filesystem::path resolve(const io::Scenario& s, const std::string& file) {
  const std::filesystem::path p(file);
  return p.is_absolute() || s.base_dir.empty() ? p : s.base_dir / p;
}

std::string fmt(double x, int precision = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << x;
  return os.str();
}

}  // namespace

RoadNetwork build_network(const io::Scenario& s) {
  if (s.network.grid) return make_grid(*s.network.grid);
  return load_network_file(resolve(s, s.network.file).string());
}

std::vector<io::TripRecord> build_trips(const io::Scenario& s, const RoadNetwork& net) {
  if (s.demand.kind == io::DemandKind::poisson) {
    return io::gen_poisson_trips(net, s.demand.rate_per_min, s.demand.horizon_s, s.seed);
  }
  return io::load_trips_file(resolve(s, s.demand.trips_file), net, s.demand.geo_origin);
}

std::vector<SimEvent> build_exogenous(const io::Scenario& s, const RoadNetwork& net,
                                      const std::vector<io::TripRecord>& trips) {
  std::vector<SimEvent> events;
  std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                    std::uint32_t{0x5ba7}};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> any(0, net.node_count() - 1);

  for (int k = 0; k < s.fleet.count; ++k) {
    NodeIndex n;
    if (s.fleet.spawn_nodes.empty()) {
      n = static_cast<NodeIndex>(any(rng));
    } else {
      const auto found = net.find_node(s.fleet.spawn_nodes[static_cast<std::size_t>(k)]);
      if (!found) throw io::ScenarioError("fleet.spawn names an unknown node");
      n = *found;
    }
    events.push_back(SimEvent::make_join(0.0, VehicleId{k + 1}, net.node_point(n),
                                         s.fleet.capacity, s.fleet.max_speed_mps));
  }
  std::int64_t next_id = 1;
  for (const auto& t : trips) {
    const auto o = net.find_node(t.origin);
    const auto d = net.find_node(t.dest);
    if (!o || !d) throw io::ScenarioError("trip names an unknown node");
    events.push_back(SimEvent::make_request(t.t, PassengerId{next_id++}, net.node_point(*o),
                                            net.node_point(*d)));
  }
  return events;
}

std::unique_ptr<Controller> make_controller(const io::Scenario& s, const RoadNetwork& net) {
  if (s.controller == io::ControllerKind::gh) {
    return std::make_unique<baseline::GreedyInsertionController>(net);
  }
  return std::make_unique<rhc::RhcController>(net, s.rhc);
}

metrics::ReportOptions report_options(const io::Scenario& s) {
  metrics::ReportOptions o;
  o.warmup = s.sim.stop.warmup;
  o.measured_limit = s.sim.stop.delivered_target;
  o.omega = s.rhc.omega;
  o.w_max = s.rhc.w_max;
  o.y_max = s.rhc.y_max;
  return o;
}

RunOutput run_scenario(const io::Scenario& s, const RoadNetwork& net) {
  auto controller = make_controller(s, net);
  SimOptions opt = s.sim;
  opt.seed = s.seed;
  RunOutput out;
  out.result = run(net, build_exogenous(s, net, build_trips(s, net)), *controller, opt);
  out.report = metrics::build_report(out.result.log, report_options(s), out.result.end_time);
  return out;
}

std::string report_text(const io::Scenario& s, const RunOutput& out) {
  std::ostringstream os;
  auto echo = io::scenario_fields(s);
  echo.emplace_back("result.stop_reason", std::string(to_string(out.result.reason)));
  echo.emplace_back("result.controller_calls", std::to_string(out.result.controller_calls));
  metrics::write_report(os, out.report, echo);
  return os.str();
}

void write_results(const std::filesystem::path& dir, const io::Scenario& s,
                   const RoadNetwork& net, const RunOutput& out) {
  std::filesystem::create_directories(dir);
  io::write_file_atomic(dir / "report.txt", report_text(s, out));
  std::ostringstream pax, hw, ht, log;
  metrics::write_passengers_csv(pax, out.report);
  metrics::write_histogram_csv(hw, out.report.hist_wait);
  metrics::write_histogram_csv(ht, out.report.hist_travel);
  write_event_log(log, net, out.result.log);
  io::write_file_atomic(dir / "passengers.csv", pax.str());
  io::write_file_atomic(dir / "hist_wait.csv", hw.str());
  io::write_file_atomic(dir / "hist_travel.csv", ht.str());
  io::write_file_atomic(dir / "events.log", log.str());
}

Stat stat_of(const std::vector<double>& xs) {
  Stat st;
  st.n = xs.size();
  if (xs.empty()) return st;
  double sum = 0.0;
  for (double x : xs) sum += x;
  st.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - st.mean) * (x - st.mean);
    st.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return st;
}

std::vector<metrics::RunReport> replicate(const io::Scenario& s, const RoadNetwork& net,
                                          int seeds) {
  std::vector<metrics::RunReport> reports(static_cast<std::size_t>(std::max(seeds, 0)));
  std::vector<std::exception_ptr> errors(reports.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < seeds; ++k) {
    try {
      io::Scenario local = s;
      local.seed = s.seed + static_cast<std::uint64_t>(k);
      reports[static_cast<std::size_t>(k)] = run_scenario(local, net).report;
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return reports;
}

Summary summarize(std::string label, const std::vector<metrics::RunReport>& reports) {
  Summary out;
  out.label = std::move(label);
  out.runs = reports.size();
  std::vector<double> w, y, obj, occ, two;
  for (const auto& r : reports) {
    if (r.mean_wait_min) w.push_back(*r.mean_wait_min);
    if (r.mean_travel_min) y.push_back(*r.mean_travel_min);
    if (r.objective) obj.push_back(*r.objective);
    if (r.occupancy) occ.push_back(*r.occupancy);
    if (r.time_weighted_occupancy) two.push_back(*r.time_weighted_occupancy);
    out.censored += r.censored_waiting + r.censored_onboard;
  }
  out.wait_min = stat_of(w);
  out.travel_min = stat_of(y);
  out.objective = stat_of(obj);
  out.occupancy = stat_of(occ);
  out.time_weighted_occupancy = stat_of(two);
  out.objectives = obj;
  return out;
}

std::vector<Summary> compare(const io::Scenario& s, const RoadNetwork& net, int seeds) {
  std::vector<Summary> rows;
  for (auto kind : {io::ControllerKind::rhc, io::ControllerKind::gh}) {
    io::Scenario local = s;
    local.controller = kind;
    rows.push_back(summarize(std::string(io::to_string(kind)), replicate(local, net, seeds)));
  }
  return rows;
}

std::vector<Summary> sweep(const io::Scenario& s, const std::string& key,
                           const std::vector<std::string>& values, int seeds) {
  std::vector<Summary> rows;
  for (const auto& v : values) {
    io::Scenario local = s;
    io::set_field(local, key, v);
    io::validate(local);
    const RoadNetwork net = build_network(local);
    rows.push_back(summarize(key + "=" + v, replicate(local, net, seeds)));
  }
  return rows;
}

void write_summary_table(std::ostream& out, const std::vector<Summary>& rows) {
  out << "label,runs,wait_min_mean,wait_min_sd,travel_min_mean,travel_min_sd,"
         "objective_mean,objective_sd,occupancy_mean,occupancy_sd,"
         "time_weighted_occupancy_mean,censored\n";
  for (const auto& r : rows) {
    out << r.label << ',' << r.runs << ',' << fmt(r.wait_min.mean) << ',' << fmt(r.wait_min.stddev)
        << ',' << fmt(r.travel_min.mean) << ',' << fmt(r.travel_min.stddev) << ','
        << fmt(r.objective.mean) << ',' << fmt(r.objective.stddev) << ','
        << fmt(r.occupancy.mean) << ',' << fmt(r.occupancy.stddev) << ','
        << fmt(r.time_weighted_occupancy.mean) << ',' << r.censored << '\n';
  }
}

}  // namespace rss
