// rss: generate inputs, run scenarios, compare controllers, sweep parameters.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "rss/runner.hpp"

namespace {

using namespace rss;

void apply_overrides(io::Scenario& s, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw io::ScenarioError("--set expects key=value, got " + kv);
    io::set_field(s, kv.substr(0, eq), kv.substr(eq + 1));
  }
  io::validate(s);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    io::write_file_atomic(out, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ride-sharing dispatch simulator"};
  app.require_subcommand(1);

  // gen-grid
  auto* gen_grid = app.add_subcommand("gen-grid", "Write a grid road network file");
  GridSpec grid;
  std::string scheme = "two-way";
  std::string grid_out;
  gen_grid->add_option("--rows", grid.rows, "Rows of intersections")->required();
  gen_grid->add_option("--cols", grid.cols, "Columns of intersections")->required();
  gen_grid->add_option("--block", grid.block_m, "Block length in meters")->capture_default_str();
  gen_grid->add_option("--speed", grid.speed_mps, "Speed limit in m/s")->capture_default_str();
  gen_grid->add_option("--scheme", scheme, "two-way or alternating-one-way")->capture_default_str();
  gen_grid->add_option("-o,--out", grid_out, "Output file (default stdout)");

  // gen-trips
  auto* gen_trips = app.add_subcommand("gen-trips", "Write Poisson trip requests");
  std::string trips_network, trips_grid, trips_out;
  double rate = 3.0;
  double horizon = 18000.0;
  std::uint64_t trips_seed = 1;
  auto* net_opt = gen_trips->add_option("--network", trips_network, "Network file");
  gen_trips->add_option("--grid", trips_grid, "Grid spec rows,cols,block_m,speed_mps,scheme")
      ->excludes(net_opt);
  gen_trips->add_option("--rate", rate, "Requests per minute")->capture_default_str();
  gen_trips->add_option("--horizon", horizon, "Last request time in seconds")->capture_default_str();
  gen_trips->add_option("--seed", trips_seed, "Random seed")->capture_default_str();
  gen_trips->add_option("-o,--out", trips_out, "Output file (default stdout)");

  // run / compare / sweep share the scenario options
  std::string scenario_path;
  std::vector<std::string> sets;
  auto scenario_opts = [&](CLI::App* sub) {
    sub->add_option("-s,--scenario", scenario_path, "Scenario file")->required();
    sub->add_option("--set", sets, "Override a scenario key (key=value), repeatable");
  };

  auto* run_cmd = app.add_subcommand("run", "Run one scenario and write a results directory");
  std::string run_out;
  scenario_opts(run_cmd);
  run_cmd->add_option("-o,--out", run_out, "Results directory")->required();

  auto* compare_cmd = app.add_subcommand("compare", "Compare rhc and gh on shared demand");
  int seeds = 10;
  std::string table_out;
  scenario_opts(compare_cmd);
  compare_cmd->add_option("--seeds", seeds, "Replications")->capture_default_str();
  compare_cmd->add_option("-o,--out", table_out, "Table file (default stdout)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run one row per parameter value");
  std::string param;
  std::vector<std::string> values;
  scenario_opts(sweep_cmd);
  sweep_cmd->add_option("--param", param, "Scenario key to vary")->required();
  sweep_cmd->add_option("--values", values, "Values to try")->required();
  sweep_cmd->add_option("--seeds", seeds, "Replications per value")->capture_default_str();
  sweep_cmd->add_option("-o,--out", table_out, "Table file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_grid) {
      grid.scheme = parse_grid_scheme(scheme);
      (void)make_grid(grid);  // validates
      emit(rss::gen_grid(grid), grid_out);
    } else if (*gen_trips) {
      io::Scenario s;
      if (!trips_grid.empty()) {
        io::set_field(s, "network.grid", trips_grid);
      } else if (!trips_network.empty()) {
        s.network.file = trips_network;
      } else {
        throw io::ScenarioError("gen-trips needs --network or --grid");
      }
      const RoadNetwork net = build_network(s);
      std::ostringstream os;
      io::save_trips(os, io::gen_poisson_trips(net, rate, horizon, trips_seed));
      emit(os.str(), trips_out);
    } else {
      io::Scenario s = io::load_scenario(scenario_path);
      apply_overrides(s, sets);
      if (*run_cmd) {
        const RoadNetwork net = build_network(s);
        const RunOutput out = run_scenario(s, net);
        write_results(run_out, s, net, out);
        std::cerr << "stop: " << to_string(out.result.reason) << ", measured "
                  << out.report.measured.size() << " passengers, results in " << run_out << '\n';
      } else if (*compare_cmd) {
        const RoadNetwork net = build_network(s);
        std::ostringstream os;
        write_summary_table(os, compare(s, net, seeds));
        emit(os.str(), table_out);
      } else if (*sweep_cmd) {
        std::ostringstream os;
        write_summary_table(os, sweep(s, param, values, seeds));
        emit(os.str(), table_out);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
