#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles/graph_oracle.hpp"
#include "rss/io.hpp"

using namespace rss;
using namespace rss::io;

namespace {

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

std::string saved(const Scenario& s) {
  std::ostringstream os;
  save_scenario(os, s);
  return os.str();
}

const RoadNetwork& grid() {
  static const RoadNetwork net = make_grid({4, 4, 100, 10, GridScheme::two_way});
  return net;
}

}  // namespace

TEST_CASE("minimal scenario takes defaults") {
  const auto s = parse("network.grid = 3,3,100,10,two-way\n");
  CHECK(s.fleet.count == 7);
  CHECK(s.fleet.capacity == 4);
  CHECK(s.demand.rate_per_min == 3.0);
  CHECK(s.controller == ControllerKind::rhc);
  CHECK(s.rhc.omega == 0.5);
  CHECK(s.seed == 1);
  CHECK(s.network.grid->rows == 3);
}

TEST_CASE("scenario errors") {
  CHECK_THROWS_AS(parse("fleet.count = 3\n"), ScenarioError);  // no network
  CHECK_THROWS_AS(parse("network.grid = 3,3,100,10,two-way\ndemand.rate_per_min = 0\n"),
                  ScenarioError);
  CHECK_THROWS_AS(parse("network.grid = 3,3,100,10,two-way\nfleet.colour = red\n"), ScenarioError);
  CHECK_THROWS_AS(parse("network.grid = 3,3,100,10,two-way\nfleet.count = many\n"), ScenarioError);
  CHECK_THROWS_AS(parse("network.grid = 3,3,100,10,two-way\nseed = 1\nseed = 2\n"), ScenarioError);
  CHECK_THROWS_AS(parse("network.grid = 1,3,100,10,two-way\n"), ScenarioError);
  CHECK_THROWS_AS(parse("network.grid = 3,3,100,10,two-way\nstop.delivered = 0\n"), ScenarioError);
  CHECK_THROWS_AS(parse("network.grid = 3,3,100,10,two-way\nrhc.gamma = 0.7\n"), ScenarioError);
  CHECK_THROWS_AS(parse("network.grid = 3,3,100,10,two-way\njust words\n"), ScenarioError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/x.scn"), ScenarioError);
}

TEST_CASE("scenario round-trips through save") {
  const auto s = parse(
      "network.grid = 5,6,80,12,alternating-one-way  # comment\n"
      "fleet.count = 3\nfleet.spawn = 0;7;12\ncontroller.kind = gh\n"
      "rhc.kappa = 0.001\nrhc.diameter_m = 3000\nrhc.priority_mode = per-class\n"
      "rhc.search = exhaustive\nstop.delivered = 12\nstop.warmup = 4\n"
      "sim.random_speed = true\nsim.zeta_mode = vehicle-refresh\nseed = 99\n");
  const auto text = saved(s);
  const auto back = parse(text);
  CHECK(saved(back) == text);
  CHECK(back.fleet.spawn_nodes == std::vector<std::int64_t>{0, 7, 12});
  CHECK(back.controller == ControllerKind::gh);
  CHECK(back.rhc.kappa == 0.001);
  CHECK(back.sim.zeta_mode == ZetaMode::vehicle_refresh);
  CHECK(back.sim.stop.delivered_target == 12);
  CHECK(back.seed == 99);

  const auto def = parse("network.grid = 3,3,100,10,two-way\n");
  CHECK(saved(parse(saved(def))) == saved(def));
}

TEST_CASE("poisson trips") {
  CHECK(gen_poisson_trips(grid(), 3, 0, 1).empty());
  CHECK_THROWS(gen_poisson_trips(grid(), 0, 100, 1));

  const auto a = gen_poisson_trips(grid(), 3, 3600, 5);
  const auto b = gen_poisson_trips(grid(), 3, 3600, 5);
  CHECK(a == b);
  CHECK(a != gen_poisson_trips(grid(), 3, 3600, 6));
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].origin != a[k].dest);
    CHECK(a[k].t < 3600);
    if (k) CHECK(a[k].t >= a[k - 1].t);
  }

  // 3 per minute: mean gap 20 s
  const auto many = gen_poisson_trips(grid(), 3, 400000, 11);
  REQUIRE(many.size() > 10000);
  const double mean = many.back().t / static_cast<double>(many.size());
  CHECK(std::abs(mean - 20.0) < 0.05 * 20.0);
}

TEST_CASE("trip files") {
  std::vector<TripRecord> trips{{0.5, 0, 15}, {10, 3, 4}, {10, 7, 1}};
  std::ostringstream os;
  save_trips(os, trips);
  std::istringstream in(os.str());
  CHECK(load_trips(in, grid()) == trips);

  auto bad = [](const std::string& text) {
    std::istringstream s(text);
    return load_trips(s, grid());
  };
  CHECK_THROWS_AS(bad("10,n:1,n:2\n5,n:1,n:2\n"), ParseError);  // time goes back
  CHECK_THROWS_AS(bad("1,n:1,n:99\n"), ParseError);
  CHECK_THROWS_AS(bad("1,n:1,n:1\n"), ParseError);
  CHECK_THROWS_AS(bad("1,x:1,n:2\n"), ParseError);
  CHECK_THROWS_AS(bad("1,g:40.0,-73.0,n:2\n"), ParseError);  // no geo origin
}

TEST_CASE("geo endpoints snap to the nearest node") {
  const GeoPoint origin{40.75, -73.99};
  // invert the projection to land exactly on node 5 (100, 100)
  const double kDeg = 3.14159265358979323846 / 180.0;
  const double lat = origin.lat + 100.0 / (6371000.0 * kDeg);
  const double lon = origin.lon + 100.0 / (6371000.0 * kDeg * std::cos(origin.lat * kDeg));
  const auto xy = project({lat, lon}, origin);
  CHECK(xy.x_m == doctest::Approx(100.0));
  CHECK(xy.y_m == doctest::Approx(100.0));

  std::ostringstream text;
  text.precision(17);
  text << "t_s,origin,dest\n1,g:" << lat << ',' << lon << ",n:0\n";
  std::istringstream in(text.str());
  const auto trips = load_trips(in, grid(), origin);
  REQUIRE(trips.size() == 1);
  CHECK(trips[0].origin == 5);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> dlat(40.7495, 40.7535), dlon(-73.9905, -73.9860);
  for (int k = 0; k < 100; ++k) {
    const GeoPoint g{dlat(rng), dlon(rng)};
    std::ostringstream row;
    row.precision(17);
    row << "1,n:0,g:" << g.lat << ',' << g.lon << '\n';
    std::istringstream r(row.str());
    std::vector<TripRecord> t;
    try {
      t = load_trips(r, grid(), origin);
    } catch (const ParseError&) {
      continue;  // snapped onto the origin node
    }
    const auto expect = grid().node(oracle::nearest_scan(grid(), project(g, origin))).id;
    CHECK(t.at(0).dest == expect);
  }
}

TEST_CASE("atomic writes replace the file") {
  const auto dir = std::filesystem::temp_directory_path() / "rss_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_file_atomic(path, "one\n");
  write_file_atomic(path, "two\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "two");
  CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  std::filesystem::remove_all(dir);
}
