#pragma once

// Scenario files, trip files and result directories.
//
// A scenario is a flat `key = value` document with dotted keys, `#`
// comments allowed:
//
//   network.grid = 10,10,100,10,two-way     # rows,cols,block_m,speed_mps,scheme
//   network.file = city.csv                 # alternative to network.grid
//   fleet.count = 7
//   fleet.capacity = 4
//   fleet.max_speed_mps = 10
//   fleet.spawn = uniform-random            # or node ids: 0;12;40
//   demand.kind = poisson                   # or replay
//   demand.rate_per_min = 3
//   demand.horizon_s = 18000
//   demand.trips_file = trips.csv           # replay only
//   demand.geo_origin = 40.75,-73.99        # lat,lon for g: endpoints
//   controller.kind = rhc                   # or gh
//   rhc.omega = 0.5   (and the other rhc.* keys)
//   stop.time_s = 18000
//   stop.delivered = 30
//   stop.warmup = 0
//   sim.random_speed = false
//   seed = 1
//
// Trip files are CSV rows `t_s,origin,dest` with endpoints `n:<node id>` or
// `g:<lat>,<lon>`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rss/rhc.hpp"
#include "rss/sim.hpp"

namespace rss::io {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ControllerKind { rhc, gh };
enum class DemandKind { poisson, replay };

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct NetworkSpec {
  std::string file;               // used when `grid` is empty
  std::optional<GridSpec> grid;
};

struct FleetSpec {
  int count = 7;
  int capacity = 4;
  double max_speed_mps = 10.0;
  std::vector<std::int64_t> spawn_nodes;  // empty = uniform random nodes
};

struct DemandSpec {
  DemandKind kind = DemandKind::poisson;
  double rate_per_min = 3.0;
  Seconds horizon_s = 18000.0;
  std::string trips_file;
  std::optional<GeoPoint> geo_origin;
};

struct Scenario {
  NetworkSpec network;
  FleetSpec fleet;
  DemandSpec demand;
  ControllerKind controller = ControllerKind::rhc;
  rhc::RhcConfig rhc;
  SimOptions sim;
  std::uint64_t seed = 1;
  /// Relative file paths resolve against this directory.
  std::filesystem::path base_dir;
};

std::string_view to_string(ControllerKind k);

/// Sets one field from its scenario key. Throws ScenarioError on unknown
/// keys or malformed values.
void set_field(Scenario& s, std::string_view key, std::string_view value);

/// Checks ranges and cross-field rules; throws ScenarioError.
void validate(const Scenario& s);

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Every field as (key, value) in a stable order; parse_scenario of these
/// lines gives back the same scenario.
std::vector<std::pair<std::string, std::string>> scenario_fields(const Scenario& s);
void save_scenario(std::ostream& out, const Scenario& s);

struct TripRecord {
  Seconds t = 0.0;
  std::int64_t origin = 0;  // node ids
  std::int64_t dest = 0;

  friend bool operator==(const TripRecord&, const TripRecord&) = default;
};

/// Equirectangular projection around `origin`, in meters (x east, y north).
PlanarPoint project(const GeoPoint& p, const GeoPoint& origin);

/// Poisson arrivals on [0, horizon) with uniform distinct origin and
/// destination nodes. Deterministic per seed.
std::vector<TripRecord> gen_poisson_trips(const RoadNetwork& net, double rate_per_min,
                                          Seconds horizon_s, std::uint64_t seed);

/// Parses a trips file; `g:` endpoints are projected around `geo_origin`
/// and snapped to the nearest node. Throws ParseError on malformed rows,
/// decreasing times, unknown nodes or identical endpoints.
std::vector<TripRecord> load_trips(std::istream& in, const RoadNetwork& net,
                                   const std::optional<GeoPoint>& geo_origin = std::nullopt);
std::vector<TripRecord> load_trips_file(const std::filesystem::path& path,
                                        const RoadNetwork& net,
                                        const std::optional<GeoPoint>& geo_origin = std::nullopt);
void save_trips(std::ostream& out, const std::vector<TripRecord>& trips);

/// Writes `content` next to `path` and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace rss::io
