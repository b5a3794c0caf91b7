#include "rss/io.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "rss/detail/text.hpp"

namespace rss::io {

namespace {

using detail::format_double;

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ScenarioError("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  const auto x = detail::parse_double(v);
  if (!x) bad_value(key, v);
  return *x;
}

std::int64_t to_int(std::string_view key, std::string_view v) {
  const auto x = detail::parse_int(v);
  if (!x) bad_value(key, v);
  return *x;
}

int to_int32(std::string_view key, std::string_view v) {
  const auto x = to_int(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    bad_value(key, v);
  }
  return static_cast<int>(x);
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v);
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

struct Field {
  std::string_view key;
  std::function<void(Scenario&, std::string_view)> set;
  std::function<std::string(const Scenario&)> get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"network.file", [](Scenario& s, std::string_view v) { s.network.file = v; },
       [](const Scenario& s) { return s.network.file.empty() ? std::string("none") : s.network.file; }},
      {"network.grid",
       [](Scenario& s, std::string_view v) {
         if (v == "none") {
           s.network.grid.reset();
           return;
         }
         const auto parts = detail::split(v, ',');
         if (parts.size() != 5) bad_value("network.grid", v);
         GridSpec g;
         g.rows = to_int32("network.grid", parts[0]);
         g.cols = to_int32("network.grid", parts[1]);
         g.block_m = to_double("network.grid", parts[2]);
         g.speed_mps = to_double("network.grid", parts[3]);
         try {
           g.scheme = parse_grid_scheme(parts[4]);
         } catch (const std::exception&) {
           bad_value("network.grid", v);
         }
         s.network.grid = g;
       },
       [](const Scenario& s) {
         if (!s.network.grid) return std::string("none");
         const auto& g = *s.network.grid;
         return std::to_string(g.rows) + "," + std::to_string(g.cols) + "," +
                format_double(g.block_m) + "," + format_double(g.speed_mps) + "," +
                std::string(to_string(g.scheme));
       }},
      {"fleet.count", [](Scenario& s, std::string_view v) { s.fleet.count = to_int32("fleet.count", v); },
       [](const Scenario& s) { return std::to_string(s.fleet.count); }},
      {"fleet.capacity",
       [](Scenario& s, std::string_view v) { s.fleet.capacity = to_int32("fleet.capacity", v); },
       [](const Scenario& s) { return std::to_string(s.fleet.capacity); }},
      {"fleet.max_speed_mps",
       [](Scenario& s, std::string_view v) { s.fleet.max_speed_mps = to_double("fleet.max_speed_mps", v); },
       [](const Scenario& s) { return format_double(s.fleet.max_speed_mps); }},
      {"fleet.spawn",
       [](Scenario& s, std::string_view v) {
         s.fleet.spawn_nodes.clear();
         if (v == "uniform-random") return;
         for (auto part : detail::split(v, ';')) s.fleet.spawn_nodes.push_back(to_int("fleet.spawn", part));
       },
       [](const Scenario& s) {
         if (s.fleet.spawn_nodes.empty()) return std::string("uniform-random");
         std::string out;
         for (auto id : s.fleet.spawn_nodes) {
           if (!out.empty()) out += ';';
           out += std::to_string(id);
         }
         return out;
       }},
      {"demand.kind",
       [](Scenario& s, std::string_view v) {
         if (v == "poisson") {
           s.demand.kind = DemandKind::poisson;
         } else if (v == "replay") {
           s.demand.kind = DemandKind::replay;
         } else {
           bad_value("demand.kind", v);
         }
       },
       [](const Scenario& s) {
         return std::string(s.demand.kind == DemandKind::poisson ? "poisson" : "replay");
       }},
      {"demand.rate_per_min",
       [](Scenario& s, std::string_view v) { s.demand.rate_per_min = to_double("demand.rate_per_min", v); },
       [](const Scenario& s) { return format_double(s.demand.rate_per_min); }},
      {"demand.horizon_s",
       [](Scenario& s, std::string_view v) { s.demand.horizon_s = to_double("demand.horizon_s", v); },
       [](const Scenario& s) { return format_double(s.demand.horizon_s); }},
      {"demand.trips_file", [](Scenario& s, std::string_view v) { s.demand.trips_file = v == "none" ? "" : std::string(v); },
       [](const Scenario& s) { return s.demand.trips_file.empty() ? std::string("none") : s.demand.trips_file; }},
      {"demand.geo_origin",
       [](Scenario& s, std::string_view v) {
         if (v == "none") {
           s.demand.geo_origin.reset();
           return;
         }
         const auto parts = detail::split(v, ',');
         if (parts.size() != 2) bad_value("demand.geo_origin", v);
         s.demand.geo_origin = GeoPoint{to_double("demand.geo_origin", parts[0]),
                                        to_double("demand.geo_origin", parts[1])};
       },
       [](const Scenario& s) {
         if (!s.demand.geo_origin) return std::string("none");
         return format_double(s.demand.geo_origin->lat) + "," + format_double(s.demand.geo_origin->lon);
       }},
      {"controller.kind",
       [](Scenario& s, std::string_view v) {
         if (v == "rhc") {
           s.controller = ControllerKind::rhc;
         } else if (v == "gh") {
           s.controller = ControllerKind::gh;
         } else {
           bad_value("controller.kind", v);
         }
       },
       [](const Scenario& s) { return std::string(to_string(s.controller)); }},
      {"rhc.omega", [](Scenario& s, std::string_view v) { s.rhc.omega = to_double("rhc.omega", v); },
       [](const Scenario& s) { return format_double(s.rhc.omega); }},
      {"rhc.mu", [](Scenario& s, std::string_view v) { s.rhc.mu = to_double("rhc.mu", v); },
       [](const Scenario& s) { return format_double(s.rhc.mu); }},
      {"rhc.w_max_s", [](Scenario& s, std::string_view v) { s.rhc.w_max = to_double("rhc.w_max_s", v); },
       [](const Scenario& s) { return format_double(s.rhc.w_max); }},
      {"rhc.y_max_s", [](Scenario& s, std::string_view v) { s.rhc.y_max = to_double("rhc.y_max_s", v); },
       [](const Scenario& s) { return format_double(s.rhc.y_max); }},
      {"rhc.theta", [](Scenario& s, std::string_view v) { s.rhc.theta = to_double("rhc.theta", v); },
       [](const Scenario& s) { return format_double(s.rhc.theta); }},
      {"rhc.gamma", [](Scenario& s, std::string_view v) { s.rhc.gamma = to_double("rhc.gamma", v); },
       [](const Scenario& s) { return format_double(s.rhc.gamma); }},
      {"rhc.b", [](Scenario& s, std::string_view v) { s.rhc.b = to_int32("rhc.b", v); },
       [](const Scenario& s) { return std::to_string(s.rhc.b); }},
      {"rhc.kappa",
       [](Scenario& s, std::string_view v) {
         if (v == "default") {
           s.rhc.kappa.reset();
         } else {
           s.rhc.kappa = to_double("rhc.kappa", v);
         }
       },
       [](const Scenario& s) { return s.rhc.kappa ? format_double(*s.rhc.kappa) : std::string("default"); }},
      {"rhc.priority_depth",
       [](Scenario& s, std::string_view v) { s.rhc.priority_depth = to_int32("rhc.priority_depth", v); },
       [](const Scenario& s) { return std::to_string(s.rhc.priority_depth); }},
      {"rhc.enumeration_cap",
       [](Scenario& s, std::string_view v) {
         const auto x = to_int("rhc.enumeration_cap", v);
         if (x < 1) bad_value("rhc.enumeration_cap", v);
         s.rhc.enumeration_cap = static_cast<std::uint64_t>(x);
       },
       [](const Scenario& s) { return std::to_string(s.rhc.enumeration_cap); }},
      {"rhc.diameter_m",
       [](Scenario& s, std::string_view v) {
         if (v == "auto") {
           s.rhc.diameter_m.reset();
         } else {
           s.rhc.diameter_m = to_double("rhc.diameter_m", v);
         }
       },
       [](const Scenario& s) { return s.rhc.diameter_m ? format_double(*s.rhc.diameter_m) : std::string("auto"); }},
      {"rhc.priority_mode",
       [](Scenario& s, std::string_view v) {
         try {
           s.rhc.priority_mode = rhc::parse_priority_mode(v);
         } catch (const std::invalid_argument&) {
           bad_value("rhc.priority_mode", v);
         }
       },
       [](const Scenario& s) { return std::string(rhc::to_string(s.rhc.priority_mode)); }},
      {"rhc.search",
       [](Scenario& s, std::string_view v) {
         try {
           s.rhc.search = rhc::parse_search_method(v);
         } catch (const std::invalid_argument&) {
           bad_value("rhc.search", v);
         }
       },
       [](const Scenario& s) { return std::string(rhc::to_string(s.rhc.search)); }},
      {"rhc.parallel", [](Scenario& s, std::string_view v) { s.rhc.parallel = to_bool("rhc.parallel", v); },
       [](const Scenario& s) { return bool_str(s.rhc.parallel); }},
      {"rhc.reward_horizon_s",
       [](Scenario& s, std::string_view v) { s.rhc.reward_horizon = to_double("rhc.reward_horizon_s", v); },
       [](const Scenario& s) { return format_double(s.rhc.reward_horizon); }},
      {"stop.time_s", [](Scenario& s, std::string_view v) { s.sim.stop.time_limit = to_double("stop.time_s", v); },
       [](const Scenario& s) { return format_double(s.sim.stop.time_limit); }},
      {"stop.delivered",
       [](Scenario& s, std::string_view v) {
         if (v == "none") {
           s.sim.stop.delivered_target.reset();
         } else {
           s.sim.stop.delivered_target = to_int32("stop.delivered", v);
         }
       },
       [](const Scenario& s) {
         return s.sim.stop.delivered_target ? std::to_string(*s.sim.stop.delivered_target)
                                            : std::string("none");
       }},
      {"stop.warmup", [](Scenario& s, std::string_view v) { s.sim.stop.warmup = to_int32("stop.warmup", v); },
       [](const Scenario& s) { return std::to_string(s.sim.stop.warmup); }},
      {"sim.random_speed",
       [](Scenario& s, std::string_view v) { s.sim.random_speed = to_bool("sim.random_speed", v); },
       [](const Scenario& s) { return bool_str(s.sim.random_speed); }},
      {"sim.speed_factor_lo",
       [](Scenario& s, std::string_view v) { s.sim.speed_factor_lo = to_double("sim.speed_factor_lo", v); },
       [](const Scenario& s) { return format_double(s.sim.speed_factor_lo); }},
      {"sim.zeta_mode",
       [](Scenario& s, std::string_view v) {
         if (v == "full-replan") {
           s.sim.zeta_mode = ZetaMode::full_replan;
         } else if (v == "vehicle-refresh") {
           s.sim.zeta_mode = ZetaMode::vehicle_refresh;
         } else {
           bad_value("sim.zeta_mode", v);
         }
       },
       [](const Scenario& s) {
         return std::string(s.sim.zeta_mode == ZetaMode::full_replan ? "full-replan" : "vehicle-refresh");
       }},
      {"sim.replan_ticks",
       [](Scenario& s, std::string_view v) { s.sim.replan_ticks = to_bool("sim.replan_ticks", v); },
       [](const Scenario& s) { return bool_str(s.sim.replan_ticks); }},
      {"sim.min_replan_s",
       [](Scenario& s, std::string_view v) { s.sim.min_replan_s = to_double("sim.min_replan_s", v); },
       [](const Scenario& s) { return format_double(s.sim.min_replan_s); }},
      {"sim.max_events",
       [](Scenario& s, std::string_view v) {
         const auto x = to_int("sim.max_events", v);
         if (x < 1) bad_value("sim.max_events", v);
         s.sim.max_events = static_cast<std::size_t>(x);
       },
       [](const Scenario& s) { return std::to_string(s.sim.max_events); }},
      {"seed",
       [](Scenario& s, std::string_view v) {
         const auto x = to_int("seed", v);
         if (x < 0) bad_value("seed", v);
         s.seed = static_cast<std::uint64_t>(x);
       },
       [](const Scenario& s) { return std::to_string(s.seed); }},
  };
  return table;
}

std::string line_error(std::size_t line_no, std::string_view what) {
  return "line " + std::to_string(line_no) + ": " + std::string(what);
}

std::int64_t checked_node(const RoadNetwork& net, std::int64_t id, std::size_t line_no) {
  if (!net.find_node(id)) throw ParseError(line_error(line_no, "unknown node " + std::to_string(id)));
  return id;
}

}  // namespace

std::string_view to_string(ControllerKind k) { return k == ControllerKind::rhc ? "rhc" : "gh"; }

void set_field(Scenario& s, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(s, detail::trim(value));
      return;
    }
  }
  throw ScenarioError("unknown scenario key: " + std::string(key));
}

void validate(const Scenario& s) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ScenarioError(what);
  };
  require(s.network.grid || !s.network.file.empty(), "network.file or network.grid is required");
  if (s.network.grid) {
    require(s.network.grid->rows >= 2 && s.network.grid->cols >= 2,
            "network.grid needs at least 2 rows and 2 columns");
    require(s.network.grid->block_m > 0.0 && s.network.grid->speed_mps > 0.0,
            "network.grid block and speed must be positive");
  }
  require(s.fleet.count >= 1, "fleet.count must be at least 1");
  require(s.fleet.capacity >= 1, "fleet.capacity must be at least 1");
  require(s.fleet.max_speed_mps > 0.0, "fleet.max_speed_mps must be positive");
  require(s.fleet.spawn_nodes.empty() ||
              s.fleet.spawn_nodes.size() == static_cast<std::size_t>(s.fleet.count),
          "fleet.spawn must list one node per vehicle");
  if (s.demand.kind == DemandKind::poisson) {
    require(s.demand.rate_per_min > 0.0, "demand.rate_per_min must be positive");
    require(s.demand.horizon_s >= 0.0, "demand.horizon_s must be non-negative");
  } else {
    require(!s.demand.trips_file.empty(), "demand.trips_file is required for replay");
  }
  require(s.sim.stop.time_limit > 0.0, "stop.time_s must be positive");
  require(!s.sim.stop.delivered_target || *s.sim.stop.delivered_target >= 1,
          "stop.delivered must be at least 1");
  require(s.sim.stop.warmup >= 0, "stop.warmup must be non-negative");
  require(s.sim.speed_factor_lo > 0.0 && s.sim.speed_factor_lo <= 1.0,
          "sim.speed_factor_lo must be in (0, 1]");
  require(s.sim.min_replan_s >= 0.0, "sim.min_replan_s must be non-negative");
  try {
    s.rhc.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
}

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
  Scenario s;
  s.base_dir = base_dir;
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = detail::trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ScenarioError(line_error(line_no, "expected key = value"));
    const auto key = detail::trim(text.substr(0, eq));
    const auto value = detail::trim(text.substr(eq + 1));
    if (!seen.emplace(key).second) {
      throw ScenarioError(line_error(line_no, "duplicate key " + std::string(key)));
    }
    try {
      set_field(s, key, value);
    } catch (const ScenarioError& e) {
      throw ScenarioError(line_error(line_no, e.what()));
    }
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario " + path.string());
  return parse_scenario(in, path.parent_path());
}

std::vector<std::pair<std::string, std::string>> scenario_fields(const Scenario& s) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(std::string(f.key), f.get(s));
  return out;
}

void save_scenario(std::ostream& out, const Scenario& s) {
  for (const auto& [k, v] : scenario_fields(s)) out << k << " = " << v << '\n';
}

PlanarPoint project(const GeoPoint& p, const GeoPoint& origin) {
  constexpr double kEarthRadius = 6371000.0;
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  return {kEarthRadius * (p.lon - origin.lon) * kDeg * std::cos(origin.lat * kDeg),
          kEarthRadius * (p.lat - origin.lat) * kDeg};
}

std::vector<TripRecord> gen_poisson_trips(const RoadNetwork& net, double rate_per_min,
                                          Seconds horizon_s, std::uint64_t seed) {
  if (rate_per_min <= 0.0) throw std::invalid_argument("rate must be positive");
  if (net.node_count() < 2) throw std::invalid_argument("need at least two nodes");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    std::uint32_t{0x7121}};
  std::mt19937_64 rng(seq);
  std::exponential_distribution<double> gap(rate_per_min / 60.0);
  std::uniform_int_distribution<std::size_t> node(0, net.node_count() - 1);

  std::vector<TripRecord> out;
  Seconds t = 0.0;
  while (true) {
    t += gap(rng);
    if (t >= horizon_s) break;
    const auto o = node(rng);
    auto d = node(rng);
    while (d == o) d = node(rng);
    out.push_back({t, net.node(static_cast<NodeIndex>(o)).id, net.node(static_cast<NodeIndex>(d)).id});
  }
  return out;
}

std::vector<TripRecord> load_trips(std::istream& in, const RoadNetwork& net,
                                   const std::optional<GeoPoint>& geo_origin) {
  std::vector<TripRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_comment_or_blank(line)) continue;
    const auto parts = detail::split(line, ',');
    if (parts.front() == "t_s") continue;  // header

    const auto t = detail::parse_double(parts.front());
    if (!t) throw ParseError(line_error(line_no, "malformed time"));

    // endpoints: n:<id> takes one field, g:<lat>,<lon> takes two
    std::size_t k = 1;
    auto endpoint = [&]() -> std::int64_t {
      if (k >= parts.size()) throw ParseError(line_error(line_no, "missing endpoint"));
      const auto f = parts[k];
      if (f.starts_with("n:")) {
        ++k;
        const auto id = detail::parse_int(f.substr(2));
        if (!id) throw ParseError(line_error(line_no, "malformed node endpoint"));
        return checked_node(net, *id, line_no);
      }
      if (f.starts_with("g:")) {
        if (k + 1 >= parts.size()) throw ParseError(line_error(line_no, "malformed geo endpoint"));
        const auto lat = detail::parse_double(f.substr(2));
        const auto lon = detail::parse_double(parts[k + 1]);
        k += 2;
        if (!lat || !lon) throw ParseError(line_error(line_no, "malformed geo endpoint"));
        if (!geo_origin) throw ParseError(line_error(line_no, "geo endpoint without demand.geo_origin"));
        const NodeIndex n = net.nearest_node(project({*lat, *lon}, *geo_origin));
        return net.node(n).id;
      }
      throw ParseError(line_error(line_no, "endpoint must start with n: or g:"));
    };
    TripRecord rec;
    rec.t = *t;
    rec.origin = endpoint();
    rec.dest = endpoint();
    if (k != parts.size()) throw ParseError(line_error(line_no, "trailing fields"));
    if (!out.empty() && rec.t < out.back().t) throw ParseError(line_error(line_no, "request times decrease"));
    if (rec.origin == rec.dest) throw ParseError(line_error(line_no, "origin equals destination"));
    out.push_back(rec);
  }
  return out;
}

std::vector<TripRecord> load_trips_file(const std::filesystem::path& path, const RoadNetwork& net,
                                        const std::optional<GeoPoint>& geo_origin) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trips file " + path.string());
  return load_trips(in, net, geo_origin);
}

void save_trips(std::ostream& out, const std::vector<TripRecord>& trips) {
  out << "t_s,origin,dest\n";
  for (const auto& r : trips) {
    out << format_double(r.t) << ",n:" << r.origin << ",n:" << r.dest << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace rss::io
