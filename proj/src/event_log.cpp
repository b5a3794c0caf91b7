#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "rss/detail/text.hpp"
#include "rss/domain.hpp"

namespace rss {

namespace {

std::optional<ArcIndex> find_arc(const RoadNetwork& net, std::int64_t id) {
  const auto arcs = net.arcs();
  const auto it = std::lower_bound(arcs.begin(), arcs.end(), id,
                                   [](const Arc& a, std::int64_t v) { return a.id < v; });
  if (it == arcs.end() || it->id != id) return std::nullopt;
  return static_cast<ArcIndex>(it - arcs.begin());
}

[[noreturn]] void bad_line(std::string_view line, std::string_view why) {
  throw ParseError("event log: " + std::string(why) + " in '" + std::string(line) + "'");
}

}  // namespace

std::string format_point(const RoadNetwork& net, const GraphPoint& p) {
  if (const auto n = net.node_at(p)) return "n:" + std::to_string(net.node(*n).id);
  return "a:" + std::to_string(net.arc(p.arc).id) + ":" + detail::format_double(p.offset);
}

GraphPoint parse_point(const RoadNetwork& net, std::string_view s) {
  s = detail::trim(s);
  if (s.starts_with("n:")) {
    const auto id = detail::parse_int(s.substr(2));
    if (!id) throw ParseError("bad node point '" + std::string(s) + "'");
    const auto n = net.find_node(*id);
    if (!n) throw ParseError("unknown node in point '" + std::string(s) + "'");
    return net.node_point(*n);
  }
  if (s.starts_with("a:")) {
    const auto rest = s.substr(2);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw ParseError("bad arc point '" + std::string(s) + "'");
    const auto id = detail::parse_int(rest.substr(0, colon));
    const auto off = detail::parse_double(rest.substr(colon + 1));
    if (!id || !off) throw ParseError("bad arc point '" + std::string(s) + "'");
    const auto a = find_arc(net, *id);
    if (!a) throw ParseError("unknown arc in point '" + std::string(s) + "'");
    return net.point_on_arc(*a, *off);
  }
  throw ParseError("bad point '" + std::string(s) + "'");
}

std::string format_event(const RoadNetwork& net, const SimEvent& ev) {
  std::ostringstream os;
  os << detail::format_double(ev.time) << ',' << to_string(ev.kind) << ',';
  switch (ev.kind) {
    case EventKind::request:
      os << raw(ev.passenger) << ',' << format_point(net, ev.request->origin) << ','
         << format_point(net, ev.request->destination);
      break;
    case EventKind::join:
      os << raw(ev.vehicle) << ',' << format_point(net, ev.join->position) << ','
         << ev.join->capacity << ',' << detail::format_double(ev.join->max_speed_mps);
      break;
    case EventKind::leave:
      os << raw(ev.vehicle);
      break;
    case EventKind::pickup:
    case EventKind::dropoff:
      os << raw(ev.passenger) << ',' << raw(ev.vehicle);
      break;
    case EventKind::node_arrival:
      os << net.node(ev.node).id << ',' << raw(ev.vehicle);
      break;
  }
  return os.str();
}

SimEvent parse_event(const RoadNetwork& net, std::string_view line) {
  const auto f = detail::split(line, ',');
  if (f.size() < 3) bad_line(line, "too few fields");
  const auto t = detail::parse_double(f[0]);
  const auto kind = parse_event_kind(f[1]);
  if (!t || !kind) bad_line(line, "bad time or kind");

  auto integer = [&](std::size_t i) {
    if (i >= f.size()) bad_line(line, "missing field");
    const auto v = detail::parse_int(f[i]);
    if (!v) bad_line(line, "bad integer");
    return *v;
  };
  auto expect = [&](std::size_t n) {
    if (f.size() != n) bad_line(line, "wrong field count");
  };

  switch (*kind) {
    case EventKind::request:
      expect(5);
      return SimEvent::make_request(*t, PassengerId{integer(2)}, parse_point(net, f[3]),
                                    parse_point(net, f[4]));
    case EventKind::join: {
      expect(6);
      const auto speed = detail::parse_double(f[5]);
      if (!speed) bad_line(line, "bad speed");
      return SimEvent::make_join(*t, VehicleId{integer(2)}, parse_point(net, f[3]),
                                 static_cast<int>(integer(4)), *speed);
    }
    case EventKind::leave:
      expect(3);
      return SimEvent::make_leave(*t, VehicleId{integer(2)});
    case EventKind::pickup:
      expect(4);
      return SimEvent::make_pickup(*t, PassengerId{integer(2)}, VehicleId{integer(3)});
    case EventKind::dropoff:
      expect(4);
      return SimEvent::make_dropoff(*t, PassengerId{integer(2)}, VehicleId{integer(3)});
    case EventKind::node_arrival: {
      expect(4);
      const auto n = net.find_node(integer(2));
      if (!n) bad_line(line, "unknown node");
      return SimEvent::make_node_arrival(*t, *n, VehicleId{integer(3)});
    }
  }
  bad_line(line, "unreachable");
}

void write_event_log(std::ostream& out, const RoadNetwork& net,
                     const std::vector<SimEvent>& events) {
  for (const auto& ev : events) out << format_event(net, ev) << '\n';
}

std::vector<SimEvent> read_event_log(std::istream& in, const RoadNetwork& net) {
  std::vector<SimEvent> out;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::is_comment_or_blank(line)) continue;
    out.push_back(parse_event(net, line));
  }
  return out;
}

}  // namespace rss
