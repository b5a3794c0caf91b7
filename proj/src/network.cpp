#include "rss/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <limits>

#include "rss/detail/text.hpp"

namespace rss {

namespace {

std::string line_error(std::size_t line_no, std::string_view what) {
  std::ostringstream os;
  os << "network file line " << line_no << ": " << what;
  return os.str();
}

}  // namespace

RoadNetwork::RoadNetwork(std::vector<Node> nodes, std::vector<ArcSpec> arcs)
    : nodes_(std::move(nodes)) {
  validate_and_index(arcs);
  check_strongly_connected();

  std::vector<kernels::WeightedArc> weighted;
  weighted.reserve(arcs_.size());
  for (const auto& a : arcs_) weighted.push_back({a.from, a.to, a.length_m});
  paths_ = kernels::all_pairs_parallel(nodes_.size(), weighted);

  for (double d : paths_.dist) max_pair_distance_ = std::max(max_pair_distance_, d);
  for (const auto& a : arcs_) max_arc_length_ = std::max(max_arc_length_, a.length_m);
}

void RoadNetwork::validate_and_index(std::vector<ArcSpec>& arcs_by_id) {
  if (nodes_.empty()) throw ValidationError("network has no nodes");
  if (arcs_by_id.empty()) {
    throw ValidationError("network has no arcs (not strongly connected)");
  }

  std::sort(nodes_.begin(), nodes_.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].id == nodes_[i - 1].id) {
      throw ValidationError("duplicate node id " + std::to_string(nodes_[i].id));
    }
  }

  std::sort(arcs_by_id.begin(), arcs_by_id.end(),
            [](const ArcSpec& a, const ArcSpec& b) { return a.id < b.id; });
  arcs_.clear();
  arcs_.reserve(arcs_by_id.size());
  for (std::size_t i = 0; i < arcs_by_id.size(); ++i) {
    const ArcSpec& a = arcs_by_id[i];
    if (i > 0 && a.id == arcs_by_id[i - 1].id) {
      throw ValidationError("duplicate arc id " + std::to_string(a.id));
    }
    const auto from = find_node(a.from_id);
    const auto to = find_node(a.to_id);
    if (!from || !to) {
      throw ValidationError("arc " + std::to_string(a.id) +
                            " references an unknown node");
    }
    if (!(a.length_m > 0.0) || !std::isfinite(a.length_m)) {
      throw ValidationError("arc " + std::to_string(a.id) + " has non-positive length");
    }
    if (!(a.speed_mps > 0.0) || !std::isfinite(a.speed_mps)) {
      throw ValidationError("arc " + std::to_string(a.id) +
                            " has non-positive speed limit");
    }
    arcs_.push_back({a.id, *from, *to, a.length_m, a.speed_mps});
  }

  out_begin_.assign(nodes_.size() + 1, 0);
  for (const auto& a : arcs_) ++out_begin_[static_cast<std::size_t>(a.from) + 1];
  for (std::size_t i = 1; i < out_begin_.size(); ++i) out_begin_[i] += out_begin_[i - 1];
  out_list_.assign(arcs_.size(), 0);
  auto cursor = out_begin_;
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    out_list_[cursor[static_cast<std::size_t>(arcs_[i].from)]++] = static_cast<ArcIndex>(i);
  }
}

void RoadNetwork::check_strongly_connected() const {
  const std::size_t n = nodes_.size();
  auto sweep = [&](bool forward) {
    std::vector<std::vector<NodeIndex>> adj(n);
    for (const auto& a : arcs_) {
      if (forward) adj[static_cast<std::size_t>(a.from)].push_back(a.to);
      else adj[static_cast<std::size_t>(a.to)].push_back(a.from);
    }
    std::vector<char> seen(n, 0);
    std::vector<NodeIndex> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const NodeIndex u = stack.back();
      stack.pop_back();
      for (NodeIndex v : adj[static_cast<std::size_t>(u)]) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  if (!sweep(true) || !sweep(false)) {
    throw ValidationError("network is not strongly connected");
  }
}

std::span<const ArcIndex> RoadNetwork::out_arcs(NodeIndex n) const {
  const auto b = out_begin_[static_cast<std::size_t>(n)];
  const auto e = out_begin_[static_cast<std::size_t>(n) + 1];
  return {out_list_.data() + b, e - b};
}

std::optional<NodeIndex> RoadNetwork::find_node(std::int64_t id) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                                   [](const Node& n, std::int64_t v) { return n.id < v; });
  if (it == nodes_.end() || it->id != id) return std::nullopt;
  return static_cast<NodeIndex>(it - nodes_.begin());
}

GraphPoint RoadNetwork::node_point(NodeIndex n) const {
  return {out_arcs(n).front(), 0.0};
}

GraphPoint RoadNetwork::point_on_arc(ArcIndex a, Meters offset) const {
  const Arc& arc = this->arc(a);
  if (offset <= 0.0) return node_point(arc.from);
  if (offset >= arc.length_m) return node_point(arc.to);
  return {a, offset};
}

std::optional<NodeIndex> RoadNetwork::node_at(const GraphPoint& p) const {
  if (p.offset == 0.0) return arc(p.arc).from;
  return std::nullopt;
}

bool RoadNetwork::is_valid(const GraphPoint& p) const {
  if (p.arc < 0 || static_cast<std::size_t>(p.arc) >= arcs_.size()) return false;
  if (p.offset == 0.0) return node_point(arc(p.arc).from) == p;
  return p.offset > 0.0 && p.offset < arc(p.arc).length_m;
}

PlanarPoint RoadNetwork::coordinates(const GraphPoint& p) const {
  const Arc& a = arc(p.arc);
  const Node& u = node(a.from);
  const Node& v = node(a.to);
  const double f = p.offset / a.length_m;
  return {u.x_m + f * (v.x_m - u.x_m), u.y_m + f * (v.y_m - u.y_m)};
}

Meters RoadNetwork::manhattan_distance(const GraphPoint& p, const GraphPoint& q) const {
  if (p == q) return 0.0;

  // leave p: from a node directly, from an interior point via the arc head
  const Arc& pa = arc(p.arc);
  const NodeIndex from = p.offset == 0.0 ? pa.from : pa.to;
  const Meters lead = p.offset == 0.0 ? 0.0 : pa.length_m - p.offset;

  // enter q: at a node directly, at an interior point via the arc tail
  const Arc& qa = arc(q.arc);
  const NodeIndex to = qa.from;
  const Meters tail = q.offset;

  Meters best = lead + node_distance(from, to) + tail;
  if (p.offset != 0.0 && q.arc == p.arc && q.offset > p.offset) {
    best = std::min(best, q.offset - p.offset);
  }
  return best;
}

NodeIndex RoadNetwork::nearest_node(PlanarPoint xy) const {
  NodeIndex best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double dx = nodes_[i].x_m - xy.x_m;
    const double dy = nodes_[i].y_m - xy.y_m;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<NodeIndex>(i);
    }
  }
  return best;
}

namespace {
// budgets are usually speed * (distance / speed); absorb the rounding so a
// horizon that ends on a node yields the node itself
constexpr Meters kSnap = 1e-9;
}  // namespace

std::vector<GraphPoint> RoadNetwork::reachable_points(const GraphPoint& start,
                                                      Meters budget) const {
  if (budget <= 0.0) return {start};

  std::vector<GraphPoint> found;
  const Arc& sa = arc(start.arc);
  const bool start_interior = start.offset != 0.0;

  // best remaining budget with which each node has been reached
  std::vector<double> best(nodes_.size(), -1.0);
  using Entry = std::pair<double, NodeIndex>;
  std::priority_queue<Entry> frontier;  // largest remaining budget first

  auto reach = [&](NodeIndex n, double remaining) {
    auto& b = best[static_cast<std::size_t>(n)];
    if (remaining <= b) return;  // loop guard: dominated visit
    b = remaining;
    frontier.push({remaining, n});
  };

  if (start_interior) {
    const Meters ahead = sa.length_m - start.offset;
    if (budget < ahead - kSnap) return {point_on_arc(start.arc, start.offset + budget)};
    reach(sa.to, std::max(0.0, budget - ahead));
  } else {
    reach(sa.from, budget);
  }

  while (!frontier.empty()) {
    const auto [remaining, n] = frontier.top();
    frontier.pop();
    if (remaining < best[static_cast<std::size_t>(n)]) continue;
    if (remaining <= kSnap) {
      found.push_back(node_point(n));
      continue;
    }
    for (ArcIndex a : out_arcs(n)) {
      const Arc& out = arc(a);
      if (remaining < out.length_m - kSnap) {
        // an interior point of the start arc ahead of the start is closer
        // by the direct route, so it is not on the horizon
        if (start_interior && a == start.arc && remaining >= start.offset) continue;
        found.push_back({a, remaining});
      } else {
        reach(out.to, std::max(0.0, remaining - out.length_m));
      }
    }
  }

  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

RoadNetwork load_network(std::istream& in) {
  std::vector<Node> nodes;
  std::vector<ArcSpec> arcs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_comment_or_blank(line)) continue;
    const auto fields = detail::split(line, ',');
    const auto kind = fields.front();
    if (kind == "node") {
      if (fields.size() >= 2 && fields[1] == "id") continue;  // header
      if (fields.size() != 4) throw ParseError(line_error(line_no, "node row needs 4 fields"));
      const auto id = detail::parse_int(fields[1]);
      const auto x = detail::parse_double(fields[2]);
      const auto y = detail::parse_double(fields[3]);
      if (!id || !x || !y) throw ParseError(line_error(line_no, "malformed node row"));
      nodes.push_back({*id, *x, *y});
    } else if (kind == "arc") {
      if (fields.size() >= 2 && fields[1] == "id") continue;  // header
      if (fields.size() != 6) throw ParseError(line_error(line_no, "arc row needs 6 fields"));
      const auto id = detail::parse_int(fields[1]);
      const auto from = detail::parse_int(fields[2]);
      const auto to = detail::parse_int(fields[3]);
      const auto len = detail::parse_double(fields[4]);
      const auto speed = detail::parse_double(fields[5]);
      if (!id || !from || !to || !len || !speed) {
        throw ParseError(line_error(line_no, "malformed arc row"));
      }
      arcs.push_back({*id, *from, *to, *len, *speed});
    } else {
      throw ParseError(line_error(line_no, "unknown record type '" + std::string(kind) + "'"));
    }
  }
  return RoadNetwork(std::move(nodes), std::move(arcs));
}

RoadNetwork load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network file: " + path);
  return load_network(in);
}

void write_network(std::ostream& out, const RoadNetwork& net) {
  out << "node,id,x_m,y_m\n";
  for (const auto& n : net.nodes()) {
    out << "node," << n.id << ',' << detail::format_double(n.x_m) << ','
        << detail::format_double(n.y_m) << '\n';
  }
  out << "arc,id,from,to,length_m,speed_mps\n";
  for (const auto& a : net.arcs()) {
    out << "arc," << a.id << ',' << net.node(a.from).id << ',' << net.node(a.to).id << ','
        << detail::format_double(a.length_m) << ',' << detail::format_double(a.speed_mps)
        << '\n';
  }
}

std::string_view to_string(GridScheme s) {
  return s == GridScheme::two_way ? "two-way" : "alternating-one-way";
}

GridScheme parse_grid_scheme(std::string_view s) {
  if (s == "two-way") return GridScheme::two_way;
  if (s == "alternating-one-way") return GridScheme::alternating_one_way;
  throw ParseError("unknown grid orientation scheme '" + std::string(s) + "'");
}

std::string gen_grid(const GridSpec& spec) {
  if (spec.rows < 2 || spec.cols < 2) {
    throw ValidationError("grid needs at least 2 rows and 2 columns");
  }
  if (!(spec.block_m > 0.0) || !(spec.speed_mps > 0.0)) {
    throw ValidationError("grid block length and speed must be positive");
  }
  const int rows = spec.rows;
  const int cols = spec.cols;
  auto id = [cols](int r, int c) { return static_cast<std::int64_t>(r) * cols + c; };

  std::ostringstream os;
  os << "# grid " << rows << 'x' << cols << " block_m=" << detail::format_double(spec.block_m)
     << " speed_mps=" << detail::format_double(spec.speed_mps) << " scheme="
     << to_string(spec.scheme) << '\n';
  os << "node,id,x_m,y_m\n";
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      os << "node," << id(r, c) << ',' << detail::format_double(c * spec.block_m) << ','
         << detail::format_double(r * spec.block_m) << '\n';
    }
  }

  os << "arc,id,from,to,length_m,speed_mps\n";
  std::int64_t next_id = 0;
  const auto len = detail::format_double(spec.block_m);
  const auto speed = detail::format_double(spec.speed_mps);
  auto emit = [&](std::int64_t from, std::int64_t to) {
    os << "arc," << next_id++ << ',' << from << ',' << to << ',' << len << ',' << speed << '\n';
  };

  if (spec.scheme == GridScheme::two_way) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c + 1 < cols; ++c) {
        emit(id(r, c), id(r, c + 1));
        emit(id(r, c + 1), id(r, c));
      }
    }
    for (int c = 0; c < cols; ++c) {
      for (int r = 0; r + 1 < rows; ++r) {
        emit(id(r, c), id(r + 1, c));
        emit(id(r + 1, c), id(r, c));
      }
    }
    return os.str();
  }

  // perimeter ring: bottom row east, right column north, top row west,
  // left column south; interior streets alternate
  for (int r = 0; r < rows; ++r) {
    bool east;
    if (r == 0) east = true;
    else if (r == rows - 1) east = false;
    else east = (r % 2) == 1;
    for (int c = 0; c + 1 < cols; ++c) {
      if (east) emit(id(r, c), id(r, c + 1));
      else emit(id(r, c + 1), id(r, c));
    }
  }
  for (int c = 0; c < cols; ++c) {
    bool north;
    if (c == 0) north = false;
    else if (c == cols - 1) north = true;
    else north = (c % 2) == 1;
    for (int r = 0; r + 1 < rows; ++r) {
      if (north) emit(id(r, c), id(r + 1, c));
      else emit(id(r + 1, c), id(r, c));
    }
  }
  return os.str();
}

RoadNetwork make_grid(const GridSpec& spec) {
  std::istringstream in(gen_grid(spec));
  return load_network(in);
}

}  // namespace rss
