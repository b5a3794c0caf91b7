#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rss/kernels.hpp"

namespace rss {

using Meters = double;
using Seconds = double;
using NodeIndex = std::int32_t;
using ArcIndex = std::int32_t;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Node {
  std::int64_t id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
};

struct Arc {
  std::int64_t id = 0;
  NodeIndex from = 0;  // dense index, not the file id
  NodeIndex to = 0;
  Meters length_m = 0.0;
  double speed_mps = 0.0;
};

/// Arc as it appears in a network file: endpoints are node ids.
struct ArcSpec {
  std::int64_t id = 0;
  std::int64_t from_id = 0;
  std::int64_t to_id = 0;
  Meters length_m = 0.0;
  double speed_mps = 0.0;
};

struct PlanarPoint {
  double x_m = 0.0;
  double y_m = 0.0;
};

/// A location on the road graph: `offset` meters past the tail of `arc`.
///
/// Points built through RoadNetwork are canonical: a point sitting on a node
/// is always stored as offset 0 on that node's first outgoing arc, and
/// interior points satisfy 0 < offset < length. Canonical points compare
/// equal exactly when they denote the same location.
struct GraphPoint {
  ArcIndex arc = 0;
  Meters offset = 0.0;

  friend bool operator==(const GraphPoint&, const GraphPoint&) = default;
  friend auto operator<=>(const GraphPoint&, const GraphPoint&) = default;
};

enum class GridScheme { two_way, alternating_one_way };

struct GridSpec {
  int rows = 0;
  int cols = 0;
  Meters block_m = 100.0;
  double speed_mps = 10.0;
  GridScheme scheme = GridScheme::two_way;
};

/// Directed, strongly connected road graph with precomputed all-pairs
/// shortest paths. Immutable after construction.
///
/// Nodes and arcs are stored sorted by their file ids, so dense indices
/// order the same way as ids and "smallest id" tie-breaks reduce to
/// "smallest index".
class RoadNetwork {
 public:
  /// Throws ValidationError on dangling arcs, non-positive lengths or speeds,
  /// duplicate ids, or a graph that is not strongly connected.
  RoadNetwork(std::vector<Node> nodes, std::vector<ArcSpec> arcs);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }
  const Node& node(NodeIndex n) const { return nodes_[static_cast<std::size_t>(n)]; }
  const Arc& arc(ArcIndex a) const { return arcs_[static_cast<std::size_t>(a)]; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Arc> arcs() const { return arcs_; }
  std::span<const ArcIndex> out_arcs(NodeIndex n) const;

  std::optional<NodeIndex> find_node(std::int64_t id) const;

  GraphPoint node_point(NodeIndex n) const;
  /// Canonical point `offset` meters along arc `a`; offset is clamped to the
  /// arc and collapses onto the tail or head node at the ends.
  GraphPoint point_on_arc(ArcIndex a, Meters offset) const;
  std::optional<NodeIndex> node_at(const GraphPoint& p) const;
  bool is_valid(const GraphPoint& p) const;
  PlanarPoint coordinates(const GraphPoint& p) const;

  Meters node_distance(NodeIndex from, NodeIndex to) const {
    return paths_.at(static_cast<std::size_t>(from), static_cast<std::size_t>(to));
  }
  /// First arc of a shortest path, -1 when from == to.
  ArcIndex next_arc(NodeIndex from, NodeIndex to) const {
    return paths_.next(static_cast<std::size_t>(from), static_cast<std::size_t>(to));
  }
  const kernels::PathTables& path_tables() const { return paths_; }

  /// Shortest directed path length from p to q including the partial arcs
  /// at both ends. Asymmetric in general.
  Meters manhattan_distance(const GraphPoint& p, const GraphPoint& q) const;

  /// Largest node-to-node distance plus the longest arc, an upper bound on
  /// the distance between any two points of the graph.
  Meters diameter_distance() const { return max_pair_distance_ + max_arc_length_; }
  Meters max_pair_distance() const { return max_pair_distance_; }
  Meters max_arc_length() const { return max_arc_length_; }

  /// Euclidean nearest node; ties go to the smallest id.
  NodeIndex nearest_node(PlanarPoint xy) const;

  /// Horizon points: every point at exactly `budget` meters (shortest
  /// directed distance) from `start`. Sorted, deduplicated.
  std::vector<GraphPoint> reachable_points(const GraphPoint& start, Meters budget) const;

 private:
  void validate_and_index(std::vector<ArcSpec>& arcs_by_id);
  void check_strongly_connected() const;

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> out_begin_;  // CSR over out_list_
  std::vector<ArcIndex> out_list_;
  kernels::PathTables paths_;
  Meters max_pair_distance_ = 0.0;
  Meters max_arc_length_ = 0.0;
};

RoadNetwork load_network(std::istream& in);
RoadNetwork load_network_file(const std::string& path);
void write_network(std::ostream& out, const RoadNetwork& net);

/// Deterministic grid network in the network-file format. Node id is
/// row * cols + col, coordinates are (col, row) * block.
/// `alternating_one_way` makes the perimeter a one-way counter-clockwise ring
/// and alternates the direction of interior streets.
std::string gen_grid(const GridSpec& spec);
RoadNetwork make_grid(const GridSpec& spec);

std::string_view to_string(GridScheme s);
GridScheme parse_grid_scheme(std::string_view s);

}  // namespace rss
