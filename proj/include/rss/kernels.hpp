#pragma once

// Data-parallel kernels used by the network and controller layers.
//
// Each kernel comes as an OpenMP version (the one the library uses) and a
// serial reference version with the same operation order. The reference
// versions stay in the library so tests and the benchmark target can compare
// the two bit for bit.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace rss::kernels {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct WeightedArc {
  std::int32_t from;
  std::int32_t to;
  double length;
};

/// Row-major all-pairs shortest-path tables. `next_arc[i*n+j]` is the index
/// (into the arc list handed to the kernel) of the first arc on a shortest
/// path from i to j, or -1 when i == j or j is unreachable.
struct PathTables {
  std::size_t n = 0;
  std::vector<double> dist;
  std::vector<std::int32_t> next_arc;

  double at(std::size_t i, std::size_t j) const { return dist[i * n + j]; }
  std::int32_t next(std::size_t i, std::size_t j) const {
    return next_arc[i * n + j];
  }
};

/// Floyd-Warshall with next-hop recovery; rows of each relaxation sweep are
/// distributed over OpenMP threads.
PathTables all_pairs_parallel(std::size_t n, std::span<const WeightedArc> arcs);

/// Serial reference for all_pairs_parallel. Same relaxation order, so the
/// outputs are identical.
PathTables all_pairs_serial(std::size_t n, std::span<const WeightedArc> arcs);

/// Exhaustive search over a Cartesian product of per-slot options with an
/// additively separable score: score(choice) = sum_s value[s][choice[s]].
///
/// `conflict_key[s][o]` marks options that may be chosen by at most one slot
/// (negative = no constraint). Among feasible choices the maximal score wins;
/// exact ties go to the lexicographically smallest `order_key` vector.
struct SlotOptions {
  std::vector<double> value;
  std::vector<std::int64_t> conflict_key;
  std::vector<std::int64_t> order_key;
};

struct SearchResult {
  bool found = false;
  std::vector<std::size_t> choice;
  double score = -std::numeric_limits<double>::infinity();
};

/// Number of joint choices, saturating at `cap + 1`.
std::uint64_t product_size(std::span<const SlotOptions> slots, std::uint64_t cap);

SearchResult exhaustive_search_parallel(std::span<const SlotOptions> slots);
SearchResult exhaustive_search_serial(std::span<const SlotOptions> slots);

/// Depth-first search over the same product with a sum-of-maxima bound.
/// Returns the same choice as the exhaustive kernels, or `found == false`
/// when more than `node_budget` partial choices would have to be visited.
SearchResult branch_and_bound_search(std::span<const SlotOptions> slots,
                                     std::uint64_t node_budget);

}  // namespace rss::kernels
