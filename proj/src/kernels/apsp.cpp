#include "rss/kernels.hpp"

namespace rss::kernels {

namespace {

PathTables seed_tables(std::size_t n, std::span<const WeightedArc> arcs) {
  PathTables t;
  t.n = n;
  t.dist.assign(n * n, kUnreachable);
  t.next_arc.assign(n * n, -1);
  for (std::size_t i = 0; i < n; ++i) t.dist[i * n + i] = 0.0;
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const auto& arc = arcs[a];
    const std::size_t cell = static_cast<std::size_t>(arc.from) * n +
                             static_cast<std::size_t>(arc.to);
    // parallel arcs: keep the shortest, first index wins on ties
    if (arc.length < t.dist[cell]) {
      t.dist[cell] = arc.length;
      t.next_arc[cell] = static_cast<std::int32_t>(a);
    }
  }
  return t;
}

// One relaxation of row i through pivot k. Shared by both kernels so the
// floating-point operation order is identical.
inline void relax_row(PathTables& t, std::size_t k, std::size_t i) {
  const std::size_t n = t.n;
  const double dik = t.dist[i * n + k];
  if (dik == kUnreachable || i == k) return;
  const double* row_k = &t.dist[k * n];
  double* row_i = &t.dist[i * n];
  std::int32_t* next_i = &t.next_arc[i * n];
  const std::int32_t via = next_i[k];
  for (std::size_t j = 0; j < n; ++j) {
    const double cand = dik + row_k[j];
    if (cand < row_i[j]) {
      row_i[j] = cand;
      next_i[j] = via;
    }
  }
}

}  // namespace

PathTables all_pairs_parallel(std::size_t n, std::span<const WeightedArc> arcs) {
  PathTables t = seed_tables(n, arcs);
  const auto rows = static_cast<std::int64_t>(n);
  for (std::size_t k = 0; k < n; ++k) {
    // row k itself is unchanged by pivot k, so rows are independent
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) {
      relax_row(t, k, static_cast<std::size_t>(i));
    }
  }
  return t;
}

PathTables all_pairs_serial(std::size_t n, std::span<const WeightedArc> arcs) {
  PathTables t = seed_tables(n, arcs);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) relax_row(t, k, i);
  }
  return t;
}

}  // namespace rss::kernels
