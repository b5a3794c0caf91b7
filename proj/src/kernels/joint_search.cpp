#include "rss/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

namespace rss::kernels {

namespace {

struct Candidate {
  double score = -std::numeric_limits<double>::infinity();
  std::uint64_t index = 0;
  bool found = false;
};

void decode(std::uint64_t index, std::span<const SlotOptions> slots,
            std::vector<std::size_t>& choice) {
  // slot 0 varies slowest
  for (std::size_t s = slots.size(); s-- > 0;) {
    const auto radix = static_cast<std::uint64_t>(slots[s].value.size());
    choice[s] = static_cast<std::size_t>(index % radix);
    index /= radix;
  }
}

bool feasible(std::span<const SlotOptions> slots,
              const std::vector<std::size_t>& choice) {
  for (std::size_t a = 0; a < slots.size(); ++a) {
    const auto key = slots[a].conflict_key[choice[a]];
    if (key < 0) continue;
    for (std::size_t b = a + 1; b < slots.size(); ++b) {
      if (slots[b].conflict_key[choice[b]] == key) return false;
    }
  }
  return true;
}

double score_of(std::span<const SlotOptions> slots,
                const std::vector<std::size_t>& choice) {
  double s = 0.0;
  for (std::size_t i = 0; i < slots.size(); ++i) s += slots[i].value[choice[i]];
  return s;
}

// true when (sa, choice a) beats (sb, choice b)
bool better(std::span<const SlotOptions> slots, double sa,
            const std::vector<std::size_t>& a, double sb,
            const std::vector<std::size_t>& b) {
  if (sa != sb) return sa > sb;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto ka = slots[s].order_key[a[s]];
    const auto kb = slots[s].order_key[b[s]];
    if (ka != kb) return ka < kb;
  }
  return false;
}

std::uint64_t total_size(std::span<const SlotOptions> slots) {
  std::uint64_t total = 1;
  for (const auto& s : slots) total *= static_cast<std::uint64_t>(s.value.size());
  return total;
}

SearchResult finish(std::span<const SlotOptions> slots, const Candidate& c) {
  SearchResult r;
  if (!c.found) return r;
  r.found = true;
  r.score = c.score;
  r.choice.assign(slots.size(), 0);
  decode(c.index, slots, r.choice);
  return r;
}

}  // namespace

std::uint64_t product_size(std::span<const SlotOptions> slots, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (const auto& s : slots) {
    const auto k = static_cast<std::uint64_t>(s.value.size());
    if (k == 0) return 0;
    if (total > (cap + 1) / k) return cap + 1;
    total *= k;
  }
  return std::min(total, cap + 1);
}

SearchResult exhaustive_search_serial(std::span<const SlotOptions> slots) {
  const std::uint64_t total = total_size(slots);
  Candidate best;
  std::vector<std::size_t> choice(slots.size()), best_choice(slots.size());
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    decode(idx, slots, choice);
    if (!feasible(slots, choice)) continue;
    const double s = score_of(slots, choice);
    if (!best.found || better(slots, s, choice, best.score, best_choice)) {
      best = {s, idx, true};
      best_choice = choice;
    }
  }
  return finish(slots, best);
}

SearchResult exhaustive_search_parallel(std::span<const SlotOptions> slots) {
  const std::uint64_t total = total_size(slots);
  const int threads = omp_get_max_threads();
  std::vector<Candidate> local(static_cast<std::size_t>(threads));

#pragma omp parallel num_threads(threads)
  {
    const int tid = omp_get_thread_num();
    Candidate best;
    std::vector<std::size_t> choice(slots.size()), best_choice(slots.size());
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(total); ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      decode(idx, slots, choice);
      if (!feasible(slots, choice)) continue;
      const double s = score_of(slots, choice);
      if (!best.found || better(slots, s, choice, best.score, best_choice)) {
        best = {s, idx, true};
        best_choice = choice;
      }
    }
    local[static_cast<std::size_t>(tid)] = best;
  }

  // deterministic reduction: the comparison is a total order on candidates
  Candidate best;
  std::vector<std::size_t> a(slots.size()), b(slots.size());
  for (const auto& c : local) {
    if (!c.found) continue;
    if (!best.found) {
      best = c;
      continue;
    }
    decode(c.index, slots, a);
    decode(best.index, slots, b);
    if (better(slots, c.score, a, best.score, b)) best = c;
  }
  return finish(slots, best);
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(std::span<const SlotOptions> slots, std::uint64_t budget)
      : slots_(slots), budget_(budget), order_(slots.size()), suffix_max_(slots.size() + 1, 0.0) {
    // visiting options by ascending order key makes the first choice found
    // with a given score the lexicographically smallest one
    for (std::size_t s = 0; s < slots.size(); ++s) {
      auto& ord = order_[s];
      ord.resize(slots[s].value.size());
      for (std::size_t o = 0; o < ord.size(); ++o) ord[o] = o;
      std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
        return slots[s].order_key[a] < slots[s].order_key[b];
      });
    }
    for (std::size_t s = slots.size(); s-- > 0;) {
      const auto& v = slots[s].value;
      suffix_max_[s] = suffix_max_[s + 1] + *std::max_element(v.begin(), v.end());
    }
    choice_.assign(slots.size(), 0);
  }

  SearchResult run() {
    SearchResult r;
    if (slots_.empty()) {
      r.found = true;
      r.score = 0.0;
      return r;
    }
    for (const auto& s : slots_) {
      if (s.value.empty()) return r;
    }
    dfs(0, 0.0);
    if (aborted_ || !best_found_) return r;
    r.found = true;
    r.score = best_score_;
    r.choice = best_choice_;
    return r;
  }

 private:
  void dfs(std::size_t s, double partial) {
    if (aborted_) return;
    if (++visited_ > budget_) {
      aborted_ = true;
      return;
    }
    if (s == slots_.size()) {
      if (!best_found_ || better(slots_, partial, choice_, best_score_, best_choice_)) {
        best_found_ = true;
        best_score_ = partial;
        best_choice_ = choice_;
      }
      return;
    }
    for (std::size_t o : order_[s]) {
      const double next = partial + slots_[s].value[o];
      if (best_found_) {
        // slack keeps exact ties alive despite rounding in the bound
        const double bound = next + suffix_max_[s + 1];
        if (bound + 1e-9 * std::max(1.0, std::abs(best_score_)) < best_score_) continue;
      }
      const auto key = slots_[s].conflict_key[o];
      if (key >= 0 && std::find(used_.begin(), used_.end(), key) != used_.end()) continue;
      choice_[s] = o;
      if (key >= 0) used_.push_back(key);
      dfs(s + 1, next);
      if (key >= 0) used_.pop_back();
      if (aborted_) return;
    }
  }

  std::span<const SlotOptions> slots_;
  std::uint64_t budget_;
  std::uint64_t visited_ = 0;
  bool aborted_ = false;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<double> suffix_max_;
  std::vector<std::size_t> choice_;
  std::vector<std::int64_t> used_;
  bool best_found_ = false;
  double best_score_ = 0.0;
  std::vector<std::size_t> best_choice_;
};

}  // namespace

SearchResult branch_and_bound_search(std::span<const SlotOptions> slots,
                                     std::uint64_t node_budget) {
  return BranchAndBound(slots, node_budget).run();
}

}  // namespace rss::kernels
