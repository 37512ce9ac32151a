#pragma once

// Hot loops over whole groups. Each kernel has a serial reference and an
// OpenMP variant; both return identical results for identical inputs.

#include "lazard/group.hpp"

#include <cstdint>
#include <functional>

namespace lazard::kernels {

/// Largest group order for which a full multiplication table is built.
inline constexpr u64 kMaxTableOrder = 4096;

/// Cayley table on element indices (see LazardGroup::index_of).
struct MulTable {
  std::uint32_t order = 0;
  std::uint32_t identity = 0;
  std::vector<std::uint32_t> entries; // order * order, row = left factor
  std::vector<std::uint32_t> inverse;

  auto mul(std::uint32_t a, std::uint32_t b) const -> std::uint32_t {
    return entries[static_cast<std::size_t>(a) * order + b];
  }
};

auto mul_table_serial(const LazardGroup &g) -> MulTable;
auto mul_table_omp(const LazardGroup &g) -> MulTable;

/// Number of triples (a, b, c) with (ab)c != a(bc).
auto associativity_failures_serial(const MulTable &t) -> u64;
auto associativity_failures_omp(const MulTable &t) -> u64;

/// Number of elements commuting with every element.
auto central_count_serial(const MulTable &t) -> u64;
auto central_count_omp(const MulTable &t) -> u64;

/// Result of a backtracking search restricted to one first-level branch.
struct SubtreeStats {
  u64 count = 0;
  u64 visited = 0;
  u64 pruned = 0;
  bool aborted = false;
  /// Leaves kept for inspection, in search order.
  std::vector<std::vector<std::uint32_t>> found;
};

using SubtreeFn = std::function<SubtreeStats(std::size_t branch)>;

/// Runs every branch and merges in branch order, keeping the first `keep`
/// leaves. Totals do not depend on the schedule.
auto run_branches_serial(std::size_t branches, const SubtreeFn &fn, std::size_t keep)
    -> SubtreeStats;
auto run_branches_omp(std::size_t branches, const SubtreeFn &fn, std::size_t keep)
    -> SubtreeStats;

} // namespace lazard::kernels
