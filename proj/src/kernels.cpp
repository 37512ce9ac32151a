#include "lazard/kernels.hpp"

#include "lazard/errors.hpp"

#include <omp.h>

namespace lazard::kernels {

namespace {

auto table_shell(const LazardGroup &g) -> MulTable {
  if (!g.enumerable(kMaxTableOrder))
    throw BudgetExceeded("multiplication table limited to " + std::to_string(kMaxTableOrder) +
                         " elements");
  MulTable t;
  t.order = static_cast<std::uint32_t>(g.element_count());
  t.identity = static_cast<std::uint32_t>(g.index_of(g.identity()));
  t.entries.assign(static_cast<std::size_t>(t.order) * t.order, 0);
  t.inverse.assign(t.order, 0);
  return t;
}

void fill_row(const LazardGroup &g, MulTable &t, std::uint32_t a, std::vector<Vec> &elems) {
  Vec out(g.rank());
  for (std::uint32_t b = 0; b < t.order; ++b) {
    g.mul_into(elems[a], elems[b], out);
    t.entries[static_cast<std::size_t>(a) * t.order + b] =
        static_cast<std::uint32_t>(g.index_of(out));
  }
  t.inverse[a] = static_cast<std::uint32_t>(g.index_of(g.inv(elems[a])));
}

auto all_elements(const LazardGroup &g, u64 n) -> std::vector<Vec> {
  std::vector<Vec> e(n);
  for (u64 i = 0; i < n; ++i)
    e[i] = g.element(i);
  return e;
}

void merge_into(SubtreeStats &acc, SubtreeStats &&part, std::size_t keep) {
  acc.count += part.count;
  acc.visited += part.visited;
  acc.pruned += part.pruned;
  acc.aborted = acc.aborted || part.aborted;
  for (auto &f : part.found) {
    if (acc.found.size() >= keep)
      break;
    acc.found.push_back(std::move(f));
  }
}

} // namespace

auto mul_table_serial(const LazardGroup &g) -> MulTable {
  auto t = table_shell(g);
  auto elems = all_elements(g, t.order);
  for (std::uint32_t a = 0; a < t.order; ++a)
    fill_row(g, t, a, elems);
  return t;
}

auto mul_table_omp(const LazardGroup &g) -> MulTable {
  auto t = table_shell(g);
  auto elems = all_elements(g, t.order);
  const long n = t.order;
#pragma omp parallel for schedule(static)
  for (long a = 0; a < n; ++a)
    fill_row(g, t, static_cast<std::uint32_t>(a), elems);
  return t;
}

auto associativity_failures_serial(const MulTable &t) -> u64 {
  u64 bad = 0;
  for (std::uint32_t a = 0; a < t.order; ++a)
    for (std::uint32_t b = 0; b < t.order; ++b) {
      const std::uint32_t ab = t.mul(a, b);
      for (std::uint32_t c = 0; c < t.order; ++c)
        bad += t.mul(ab, c) != t.mul(a, t.mul(b, c));
    }
  return bad;
}

auto associativity_failures_omp(const MulTable &t) -> u64 {
  u64 bad = 0;
  const long n = t.order;
#pragma omp parallel for schedule(static) reduction(+ : bad)
  for (long a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < t.order; ++b) {
      const std::uint32_t ab = t.mul(static_cast<std::uint32_t>(a), b);
      for (std::uint32_t c = 0; c < t.order; ++c)
        bad += t.mul(ab, c) != t.mul(static_cast<std::uint32_t>(a), t.mul(b, c));
    }
  return bad;
}

auto central_count_serial(const MulTable &t) -> u64 {
  u64 n = 0;
  for (std::uint32_t a = 0; a < t.order; ++a) {
    bool central = true;
    for (std::uint32_t b = 0; b < t.order && central; ++b)
      central = t.mul(a, b) == t.mul(b, a);
    n += central;
  }
  return n;
}

auto central_count_omp(const MulTable &t) -> u64 {
  u64 n = 0;
  const long order = t.order;
#pragma omp parallel for schedule(static) reduction(+ : n)
  for (long a = 0; a < order; ++a) {
    bool central = true;
    const auto ua = static_cast<std::uint32_t>(a);
    for (std::uint32_t b = 0; b < t.order && central; ++b)
      central = t.mul(ua, b) == t.mul(b, ua);
    n += central;
  }
  return n;
}

auto run_branches_serial(std::size_t branches, const SubtreeFn &fn, std::size_t keep)
    -> SubtreeStats {
  SubtreeStats acc;
  for (std::size_t b = 0; b < branches && !acc.aborted; ++b)
    merge_into(acc, fn(b), keep);
  return acc;
}

auto run_branches_omp(std::size_t branches, const SubtreeFn &fn, std::size_t keep)
    -> SubtreeStats {
  std::vector<SubtreeStats> parts(branches);
  const long n = static_cast<long>(branches);
#pragma omp parallel for schedule(dynamic, 1)
  for (long b = 0; b < n; ++b)
    parts[static_cast<std::size_t>(b)] = fn(static_cast<std::size_t>(b));
  SubtreeStats acc;
  for (auto &p : parts)
    merge_into(acc, std::move(p), keep);
  return acc;
}

} // namespace lazard::kernels
