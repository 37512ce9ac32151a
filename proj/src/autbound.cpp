#include "lazard/autbound.hpp"

#include "lazard/cohomology.hpp"
#include "lazard/errors.hpp"
#include "lazard/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>

namespace lazard {

namespace {

using u32 = std::uint32_t;

auto ipow(u64 p, unsigned e) -> mpz_class {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), p, e);
  return r;
}

// rank of the given vectors over F_p (entries already reduced mod p)
auto rank_mod_p(u64 p, std::vector<Vec> rows, std::size_t width) -> std::size_t {
  Modulus mod(p, 1);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < width && rank < rows.size(); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][c] == 0)
      ++piv;
    if (piv == rows.size())
      continue;
    std::swap(rows[rank], rows[piv]);
    const u64 inv = mod.inverse(rows[rank][c]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const u64 f = mod.mul(rows[r][c], inv);
      if (f == 0)
        continue;
      for (std::size_t cc = c; cc < width; ++cc)
        rows[r][cc] = mod.sub(rows[r][cc], mod.mul(f, rows[rank][cc]));
    }
    ++rank;
  }
  return rank;
}

// Shared node counter and deadline for one search.
struct SearchBudget {
  u64 nodeBudget;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::atomic<u64> nodes{0};

  explicit SearchBudget(const AutSearchOptions &opts) : nodeBudget(opts.nodeBudget) {
    if (opts.timeLimitSeconds > 0)
      deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(opts.timeLimitSeconds));
  }

  auto exhausted() -> bool {
    const u64 n = nodes.fetch_add(1, std::memory_order_relaxed);
    if (n >= nodeBudget)
      return true;
    return deadline && (n & 0xfff) == 0 && std::chrono::steady_clock::now() > *deadline;
  }
};

// ---------------------------------------------------------------------------
// Group-side search

struct PcRelation {
  std::size_t lower, upper;
  /// Right-hand side as a product of pcgs generators, in order.
  std::vector<std::size_t> word;
};

struct GroupSearch {
  const kernels::MulTable &t;
  u64 p;
  unsigned m;
  std::size_t d;
  std::vector<u32> candidates;
  std::vector<u32> frattini; // coordinates mod p as a base-p integer
  u32 frattiniSize;
  /// Search position -> generator, and the relations first checkable there.
  std::vector<std::size_t> genAt;
  std::vector<std::vector<PcRelation>> relationsAt;
  std::vector<u64> subgroupOrder;
  SearchBudget *budget;

  auto pow_p(u32 x) const -> u32 {
    u32 r = t.identity;
    for (u64 c = 0; c < p; ++c)
      r = t.mul(r, x);
    return r;
  }

  auto closure_size(const std::vector<u32> &gens, std::vector<u32> &stamp, u32 &epoch,
                    std::vector<u32> &queue) const -> u64 {
    ++epoch;
    queue.assign(1, t.identity);
    stamp[t.identity] = epoch;
    for (std::size_t h = 0; h < queue.size(); ++h)
      for (u32 s : gens) {
        u32 y = t.mul(queue[h], s);
        if (stamp[y] != epoch) {
          stamp[y] = epoch;
          queue.push_back(y);
        }
      }
    return queue.size();
  }

  auto frattini_add(u32 a, u32 b) const -> u32 {
    u32 r = 0, scale = 1;
    for (std::size_t c = 0; c < d; ++c) {
      r += static_cast<u32>(((a % p) + (b % p)) % p) * scale;
      a /= static_cast<u32>(p);
      b /= static_cast<u32>(p);
      scale *= static_cast<u32>(p);
    }
    return r;
  }

  struct State {
    std::vector<u32> img;  // by search position
    std::vector<u32> pc;   // level-major, m * d, by generator
    std::vector<u32> gens; // prefix images for closure
    /// Frattini span of the images at positions < i, as member list and mask.
    std::vector<std::vector<u32>> spanList;
    std::vector<std::vector<char>> spanMask;
    std::vector<u32> stamp, queue;
    u32 epoch = 0;
  };

  auto make_state() const -> State {
    State s;
    s.img.assign(d, 0);
    s.pc.assign(m * d, 0);
    s.spanList.assign(d + 1, {});
    s.spanMask.assign(d + 1, std::vector<char>(frattiniSize, 0));
    s.spanList[0] = {0};
    s.spanMask[0][0] = 1;
    s.stamp.assign(t.order, 0);
    return s;
  }

  auto relation_holds(const State &s, const PcRelation &r) const -> bool {
    const u32 a = s.pc[r.lower];
    u32 lhs = t.mul(t.mul(t.inverse[a], s.pc[r.upper]), a);
    u32 rhs = t.identity;
    for (std::size_t n : r.word)
      rhs = t.mul(rhs, s.pc[n]);
    return lhs == rhs;
  }

  void assign(State &s, std::size_t i, u32 x) const {
    const std::size_t gi = genAt[i];
    s.img[i] = x;
    s.pc[gi] = x;
    for (unsigned l = 1; l < m; ++l)
      s.pc[l * d + gi] = pow_p(s.pc[(l - 1) * d + gi]);
  }

  // candidate x at search position i, given positions 0..i-1
  auto accept(State &s, std::size_t i, u32 x, kernels::SubtreeStats &st) const -> bool {
    if (s.spanMask[i][frattini[x]])
      return ++st.pruned, false;
    assign(s, i, x);
    for (const auto &r : relationsAt[i])
      if (!relation_holds(s, r))
        return ++st.pruned, false;
    if (i + 1 < d) {
      if (i > 0) {
        s.gens.assign(s.img.begin(), s.img.begin() + static_cast<long>(i + 1));
        if (closure_size(s.gens, s.stamp, s.epoch, s.queue) != subgroupOrder[i])
          return ++st.pruned, false;
      }
      auto &list = s.spanList[i + 1];
      auto &mask = s.spanMask[i + 1];
      for (u32 y : list)
        mask[y] = 0;
      list.clear();
      for (u32 y : s.spanList[i]) {
        u32 z = y;
        for (u64 c = 0; c < p; ++c) {
          if (!mask[z]) {
            mask[z] = 1;
            list.push_back(z);
          }
          z = frattini_add(z, frattini[x]);
        }
      }
    }
    return true;
  }

  void dfs(State &s, std::size_t i, kernels::SubtreeStats &st, std::size_t keep) const {
    for (u32 x : candidates) {
      if (st.aborted)
        return;
      ++st.visited;
      if (budget->exhausted()) {
        st.aborted = true;
        return;
      }
      if (!accept(s, i, x, st))
        continue;
      if (i + 1 == d) {
        ++st.count;
        if (st.found.size() < keep)
          st.found.push_back(images(s));
      } else {
        dfs(s, i + 1, st, keep);
      }
    }
  }

  /// Images by generator index.
  auto images(const State &s) const -> std::vector<u32> {
    std::vector<u32> out(d);
    for (std::size_t i = 0; i < d; ++i)
      out[genAt[i]] = s.img[i];
    return out;
  }

  auto branch(std::size_t b, std::size_t keep) const -> kernels::SubtreeStats {
    kernels::SubtreeStats st;
    auto s = make_state();
    ++st.visited;
    if (budget->exhausted()) {
      st.aborted = true;
      return st;
    }
    if (!accept(s, 0, candidates[b], st))
      return st;
    if (d == 1) {
      st.count = 1;
      if (keep > 0)
        st.found.push_back(images(s));
      return st;
    }
    dfs(s, 1, st, keep);
    return st;
  }
};

auto element_order(const kernels::MulTable &t, u64 p, u32 x) -> u64 {
  u64 order = 1;
  while (x != t.identity) {
    u32 y = t.identity;
    for (u64 c = 0; c < p; ++c)
      y = t.mul(y, x);
    x = y;
    order *= p;
  }
  return order;
}

// Full-table verification of a found automorphism.
void verify_on_table(const kernels::MulTable &t,
                     const std::vector<std::vector<unsigned>> &digits,
                     const std::vector<u32> &pc) {
  std::vector<u32> image(t.order);
  std::vector<char> hit(t.order, 0);
  for (u32 x = 0; x < t.order; ++x) {
    u32 y = t.identity;
    for (std::size_t n = 0; n < pc.size(); ++n)
      for (unsigned c = 0; c < digits[x][n]; ++c)
        y = t.mul(y, pc[n]);
    image[x] = y;
    if (hit[y])
      throw Error("aut_bruteforce: found map is not injective");
    hit[y] = 1;
  }
  for (u32 a = 0; a < t.order; ++a)
    for (u32 b = 0; b < t.order; ++b)
      if (image[t.mul(a, b)] != t.mul(image[a], image[b]))
        throw Error("aut_bruteforce: found map is not a homomorphism");
}

} // namespace

auto aut_bruteforce(const LazardGroup &g, const AutSearchOptions &opts) -> AutSearchResult {
  if (!g.enumerable(opts.budget))
    throw BudgetExceeded("aut_bruteforce: |G| = p^" + std::to_string(g.order_exponent()) +
                         " exceeds the budget of " + std::to_string(opts.budget) + " elements");
  const auto t = opts.parallel ? kernels::mul_table_omp(g) : kernels::mul_table_serial(g);
  const std::size_t d = g.rank();
  const unsigned m = g.precision();
  const u64 p = g.prime();
  SearchBudget budget(opts);
  GroupSearch s{t, p, m, d, {}, {}, 1, {}, {}, {}, &budget};

  Modulus modp(p, 1);
  for (std::size_t c = 0; c < d; ++c)
    s.frattiniSize *= static_cast<u32>(p);
  s.frattini.resize(t.order);
  std::vector<u64> orders(t.order);
  for (u32 x = 0; x < t.order; ++x) {
    u32 f = 0;
    for (u64 v : vec_reduce(modp, g.element(x)))
      f = f * static_cast<u32>(p) + static_cast<u32>(v);
    s.frattini[x] = f;
    orders[x] = element_order(t, p, x);
  }
  const auto gens = g.generators();
  const u64 genOrder = orders[g.index_of(gens[0])];
  // candidates sorted by (order, coordinates); index order is coordinate order
  for (u32 x = 0; x < t.order; ++x)
    if (orders[x] == genOrder && s.frattini[x] != 0)
      s.candidates.push_back(x);

  // Each relation needs the generators of its two sides. Generators are
  // searched in the order that makes the most relations checkable earliest.
  struct Needed {
    PcRelation rel;
    std::vector<char> gens;
  };
  std::vector<Needed> needed;
  for (const auto &r : g.pc_relations()) {
    Needed nd{{r.lower, r.upper, {}}, std::vector<char>(d, 0)};
    nd.gens[r.lower % d] = nd.gens[r.upper % d] = 1;
    for (std::size_t n = 0; n < r.digits.size(); ++n)
      for (unsigned c = 0; c < r.digits[n]; ++c) {
        nd.rel.word.push_back(n);
        nd.gens[n % d] = 1;
      }
    needed.push_back(std::move(nd));
  }
  std::vector<char> chosen(d, 0);
  auto coveredBy = [&](const Needed &nd, std::size_t extra) {
    for (std::size_t i = 0; i < d; ++i)
      if (nd.gens[i] && !chosen[i] && i != extra)
        return false;
    return true;
  };
  s.relationsAt.resize(d);
  for (std::size_t pos = 0; pos < d; ++pos) {
    std::size_t best = d, bestCount = 0;
    for (std::size_t cand = 0; cand < d; ++cand) {
      if (chosen[cand])
        continue;
      std::size_t count = 0;
      for (const auto &nd : needed)
        count += coveredBy(nd, cand);
      if (best == d || count > bestCount)
        best = cand, bestCount = count;
    }
    for (const auto &nd : needed)
      if (coveredBy(nd, best) && !coveredBy(nd, d))
        s.relationsAt[pos].push_back(nd.rel);
    chosen[best] = 1;
    s.genAt.push_back(best);
  }
  for (auto &rels : s.relationsAt)
    std::stable_sort(rels.begin(), rels.end(), [](const PcRelation &a, const PcRelation &b) {
      return a.word.size() < b.word.size();
    });
  {
    std::vector<u32> stamp(t.order, 0), queue;
    u32 epoch = 0;
    std::vector<u32> prefix;
    for (std::size_t i = 0; i < d; ++i) {
      prefix.push_back(static_cast<u32>(g.index_of(gens[s.genAt[i]])));
      s.subgroupOrder.push_back(s.closure_size(prefix, stamp, epoch, queue));
    }
  }

  auto fn = [&](std::size_t b) { return s.branch(b, opts.keep); };
  auto stats = opts.parallel ? kernels::run_branches_omp(s.candidates.size(), fn, opts.keep)
                             : kernels::run_branches_serial(s.candidates.size(), fn, opts.keep);
  if (stats.aborted)
    throw BudgetExceeded("aut_bruteforce: node or time budget exhausted; no partial count "
                         "reported");

  AutSearchResult res;
  res.order = mpz_class(std::to_string(stats.count));
  res.visitedNodes = stats.visited;
  res.prunedNodes = stats.pruned;
  std::vector<std::vector<unsigned>> digits(t.order);
  for (u32 x = 0; x < t.order; ++x)
    digits[x] = g.pc_digits(g.element(x));
  for (const auto &img : stats.found) {
    auto st = s.make_state();
    for (std::size_t i = 0; i < d; ++i)
      s.assign(st, i, img[s.genAt[i]]);
    verify_on_table(t, digits, st.pc);
    Endomorphism e;
    for (u32 x : img)
      e.images.push_back(g.element(x));
    res.generatorImages.push_back(std::move(e));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Lie-side search

namespace {

struct BasisPair {
  std::size_t i, j;
  Vec coeffs;
  std::size_t level;
};

struct LieSearch {
  const ReducedLieRing &ring;
  Modulus mod;
  std::size_t d;
  u64 total; // p^{m d}
  std::vector<std::vector<BasisPair>> pairsAt;
  SearchBudget *budget;

  auto vector_at(u64 index) const -> Vec {
    Vec v(d);
    for (std::size_t c = d; c-- > 0;) {
      v[c] = index % mod.value();
      index /= mod.value();
    }
    return v;
  }

  auto independent(const std::vector<Vec> &cols) const -> bool {
    Modulus modp(mod.prime(), 1);
    std::vector<Vec> rows;
    for (const auto &c : cols)
      rows.push_back(vec_reduce(modp, c));
    return rank_mod_p(mod.prime(), rows, d) == cols.size();
  }

  // The level-t bracket conditions on the next column, as x0 + K. Without
  // conditions at this level every vector qualifies.
  auto affine(const std::vector<Vec> &cols, std::size_t t) const
      -> std::optional<LinearSolution> {
    const auto &pairs = pairsAt[t];
    if (pairs.empty())
      return LinearSolution{Vec(d, 0), full_span(mod, d)};
    const std::size_t q = pairs.size();
    ResidueMatrix big(mod, d, d * q);
    Vec b(d * q, 0);
    for (std::size_t e = 0; e < q; ++e) {
      const auto &pr = pairs[e];
      std::optional<ResidueMatrix> ad;
      if (pr.j == t)
        ad = ring.ad(cols[pr.i]);
      Vec w = pr.j < t ? ring.bracket(cols[pr.i], cols[pr.j]) : Vec(d, 0);
      for (std::size_t r = 0; r < t; ++r)
        if (pr.coeffs[r] != 0)
          w = vec_sub(mod, w, vec_scale(mod, pr.coeffs[r], cols[r]));
      for (std::size_t srow = 0; srow < d; ++srow) {
        b[e * d + srow] = w[srow];
        for (std::size_t u = 0; u < d; ++u) {
          u64 entry = srow == u ? pr.coeffs[t] : 0;
          if (ad)
            entry = mod.sub(entry, ad->at(srow, u));
          big.set(u, e * d + srow, entry);
        }
      }
    }
    return solve_linear(big, b);
  }

  // Calls fn(x) for each element of x0 + K until it returns false. Howell
  // rows with pivot p^v take coefficients in [0, p^{m - v}), which lists
  // every element exactly once.
  template <class Fn> void enumerate(const LinearSolution &sol, Fn &&fn) const {
    const auto &kb = sol.kernel.basis();
    std::vector<u64> range(kb.rows());
    for (std::size_t r = 0; r < kb.rows(); ++r) {
      const unsigned v = sol.kernel.pivots()[r].valuation;
      u64 n = 1;
      for (unsigned e = v; e < mod.exponent(); ++e)
        n *= mod.prime();
      range[r] = n;
    }
    std::vector<u64> coef(kb.rows(), 0);
    while (true) {
      Vec x = sol.particular;
      for (std::size_t r = 0; r < kb.rows(); ++r)
        if (coef[r] != 0)
          x = vec_add(mod, x, vec_scale(mod, coef[r], kb.row(r)));
      if (!fn(std::move(x)))
        return;
      std::size_t r = 0;
      while (r < coef.size() && ++coef[r] == range[r])
        coef[r++] = 0;
      if (r == coef.size())
        return;
    }
  }

  // Number of x in x0 + K independent of cols mod p: |x0 + K| minus the part
  // inside W = span(cols) + pL, which is a coset of K n W when nonempty.
  auto count_last(const std::vector<Vec> &cols, const LinearSolution &sol) const -> u64 {
    std::vector<Vec> wRows = cols;
    for (std::size_t i = 0; i < d; ++i) {
      Vec e(d, 0);
      e[i] = mod.prime() % mod.value();
      wRows.push_back(std::move(e));
    }
    const auto w = howell_form(mod, d, wRows);
    const auto &kb = sol.kernel.basis();
    for (std::size_t r = 0; r < kb.rows(); ++r)
      wRows.push_back(kb.row_vec(r));
    const auto kw = howell_form(mod, d, wRows);
    const unsigned eK = sol.kernel.order_exponent();
    u64 all = 1;
    for (unsigned e = 0; e < eK; ++e)
      all *= mod.prime();
    if (!kw.contains(sol.particular))
      return all;
    u64 inside = 1;
    for (unsigned e = 0; e < eK + w.order_exponent() - kw.order_exponent(); ++e)
      inside *= mod.prime();
    return all - inside;
  }

  void dfs(std::vector<Vec> &cols, kernels::SubtreeStats &st, std::size_t keep) const {
    const std::size_t t = cols.size();
    const auto sol = affine(cols, t);
    if (!sol)
      return;
    if (t + 1 == d) {
      ++st.visited;
      if (budget->exhausted()) {
        st.aborted = true;
        return;
      }
      const u64 n = count_last(cols, *sol);
      if (__builtin_add_overflow(st.count, n, &st.count))
        throw BudgetExceeded("lie_matrix_automorphisms: count exceeds 64 bits");
      if (st.found.size() < keep && n > 0)
        enumerate(*sol, [&](Vec x) {
          cols.push_back(std::move(x));
          if (independent(cols)) {
            std::vector<u32> flat;
            for (const auto &c : cols)
              for (u64 v : c)
                flat.push_back(static_cast<u32>(v));
            st.found.push_back(std::move(flat));
          }
          cols.pop_back();
          return st.found.size() < keep;
        });
      return;
    }
    enumerate(*sol, [&](Vec x) {
      ++st.visited;
      if (budget->exhausted()) {
        st.aborted = true;
        return false;
      }
      cols.push_back(std::move(x));
      if (!independent(cols))
        ++st.pruned;
      else
        dfs(cols, st, keep);
      cols.pop_back();
      return !st.aborted;
    });
  }

  auto branch(std::size_t b, std::size_t keep) const -> kernels::SubtreeStats {
    kernels::SubtreeStats st;
    std::vector<Vec> cols{vector_at(b)};
    ++st.visited;
    if (budget->exhausted()) {
      st.aborted = true;
      return st;
    }
    if (!independent(cols)) {
      ++st.pruned;
      return st;
    }
    if (d == 1) {
      st.count = 1;
      if (keep > 0)
        st.found.push_back({static_cast<u32>(cols[0][0])});
      return st;
    }
    dfs(cols, st, keep);
    return st;
  }
};

} // namespace

auto lie_matrix_automorphisms(const ReducedLieRing &ring, const AutSearchOptions &opts)
    -> AutSearchResult {
  const std::size_t d = ring.rank();
  if (d > 4)
    throw PreconditionViolation("lie_matrix_automorphisms handles rank at most 4");
  const auto &mod = ring.modulus();
  if (mod.value() > (u64{1} << 31))
    throw PreconditionViolation("lie_matrix_automorphisms needs p^m below 2^31");
  u64 total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (total > opts.nodeBudget / mod.value())
      throw BudgetExceeded("lie_matrix_automorphisms: column space exceeds the node budget");
    total *= mod.value();
  }
  SearchBudget budget(opts);
  LieSearch s{ring, mod, d, total, std::vector<std::vector<BasisPair>>(d), &budget};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      Vec c = ring.basis_bracket(i, j);
      std::size_t level = j;
      for (std::size_t r = 0; r < d; ++r)
        if (c[r] != 0)
          level = std::max(level, r);
      s.pairsAt[level].push_back({i, j, std::move(c), level});
    }

  auto fn = [&](std::size_t b) { return s.branch(b, opts.keep); };
  const auto branches = static_cast<std::size_t>(total);
  auto stats = opts.parallel ? kernels::run_branches_omp(branches, fn, opts.keep)
                             : kernels::run_branches_serial(branches, fn, opts.keep);
  if (stats.aborted)
    throw BudgetExceeded("lie_matrix_automorphisms: node or time budget exhausted");

  AutSearchResult res;
  res.order = mpz_class(std::to_string(stats.count));
  res.visitedNodes = stats.visited;
  res.prunedNodes = stats.pruned;
  for (const auto &flat : stats.found) {
    Endomorphism e;
    for (std::size_t c = 0; c < d; ++c) {
      Vec col(flat.begin() + static_cast<long>(c * d), flat.begin() + static_cast<long>(c * d + d));
      e.images.push_back(std::move(col));
    }
    // bracket-preserving on every basis pair
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        Vec lhs(d, 0);
        Vec br = ring.basis_bracket(i, j);
        for (std::size_t r = 0; r < d; ++r)
          lhs = vec_add(mod, lhs, vec_scale(mod, br[r], e.images[r]));
        if (lhs != ring.bracket(e.images[i], e.images[j]))
          throw Error("lie_matrix_automorphisms: found matrix does not preserve the bracket");
      }
    res.generatorImages.push_back(std::move(e));
  }
  return res;
}

// ---------------------------------------------------------------------------

auto inn_order(const LazardGroup &g) -> InnOrder {
  InnOrder r{};
  if (g.enumerable(kernels::kMaxTableOrder)) {
    auto t = kernels::mul_table_omp(g);
    u64 c = kernels::central_count_omp(t);
    unsigned e = 0;
    while (c > 1) {
      if (c % g.prime() != 0)
        throw Error("center order is not a power of p");
      c /= g.prime();
      ++e;
    }
    r.centerExp = e;
    r.method = "exhaustive";
  } else {
    r.centerExp = center(g.ring()).orderExponent;
    r.method = "lie-center";
  }
  r.innExp = g.order_exponent() - r.centerExp;
  return r;
}

auto stabilization_k(const LieRingData &data, unsigned iMin, unsigned iMax,
                     const StabilizationOptions &opts) -> StabilizationResult {
  if (iMin < 1 || iMin > iMax)
    throw PreconditionViolation("stabilization_k needs 1 <= iMin <= iMax");
  require_valid(data);
  const auto uni = uniformity(data);
  if (!uni.uniform)
    throw PreconditionViolation("stabilization_k needs a uniform ring");
  StabilizationResult res{0, iMin, iMax, {}, false};
  for (unsigned i = iMin; i <= iMax; ++i) {
    StabilizationLevel lv{i, 0, 0, ""};
    const unsigned top = 2 * i - 1;
    bool groupSide = false;
    if (static_cast<double>(data.rank()) * top * std::log2(static_cast<double>(data.prime())) <
        64.0) {
      mpz_class order = ipow(data.prime(), static_cast<unsigned>(data.rank() * top));
      groupSide = order <= mpz_class(std::to_string(opts.groupBudget));
    }
    if (groupSide) {
      auto g = std::make_shared<const LazardGroup>(data, top);
      auto sp = z1_space(GAction::from_section(g, i - 1, top), opts.groupBudget);
      lv.h1Exp = sp.h1Exp;
      lv.annihilatorExp = sp.h1AnnihilatorExp;
      lv.method = "group-h1";
    } else {
      auto der = derivations(ReducedLieRing(data, i));
      lv.h1Exp = der.h1OrderExp;
      lv.annihilatorExp = der.h1AnnihilatorExp;
      lv.method = "lie-der";
    }
    res.k = std::max(res.k, lv.annihilatorExp);
    res.levels.push_back(std::move(lv));
  }
  const auto &lv = res.levels;
  res.stabilizes = lv.size() >= 3 && lv[lv.size() - 1].annihilatorExp ==
                                         lv[lv.size() - 2].annihilatorExp &&
                   lv[lv.size() - 2].annihilatorExp == lv[lv.size() - 3].annihilatorExp;
  return res;
}

auto bound_report(const LieRingData &data, unsigned k, unsigned iMax, const BoundOptions &opts)
    -> BoundReport {
  require_valid(data);
  const auto uni = uniformity(data);
  if (!uni.uniform)
    throw PreconditionViolation("bound_report needs a uniform ring; s = " +
                                valuation_str(uni.s));
  if (k < 1)
    throw PreconditionViolation("bound_report needs k >= 1");
  const u64 p = data.prime();
  const std::size_t d = data.rank();
  BoundReport r{p, d, center_free_rank(data), k, std::nullopt, "unavailable", 0, std::nullopt,
                std::nullopt, {}, mpq_class(0), {}, false, "", {}};
  const std::size_t z = r.z.z;
  r.kernelBoundExp = static_cast<unsigned>(d * d * k);
  r.ratioExponent = mpq_class(static_cast<long>(d - z), static_cast<long>(d));
  r.ratioExponent.canonicalize();

  LazardGroup uk(data, k);
  try {
    r.autUkOrder = aut_bruteforce(uk, opts.aut).order;
    r.autUkMethod = "bruteforce";
  } catch (const BudgetExceeded &) {
    try {
      r.autUkOrder = lie_matrix_automorphisms(uk.ring(), opts.aut).order;
      r.autUkMethod = "lie-matrix";
    } catch (const Error &e) {
      r.refusals.push_back(std::string("|Aut(U_k)| unavailable: ") + e.what());
    }
  }
  if (r.autUkOrder) {
    mpz_class cof = *r.autUkOrder;
    unsigned e = 0;
    while (mpz_divisible_ui_p(cof.get_mpz_t(), p)) {
      cof /= p;
      ++e;
    }
    r.dCofactor = cof;
    r.dExp = e + r.kernelBoundExp;
  }

  for (unsigned i = 1; i <= iMax; ++i) {
    LevelBound lb{i, static_cast<unsigned>(d * i), static_cast<unsigned>((d - z) * i), "",
                  std::nullopt, std::nullopt};
    if (i < k)
      lb.validity = "below-k";
    else
      lb.validity = i <= 2 * k ? "unconditional" : "conditional";
    if (i >= k && r.dExp) {
      lb.autBoundExp = *r.dExp + lb.innExpBound;
      lb.autBound = *r.dCofactor * ipow(p, *lb.autBoundExp);
    }
    r.perLevel.push_back(std::move(lb));
  }

  r.stabilization = opts.stabilization
                        ? *opts.stabilization
                        : stabilization_k(data, 1, std::max(3u, opts.stabilizationMax));
  r.hypothesisHolds = true;
  if (data.is_abelian()) {
    r.hypothesisHolds = false;
    r.refusals.push_back("abelian ring: every matrix is a derivation, so Der = Inn fails");
  }
  if (z == d) {
    r.hypothesisHolds = false;
    r.refusals.push_back("z = d: the center has full rank and Inn(U_i) stays bounded");
  }
  if (!r.stabilization.stabilizes) {
    r.hypothesisHolds = false;
    r.refusals.push_back("H^1 annihilator exponents do not stabilize over levels " +
                         std::to_string(r.stabilization.iMin) + ".." +
                         std::to_string(r.stabilization.iMax));
  } else if (r.stabilization.k > k) {
    r.hypothesisHolds = false;
    r.refusals.push_back("supplied k = " + std::to_string(k) +
                         " is below the measured annihilator exponent " +
                         std::to_string(r.stabilization.k));
  }
  if (r.hypothesisHolds && r.dExp)
    r.conclusion = "|Aut(U_i)| <= D * |U_i|^(" + r.ratioExponent.get_str() +
                   ") for all i >= k (k empirical over the tested levels)";
  else
    r.conclusion = "refused";
  return r;
}

auto symbolic_bound(std::size_t d, std::size_t z) -> SymbolicBound {
  if (d == 0 || z > d)
    throw PreconditionViolation("symbolic_bound needs 0 <= z <= d, d >= 1");
  SymbolicBound s{d,
                  z,
                  static_cast<unsigned>(d),
                  static_cast<unsigned>(d - z),
                  static_cast<unsigned>(d * d),
                  mpq_class(static_cast<long>(d - z), static_cast<long>(d))};
  s.ratioExponent.canonicalize();
  return s;
}

auto totient_ratio(u64 p, unsigned orderExp, const mpz_class &autOrder, std::size_t d,
                   std::size_t z) -> TotientRatio {
  if (z > d || d == 0)
    throw PreconditionViolation("totient_ratio needs 0 <= z <= d, d >= 1");
  TotientRatio r;
  r.phi = orderExp == 0 ? mpz_class(1) : ipow(p, orderExp) - ipow(p, orderExp - 1);
  r.autOverPhi = mpq_class(autOrder, r.phi);
  r.autOverPhi.canonicalize();
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), autOrder.get_mpz_t(), d);
  mpz_pow_ui(den.get_mpz_t(), r.phi.get_mpz_t(), d - z);
  r.powerRatio = mpq_class(num, den);
  r.powerRatio.canonicalize();
  const double e = static_cast<double>(d - z) / static_cast<double>(d);
  r.scaledRatio = std::exp(std::log(autOrder.get_d()) - e * std::log(r.phi.get_d()));
  return r;
}

} // namespace lazard
