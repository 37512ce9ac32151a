#include "lazard/bch.hpp"

#include "lazard/errors.hpp"

#include <array>
#include <climits>
#include <map>
#include <mutex>
#include <optional>

namespace lazard {

HallBasis::HallBasis(unsigned maxDegree) : maxDegree_(maxDegree) {
  if (maxDegree < 1)
    throw PreconditionViolation("Hall basis degree must be at least 1");
  start_.assign(maxDegree + 2, 0);
  start_[1] = 0;
  words_.push_back({1, -1, -1, 0});
  words_.push_back({1, -1, -1, 1});
  for (unsigned n = 2; n <= maxDegree; ++n) {
    start_[n] = words_.size();
    const std::size_t before = words_.size();
    for (std::size_t u = 0; u < before; ++u)
      for (std::size_t v = u + 1; v < before; ++v) {
        const auto &wu = words_[u];
        const auto &wv = words_[v];
        if (wu.degree + wv.degree != n)
          continue;
        if (wv.degree > 1 && static_cast<std::size_t>(wv.left) > u)
          continue;
        words_.push_back({n, static_cast<int>(u), static_cast<int>(v), -1});
      }
  }
  start_[maxDegree + 1] = words_.size();
}

auto HallBasis::degree_range(unsigned n) const -> std::pair<std::size_t, std::size_t> {
  if (n < 1 || n > maxDegree_)
    return {0, 0};
  return {start_[n], start_[n + 1]};
}

auto HallBasis::count(unsigned n) const -> std::size_t {
  auto [a, b] = degree_range(n);
  return b - a;
}

auto HallBasis::str(std::size_t i) const -> std::string {
  const auto &w = words_[i];
  if (w.degree == 1)
    return w.letter == 0 ? "a" : "b";
  return "[" + str(static_cast<std::size_t>(w.left)) + "," +
         str(static_cast<std::size_t>(w.right)) + "]";
}

auto HallBasis::foliage(std::size_t i) const -> std::string {
  const auto &w = words_[i];
  if (w.degree == 1)
    return w.letter == 0 ? "a" : "b";
  return foliage(static_cast<std::size_t>(w.left)) + foliage(static_cast<std::size_t>(w.right));
}

auto hall_basis(unsigned maxDegree) -> HallBasis { return HallBasis(maxDegree); }

BchSeries::BchSeries(HallBasis basis, std::vector<PRational> coefficients)
    : basis_(std::move(basis)), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != basis_.size())
    throw PreconditionViolation("one coefficient per Hall word required");
}

auto BchSeries::truncated(unsigned d) const -> BchSeries {
  if (d > max_degree())
    throw PreconditionViolation("cannot truncate a series above its degree");
  HallBasis b(d);
  return BchSeries(b, std::vector<PRational>(coeffs_.begin(),
                                             coeffs_.begin() + static_cast<long>(b.size())));
}

auto BchSeries::min_valuation(unsigned n, u64 p) const -> int {
  auto [a, b] = basis_.degree_range(n);
  int v = INT_MAX;
  for (std::size_t i = a; i < b; ++i)
    if (!coeffs_[i].is_zero())
      v = std::min(v, coeffs_[i].valuation(p));
  return v;
}

auto associative_expansion(const HallBasis &basis, std::size_t word) -> std::vector<long> {
  const auto &w = basis.word(word);
  if (w.degree == 1) {
    std::vector<long> r(2, 0);
    r[static_cast<std::size_t>(w.letter)] = 1;
    return r;
  }
  auto u = associative_expansion(basis, static_cast<std::size_t>(w.left));
  auto v = associative_expansion(basis, static_cast<std::size_t>(w.right));
  const unsigned du = basis.word(static_cast<std::size_t>(w.left)).degree;
  const unsigned dv = basis.word(static_cast<std::size_t>(w.right)).degree;
  std::vector<long> r(std::size_t{1} << w.degree, 0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0)
      continue;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] == 0)
        continue;
      r[(i << dv) | j] += u[i] * v[j];
      r[(j << du) | i] -= u[i] * v[j];
    }
  }
  return r;
}

auto associative_bch(unsigned maxDegree) -> std::vector<std::vector<mpq_class>> {
  const unsigned dmax = maxDegree;
  std::vector<mpq_class> fact(dmax + 1, 1);
  for (unsigned i = 1; i <= dmax; ++i)
    fact[i] = fact[i - 1] * i;

  // exp(a) exp(b) - 1; degree-j part has words a^i b^(j-i)
  using Series = std::vector<std::vector<mpq_class>>;
  Series z(dmax + 1);
  for (unsigned j = 1; j <= dmax; ++j) {
    z[j].assign(std::size_t{1} << j, 0);
    for (unsigned i = 0; i <= j; ++i)
      z[j][(std::size_t{1} << (j - i)) - 1] = 1 / (fact[i] * fact[j - i]);
  }

  Series result(dmax + 1), power = z;
  for (unsigned n = 0; n <= dmax; ++n)
    result[n].assign(std::size_t{1} << n, 0);
  for (unsigned m = 1; m <= dmax; ++m) {
    mpq_class c(m % 2 == 1 ? 1 : -1, m);
    c.canonicalize();
    for (unsigned n = m; n <= dmax; ++n)
      for (std::size_t w = 0; w < power[n].size(); ++w)
        if (sgn(power[n][w]) != 0)
          result[n][w] += c * power[n][w];
    if (m == dmax)
      break;
    Series next(dmax + 1);
    for (unsigned n = 0; n <= dmax; ++n)
      next[n].assign(n == 0 ? 1 : std::size_t{1} << n, 0);
    for (unsigned n = m + 1; n <= dmax; ++n)
      for (unsigned i = m; i < n; ++i) {
        const unsigned j = n - i;
        if (power[i].empty())
          continue;
        for (std::size_t w = 0; w < power[i].size(); ++w) {
          if (sgn(power[i][w]) == 0)
            continue;
          for (unsigned jb = 0; jb <= j; ++jb) {
            std::size_t idx = (w << j) | ((std::size_t{1} << jb) - 1);
            next[n][idx] += power[i][w] * z[j][(std::size_t{1} << jb) - 1];
          }
        }
      }
    power = std::move(next);
  }
  return result;
}

namespace {

auto foliage_index(const std::string &f) -> std::size_t {
  std::size_t idx = 0;
  for (char c : f)
    idx = (idx << 1) | (c == 'b' ? 1 : 0);
  return idx;
}

// Hall projection. The Hall polynomials of one degree are linearly
// independent but no fixed word minor is triangular for this convention, so
// the system sum_g c_g P_g = B is solved modulo large primes, lifted by CRT
// and rational reconstruction, and then checked exactly over Q.

constexpr std::array<u64, 4> kProjectionPrimes = {
    (u64{1} << 61) - 1, (u64{1} << 60) - 93, (u64{1} << 59) - 55, (u64{1} << 62) - 57};

auto mulmod(u64 a, u64 b, u64 q) -> u64 {
  return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % q);
}

auto powmod(u64 a, u64 e, u64 q) -> u64 {
  u64 r = 1;
  for (; e; e >>= 1, a = mulmod(a, a, q))
    if (e & 1)
      r = mulmod(r, a, q);
  return r;
}

auto invmod(u64 a, u64 q) -> u64 { return powmod(a, q - 2, q); }

auto to_mod(long x, u64 q) -> u64 {
  auto r = x % static_cast<long long>(q);
  return static_cast<u64>(r < 0 ? r + static_cast<long long>(q) : r);
}

auto to_mod(const mpq_class &x, u64 q) -> u64 {
  u64 n = mpz_fdiv_ui(x.get_num_mpz_t(), q);
  u64 d = mpz_fdiv_ui(x.get_den_mpz_t(), q);
  return mulmod(n, invmod(d, q), q);
}

// Solution of the projection system mod q, or empty when the chosen rows do
// not determine it.
auto solve_mod(const std::vector<std::vector<long>> &exp, const std::vector<mpq_class> &rhs,
               const std::vector<std::size_t> &rows, u64 q) -> std::vector<u64> {
  const std::size_t m = exp.size();
  std::vector<std::vector<u64>> basis; // reduced rows of width m + 1
  std::vector<std::size_t> pivcol;
  for (std::size_t w : rows) {
    std::vector<u64> r(m + 1);
    for (std::size_t g = 0; g < m; ++g)
      r[g] = to_mod(exp[g][w], q);
    r[m] = to_mod(rhs[w], q);
    for (std::size_t b = 0; b < basis.size(); ++b) {
      u64 f = r[pivcol[b]];
      if (f == 0)
        continue;
      for (std::size_t c = 0; c <= m; ++c)
        if (basis[b][c] != 0)
          r[c] = (r[c] + q - mulmod(f, basis[b][c], q)) % q;
    }
    std::size_t col = 0;
    while (col < m && r[col] == 0)
      ++col;
    if (col == m) {
      if (r[m] != 0)
        throw Error("Hall projection: inconsistent system");
      continue;
    }
    u64 inv = invmod(r[col], q);
    for (auto &x : r)
      x = mulmod(x, inv, q);
    for (auto &b : basis) {
      u64 f = b[col];
      if (f == 0)
        continue;
      for (std::size_t c = 0; c <= m; ++c)
        if (r[c] != 0)
          b[c] = (b[c] + q - mulmod(f, r[c], q)) % q;
    }
    basis.push_back(std::move(r));
    pivcol.push_back(col);
    if (basis.size() == m)
      break;
  }
  if (basis.size() < m)
    return {};
  std::vector<u64> c(m);
  for (std::size_t b = 0; b < m; ++b)
    c[pivcol[b]] = basis[b][m];
  return c;
}

auto rational_reconstruction(const mpz_class &u, const mpz_class &modulus)
    -> std::optional<mpq_class> {
  mpz_class bound = sqrt(mpz_class(modulus / 2));
  mpz_class r0 = modulus, r1 = u, t0 = 0, t1 = 1;
  while (r1 > bound) {
    mpz_class q = r0 / r1;
    mpz_class r2 = r0 - q * r1;
    mpz_class t2 = t0 - q * t1;
    r0 = r1;
    r1 = r2;
    t0 = t1;
    t1 = t2;
  }
  if (t1 < 0) {
    t1 = -t1;
    r1 = -r1;
  }
  if (t1 == 0 || t1 > bound || gcd(r1, t1) != 1)
    return std::nullopt;
  mpq_class out(r1, t1);
  out.canonicalize();
  return out;
}

auto project(const std::vector<std::vector<long>> &exp, const std::vector<mpq_class> &rhs,
             const std::vector<std::size_t> &preferred) -> std::vector<mpq_class> {
  const std::size_t m = exp.size();
  std::vector<std::size_t> all(rhs.size());
  for (std::size_t w = 0; w < all.size(); ++w)
    all[w] = w;
  mpz_class modulus = 1;
  std::vector<mpz_class> residues(m, 0);
  for (u64 q : kProjectionPrimes) {
    auto c = solve_mod(exp, rhs, preferred, q);
    if (c.empty())
      c = solve_mod(exp, rhs, all, q);
    if (c.empty())
      throw Error("Hall projection: Hall polynomials are not independent");
    mpz_class qz(static_cast<unsigned long>(q));
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), mpz_class(modulus % qz).get_mpz_t(), qz.get_mpz_t());
    for (std::size_t g = 0; g < m; ++g) {
      // x = r + modulus * ((c - r) * modulus^-1 mod q)
      mpz_class t = (mpz_class(static_cast<unsigned long>(c[g])) - residues[g]) * inv;
      mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), qz.get_mpz_t());
      residues[g] += modulus * t;
    }
    modulus *= qz;

    std::vector<mpq_class> out(m);
    bool ok = true;
    for (std::size_t g = 0; g < m && ok; ++g) {
      auto r = rational_reconstruction(residues[g], modulus);
      ok = r.has_value();
      if (ok)
        out[g] = *r;
    }
    if (!ok)
      continue;
    std::vector<mpq_class> back(rhs.size());
    for (std::size_t g = 0; g < m; ++g)
      if (sgn(out[g]) != 0)
        for (std::size_t w = 0; w < back.size(); ++w)
          if (exp[g][w] != 0)
            back[w] += out[g] * exp[g][w];
    if (back == rhs)
      return out;
  }
  throw Error("Hall projection does not reproduce the associative component");
}

auto generate_series(unsigned maxDegree) -> BchSeries {
  HallBasis basis(maxDegree);
  auto assoc = associative_bch(maxDegree);
  std::vector<PRational> coeffs(basis.size());
  for (unsigned n = 1; n <= maxDegree; ++n) {
    auto [first, last] = basis.degree_range(n);
    std::vector<std::vector<long>> exp;
    std::vector<std::size_t> preferred;
    for (std::size_t h = first; h < last; ++h) {
      exp.push_back(associative_expansion(basis, h));
      preferred.push_back(foliage_index(basis.foliage(h)));
    }
    // support extremes of each Hall polynomial make good extra pivot rows
    for (const auto &e : exp) {
      std::size_t lo = e.size(), hi = 0;
      for (std::size_t w = 0; w < e.size(); ++w)
        if (e[w] != 0) {
          lo = std::min(lo, w);
          hi = w;
        }
      preferred.push_back(lo);
      preferred.push_back(hi);
    }
    auto c = project(exp, assoc[n], preferred);
    for (std::size_t g = 0; g < c.size(); ++g)
      coeffs[first + g] = PRational(c[g]);
  }
  return BchSeries(std::move(basis), std::move(coeffs));
}

} // namespace

auto bch_series(unsigned maxDegree) -> const BchSeries & {
  if (maxDegree < 1 || maxDegree > kMaxSeriesDegree)
    throw PreconditionViolation("BCH series supported for degrees 1.." +
                                std::to_string(kMaxSeriesDegree));
  static std::mutex mu;
  static std::map<unsigned, std::unique_ptr<BchSeries>> cache;
  std::lock_guard lock(mu);
  auto &slot = cache[maxDegree];
  if (!slot)
    slot = std::make_unique<BchSeries>(generate_series(maxDegree));
  return *slot;
}

auto truncation_degree(u64 p, unsigned k, const Valuation &s, unsigned scanWindow)
    -> TruncationCertificate {
  if (k < 1)
    throw PreconditionViolation("precision must be at least 1");
  if (!is_prime(p))
    throw PreconditionViolation("truncation degree needs a prime");
  if (!is_uniform_valuation(p, s))
    throw PreconditionViolation("bracket valuation " + valuation_str(s) +
                                " violates uniformity for p = " + std::to_string(p));
  TruncationCertificate cert{p, k, s, 1, scanWindow, {}};
  if (!s) {
    for (unsigned n = 1; n <= 1 + scanWindow; ++n)
      cert.margins.push_back({n, n == 1 ? 0 : INT_MAX, n == 1 ? 0 : LONG_MAX,
                              n == 1 ? "series" : "abelian"});
    return cert;
  }
  const auto &series = bch_series(kMaxSeriesDegree);
  auto entry = [&](unsigned n) -> MarginEntry {
    if (n <= kMaxSeriesDegree) {
      int v = series.min_valuation(n, p);
      long margin = v == INT_MAX ? LONG_MAX : static_cast<long>(n - 1) * *s + v;
      return {n, v, margin, "series"};
    }
    int v = -static_cast<int>((n - 1) / (p - 1));
    return {n, v, static_cast<long>(n - 1) * *s + v, "denominator-bound"};
  };
  std::vector<MarginEntry> table;
  auto margin_at = [&](unsigned n) -> const MarginEntry & {
    while (table.size() < n)
      table.push_back(entry(static_cast<unsigned>(table.size()) + 1));
    return table[n - 1];
  };
  unsigned d = 1;
  for (;; ++d) {
    bool ok = true;
    for (unsigned n = d + 1; n <= d + scanWindow && ok; ++n)
      ok = margin_at(n).margin >= static_cast<long>(k);
    if (ok)
      break;
  }
  margin_at(d + scanWindow);
  cert.degree = d;
  cert.margins.assign(table.begin(), table.begin() + d + scanWindow);
  return cert;
}

BchEvaluator::BchEvaluator(const BchSeries &series, const ReducedLieRing &ring)
    : mod_(ring.modulus()), d_(ring.rank()),
      cert_(truncation_degree(mod_.prime(), mod_.exponent(), ring.bracket_valuation())) {
  if (cert_.degree > series.max_degree())
    throw PreconditionViolation("series degree " + std::to_string(series.max_degree()) +
                                " is below the certified truncation degree " +
                                std::to_string(cert_.degree));
  const auto &s = ring.bracket_valuation();
  const auto &basis = series.basis();
  const u64 p = mod_.prime();

  if (s) {
    mpz_class ps;
    mpz_ui_pow_ui(ps.get_mpz_t(), p, *s);
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = i + 1; j < d_; ++j) {
        Entry e{i, j, {}};
        const auto &c = ring.base().stored(i, j);
        for (std::size_t l = 0; l < d_; ++l) {
          u64 r = mod_.from_mpz(mpz_class(c[l] / ps));
          if (r != 0)
            e.coeffs.emplace_back(l, r);
        }
        if (!e.coeffs.empty())
          bracket_.push_back(std::move(e));
      }
  }

  // Words longer than the nilpotency class of the reduced bracket vanish.
  unsigned depth = s ? cert_.degree : 1;
  if (s) {
    std::vector<Vec> layer;
    for (std::size_t i = 0; i < d_; ++i) {
      Vec e(d_, 0);
      e[i] = 1;
      layer.push_back(std::move(e));
    }
    for (unsigned n = 2; n <= depth; ++n) {
      std::vector<Vec> next;
      Vec out(d_);
      for (std::size_t i = 0; i < d_; ++i) {
        Vec e(d_, 0);
        e[i] = 1;
        for (const auto &b : layer) {
          reduced_bracket(e.data(), b.data(), out.data());
          if (!vec_is_zero(out))
            next.push_back(out);
        }
      }
      if (next.empty()) {
        depth = n - 1;
        break;
      }
      auto hf = howell_form(mod_, d_, next);
      layer.clear();
      for (std::size_t r = 0; r < hf.basis().rows(); ++r)
        layer.push_back(hf.basis().row_vec(r));
    }
  }
  std::size_t count = basis.degree_range(depth).second;
  std::vector<char> needed(count, 0);
  std::vector<u64> scalar(count, 0);
  for (std::size_t w = 0; w < count; ++w) {
    const auto &hw = basis.word(w);
    const auto &coef = series.coefficient(w);
    if (coef.is_zero())
      continue;
    mpq_class q = coef.value();
    if (hw.degree > 1) {
      mpz_class f;
      mpz_ui_pow_ui(f.get_mpz_t(), p, static_cast<unsigned long>((hw.degree - 1) * *s));
      q *= f;
    }
    scalar[w] = PRational(q).to_residue(mod_);
    needed[w] = 1;
  }
  for (std::size_t w = count; w-- > 0;)
    if (needed[w] && basis.word(w).degree > 1) {
      needed[static_cast<std::size_t>(basis.word(w).left)] = 1;
      needed[static_cast<std::size_t>(basis.word(w).right)] = 1;
    }
  // Compact the needed words, remapping child indices.
  std::vector<int> remap(count, -1);
  for (std::size_t w = 0; w < count; ++w) {
    if (!needed[w])
      continue;
    const auto &hw = basis.word(w);
    remap[w] = static_cast<int>(terms_.size());
    Term t{-1, -1, hw.letter, scalar[w]};
    if (hw.degree > 1) {
      t.left = remap[static_cast<std::size_t>(hw.left)];
      t.right = remap[static_cast<std::size_t>(hw.right)];
    }
    terms_.push_back(t);
  }
}

void BchEvaluator::reduced_bracket(const u64 *x, const u64 *y, u64 *out) const {
  std::fill(out, out + d_, 0);
  for (const auto &e : bracket_) {
    u64 t = mod_.sub(mod_.mul(x[e.i], y[e.j]), mod_.mul(x[e.j], y[e.i]));
    if (t == 0)
      continue;
    for (const auto &[l, c] : e.coeffs)
      out[l] = mod_.fma(out[l], c, t);
  }
}

void BchEvaluator::apply(std::span<const u64> x, std::span<const u64> y,
                         std::span<u64> out) const {
  if (x.size() != d_ || y.size() != d_ || out.size() != d_)
    throw ModulusMismatch("BCH operands must have length " + std::to_string(d_));
  constexpr std::size_t kStack = 512;
  u64 stack[kStack];
  u64 *scratch = stack;
  thread_local std::vector<u64> heap;
  if (terms_.size() * d_ > kStack) {
    heap.resize(terms_.size() * d_);
    scratch = heap.data();
  }
  std::fill(out.begin(), out.end(), 0);
  for (std::size_t w = 0; w < terms_.size(); ++w) {
    const auto &t = terms_[w];
    u64 *val = scratch + w * d_;
    if (t.letter >= 0) {
      const auto &src = t.letter == 0 ? x : y;
      std::copy(src.begin(), src.end(), val);
    } else {
      const u64 *a = scratch + static_cast<std::size_t>(t.left) * d_;
      const u64 *b = scratch + static_cast<std::size_t>(t.right) * d_;
      reduced_bracket(a, b, val);
    }
    if (t.scalar == 1) {
      for (std::size_t l = 0; l < d_; ++l)
        out[l] = mod_.add(out[l], val[l]);
    } else if (t.scalar != 0) {
      for (std::size_t l = 0; l < d_; ++l)
        if (val[l] != 0)
          out[l] = mod_.fma(out[l], t.scalar, val[l]);
    }
  }
}

auto BchEvaluator::operator()(std::span<const u64> x, std::span<const u64> y) const -> Vec {
  Vec out(d_);
  apply(x, y, out);
  return out;
}

auto evaluate_bch(const BchSeries &series, const ReducedLieRing &ring, std::span<const u64> x,
                  std::span<const u64> y) -> Vec {
  return BchEvaluator(series, ring)(x, y);
}

} // namespace lazard
