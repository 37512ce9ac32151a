#include "oracles.hpp"

#include "lazard/bch.hpp"

#include <set>
#include <stdexcept>

namespace oracle {

auto witt_count(unsigned n) -> u64 {
  auto mobius = [](unsigned k) {
    int mu = 1;
    for (unsigned q = 2; q * q <= k; ++q)
      if (k % q == 0) {
        k /= q;
        if (k % q == 0)
          return 0;
        mu = -mu;
      }
    return k > 1 ? -mu : mu;
  };
  long long sum = 0;
  for (unsigned e = 1; e <= n; ++e)
    if (n % e == 0)
      sum += mobius(e) * (1LL << (n / e));
  return static_cast<u64>(sum / n);
}

namespace {

auto multiply(const Poly &x, const Poly &y, unsigned degree) -> Poly {
  Poly out;
  for (const auto &[u, cu] : x)
    for (const auto &[v, cv] : y)
      if (u.size() + v.size() <= degree)
        out[u + v] += cu * cv;
  for (auto it = out.begin(); it != out.end();)
    it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

auto exp_letter(char c, unsigned degree) -> Poly {
  Poly out;
  mpq_class f = 1;
  for (unsigned n = 0; n <= degree; ++n) {
    out[std::string(n, c)] = 1 / f;
    f *= n + 1;
  }
  return out;
}

} // namespace

auto free_log_exp_exp(unsigned degree) -> Poly {
  Poly x = multiply(exp_letter('a', degree), exp_letter('b', degree), degree);
  x.erase("");
  Poly out, power = x;
  for (unsigned n = 1; n <= degree; ++n) {
    const mpq_class c = mpq_class(n % 2 ? 1 : -1, n);
    for (const auto &[w, v] : power)
      out[w] += c * v;
    power = multiply(power, x, degree);
  }
  for (auto it = out.begin(); it != out.end();)
    it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

auto expand_hall_word(const lazard::HallBasis &basis, std::size_t word) -> Poly {
  const auto &w = basis.word(word);
  if (w.left < 0)
    return {{std::string(1, w.letter == 0 ? 'a' : 'b'), 1}};
  const Poly u = expand_hall_word(basis, static_cast<std::size_t>(w.left));
  const Poly v = expand_hall_word(basis, static_cast<std::size_t>(w.right));
  Poly out;
  for (const auto &[s, cs] : u)
    for (const auto &[t, ct] : v) {
      out[s + t] += cs * ct;
      out[t + s] -= cs * ct;
    }
  for (auto it = out.begin(); it != out.end();)
    it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

HeisenbergMatrices::HeisenbergMatrices(u64 p, unsigned s, unsigned m) : p_(p), ps_(1), pm_(1) {
  for (unsigned t = 0; t < s; ++t)
    ps_ *= p;
  for (unsigned t = 0; t < m; ++t)
    pm_ *= p;
  big_ = ps_ * pm_;
  inv2_ = (big_ + 1) / 2;
}

auto HeisenbergMatrices::mul(const Vec &x, const Vec &y) const -> Vec {
  const auto r = mul(x.data(), y.data());
  return {r[0], r[1], r[2]};
}

auto HeisenbergMatrices::mul(const u64 *x, const u64 *y) const -> std::array<u64, 3> {
  using u128 = unsigned __int128;
  if (big_ < (u64{1} << 16)) {
    // Same formulas with one reduction at the end; every intermediate stays
    // below 16 big^3.
    const u64 a12 = ps_ * x[0], a23 = x[1], a13 = x[2] + a12 * a23 * inv2_;
    const u64 b12 = ps_ * y[0], b23 = y[1], b13 = y[2] + b12 * b23 * inv2_;
    const u64 c12 = a12 + b12, c23 = a23 + b23;
    const u64 c13 = a13 + b13 + a12 * b23;
    const u64 l13 = c13 + 4 * big_ * big_ * big_ - c12 * c23 * inv2_;
    return {c12 / ps_ % pm_, c23 % pm_, l13 % pm_};
  }
  auto mm = [&](u64 a, u64 b) { return static_cast<u64>(static_cast<u128>(a) * b % big_); };
  // exp(N) = I + N + N^2 / 2 with N = p^s x1 E12 + x2 E23 + x3 E13
  auto expo = [&](const u64 *v, u64 &n12, u64 &n23, u64 &n13) {
    n12 = mm(ps_, v[0]);
    n23 = v[1] % big_;
    n13 = (v[2] + mm(mm(n12, n23), inv2_)) % big_;
  };
  u64 a12, a23, a13, b12, b23, b13;
  expo(x, a12, a23, a13);
  expo(y, b12, b23, b13);
  const u64 c12 = (a12 + b12) % big_;
  const u64 c23 = (a23 + b23) % big_;
  const u64 c13 = (a13 + b13 + mm(a12, b23)) % big_;
  // log(I + M) = M - M^2 / 2 for strictly upper triangular 3x3 M
  const u64 l13 = (c13 + big_ - mm(mm(c12, c23), inv2_)) % big_;
  return {(c12 / ps_) % pm_, c23 % pm_, l13 % pm_};
}

auto leibniz_filter(const lazard::ReducedLieRing &ring) -> LeibnizCount {
  const std::size_t d = ring.rank();
  const u64 q = ring.modulus().value();
  const u64 p = ring.modulus().prime();
  // c[i][j] = [e_i, e_j]
  std::vector<std::vector<Vec>> c(d, std::vector<Vec>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      c[i][j] = ring.basis_bracket(i, j);
  auto bracket = [&](const Vec &x, const Vec &y) {
    Vec out(d, 0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const u64 f = x[i] * y[j] % q;
        if (f)
          for (std::size_t r = 0; r < d; ++r)
            out[r] = (out[r] + f * c[i][j][r]) % q;
      }
    return out;
  };
  const std::size_t n = d * d;
  u64 total = 1;
  for (std::size_t t = 0; t < n; ++t)
    total *= q;

  // D[l][i] at flat index l*d + i; column i is the image of e_i.
  Vec m(n, 0);
  auto column = [&](std::size_t i) {
    Vec v(d);
    for (std::size_t l = 0; l < d; ++l)
      v[l] = m[l * d + i];
    return v;
  };
  auto apply = [&](const Vec &v) {
    Vec out(d, 0);
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t i = 0; i < d; ++i)
        out[l] = (out[l] + m[l * d + i] * v[i]) % q;
    return out;
  };
  std::vector<Vec> unit(d, Vec(d, 0));
  for (std::size_t i = 0; i < d; ++i)
    unit[i][i] = 1;

  u64 ders = 0;
  for (u64 idx = 0; idx < total; ++idx) {
    u64 r = idx;
    for (std::size_t t = 0; t < n; ++t) {
      m[t] = r % q;
      r /= q;
    }
    bool ok = true;
    for (std::size_t i = 0; i < d && ok; ++i)
      for (std::size_t j = i + 1; j < d && ok; ++j) {
        Vec lhs = apply(c[i][j]);
        Vec a = bracket(column(i), unit[j]);
        Vec b = bracket(unit[i], column(j));
        for (std::size_t l = 0; l < d; ++l)
          ok = ok && lhs[l] == (a[l] + b[l]) % q;
      }
    ders += ok;
  }

  std::set<Vec> inner;
  u64 elems = 1;
  for (std::size_t t = 0; t < d; ++t)
    elems *= q;
  for (u64 idx = 0; idx < elems; ++idx) {
    Vec x(d);
    u64 r = idx;
    for (auto &v : x) {
      v = r % q;
      r /= q;
    }
    Vec ad(n);
    for (std::size_t i = 0; i < d; ++i) {
      Vec col = bracket(x, unit[i]);
      for (std::size_t l = 0; l < d; ++l)
        ad[l * d + i] = col[l];
    }
    inner.insert(std::move(ad));
  }
  return {log_p(p, ders), log_p(p, inner.size())};
}

auto count_invertible(u64 p, u64 q, unsigned n) -> u64 {
  if (n < 1 || n > 3)
    throw std::invalid_argument("count_invertible supports n <= 3");
  const unsigned cells = n * n;
  u64 total = 1;
  for (unsigned t = 0; t < cells; ++t)
    total *= q;
  u64 count = 0;
  std::vector<long long> a(cells);
  for (u64 idx = 0; idx < total; ++idx) {
    u64 r = idx;
    for (auto &v : a) {
      v = static_cast<long long>(r % q);
      r /= q;
    }
    long long det;
    if (n == 1)
      det = a[0];
    else if (n == 2)
      det = a[0] * a[3] - a[1] * a[2];
    else
      det = a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
            a[2] * (a[3] * a[7] - a[4] * a[6]);
    const long long pp = static_cast<long long>(p);
    count += ((det % pp) + pp) % pp != 0;
  }
  return count;
}

auto crossed_homs(const lazard::GAction &action) -> CrossedHomCount {
  const auto &g = action.group();
  const u64 order = g.element_count();
  const auto &gens = action.generators();
  const std::size_t r = gens.size();
  const std::size_t dim = action.dim();
  const u64 q = action.module_modulus().value();
  const u64 p = action.module_modulus().prime();

  // Right-multiplication table by generators and the action matrix of every
  // element, both indexed by group index.
  std::vector<u64> next(order * r);
  std::vector<u64> rho(order * dim * dim);
  for (u64 x = 0; x < order; ++x) {
    const Vec ex = g.element(x);
    for (std::size_t s = 0; s < r; ++s)
      next[x * r + s] = g.index_of(g.mul(ex, gens[s]));
    const auto m = action.action_of(ex);
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b)
        rho[(x * dim + a) * dim + b] = m.at(a, b);
  }
  // BFS tree from the identity.
  const u64 root = g.index_of(g.identity());
  std::vector<u64> bfs{root};
  std::vector<std::pair<u64, std::size_t>> parent(order, {order, 0});
  std::vector<char> seen(order, 0);
  seen[root] = 1;
  for (std::size_t h = 0; h < bfs.size(); ++h)
    for (std::size_t s = 0; s < r; ++s) {
      const u64 y = next[bfs[h] * r + s];
      if (!seen[y]) {
        seen[y] = 1;
        parent[y] = {bfs[h], s};
        bfs.push_back(y);
      }
    }
  if (bfs.size() != order)
    throw std::runtime_error("generators do not generate the group");

  const std::size_t width = r * dim;
  u64 tuples = 1;
  for (std::size_t t = 0; t < width; ++t)
    tuples *= q;

  Vec gv(width), c(order * dim);
  auto step = [&](u64 x, std::size_t s, u64 *out) {
    // c(x) + x.c(s)
    for (std::size_t a = 0; a < dim; ++a) {
      u64 v = c[x * dim + a];
      for (std::size_t b = 0; b < dim; ++b)
        v += rho[(x * dim + a) * dim + b] * gv[s * dim + b];
      out[a] = v % q;
    }
  };
  u64 z1 = 0;
  std::vector<u64> tmp(dim);
  for (u64 idx = 0; idx < tuples; ++idx) {
    u64 rem = idx;
    for (auto &v : gv) {
      v = rem % q;
      rem /= q;
    }
    for (std::size_t a = 0; a < dim; ++a)
      c[root * dim + a] = 0;
    for (std::size_t h = 1; h < bfs.size(); ++h) {
      const auto [x, s] = parent[bfs[h]];
      step(x, s, &c[bfs[h] * dim]);
    }
    bool ok = true;
    for (u64 x = 0; x < order && ok; ++x)
      for (std::size_t s = 0; s < r && ok; ++s) {
        step(x, s, tmp.data());
        const u64 y = next[x * r + s];
        for (std::size_t a = 0; a < dim; ++a)
          ok = ok && tmp[a] == c[y * dim + a];
      }
    z1 += ok;
  }

  u64 module = 1;
  for (std::size_t t = 0; t < dim; ++t)
    module *= q;
  std::set<Vec> boundaries;
  for (u64 idx = 0; idx < module; ++idx) {
    Vec v(dim);
    u64 rem = idx;
    for (auto &x : v) {
      x = rem % q;
      rem /= q;
    }
    Vec tuple;
    for (std::size_t s = 0; s < r; ++s) {
      const auto m = action.action_of(gens[s]);
      for (std::size_t a = 0; a < dim; ++a) {
        u64 val = q - v[a];
        for (std::size_t b = 0; b < dim; ++b)
          val += m.at(a, b) * v[b];
        tuple.push_back(val % q);
      }
    }
    boundaries.insert(std::move(tuple));
  }
  return {log_p(p, z1), log_p(p, boundaries.size())};
}

auto center_exp(const lazard::LazardGroup &g) -> unsigned {
  const u64 order = g.element_count();
  std::vector<Vec> elems(order);
  for (u64 x = 0; x < order; ++x)
    elems[x] = g.element(x);
  const bool all = order <= 729;
  const auto gens = g.generators();
  const auto &against = all ? elems : gens;
  u64 central = 0;
  for (const auto &x : elems) {
    bool ok = true;
    for (const auto &y : against)
      if (g.mul(x, y) != g.mul(y, x)) {
        ok = false;
        break;
      }
    central += ok;
  }
  return log_p(g.prime(), central);
}

auto log_p(u64 p, u64 n) -> unsigned {
  unsigned e = 0;
  while (n > 1 && n % p == 0) {
    n /= p;
    ++e;
  }
  if (n != 1)
    throw std::runtime_error("count is not a power of p");
  return e;
}

} // namespace oracle
