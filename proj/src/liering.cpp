#include "lazard/liering.hpp"

#include "lazard/errors.hpp"

#include <algorithm>

namespace lazard {

auto valuation_str(const Valuation &v) -> std::string {
  return v ? std::to_string(*v) : std::string("inf");
}

LieRingData::LieRingData(std::string label, u64 prime, std::size_t rank)
    : label_(std::move(label)), prime_(prime), rank_(rank),
      constants_(rank * (rank > 0 ? rank - 1 : 0) / 2, std::vector<mpz_class>(rank)) {
  if (!is_prime(prime))
    throw PreconditionViolation("prime " + std::to_string(prime) + " is not prime");
  if (rank == 0)
    throw PreconditionViolation("rank must be positive");
}

auto LieRingData::pair_index(std::size_t i, std::size_t j) const -> std::size_t {
  // pairs (i, j) with i < j, enumerated row by row
  return i * rank_ - i * (i + 1) / 2 + (j - i - 1);
}

auto LieRingData::stored(std::size_t i, std::size_t j) const -> const std::vector<mpz_class> & {
  if (!(i < j && j < rank_))
    throw PreconditionViolation("stored brackets need 0 <= i < j < rank");
  return constants_[pair_index(i, j)];
}

auto LieRingData::bracket(std::size_t i, std::size_t j) const -> std::vector<mpz_class> {
  if (i >= rank_ || j >= rank_)
    throw PreconditionViolation("basis index out of range");
  if (i == j)
    return std::vector<mpz_class>(rank_);
  if (i < j)
    return constants_[pair_index(i, j)];
  auto r = constants_[pair_index(j, i)];
  for (auto &x : r)
    x = -x;
  return r;
}

void LieRingData::set_bracket(std::size_t i, std::size_t j, std::vector<mpz_class> coeffs) {
  if (!(i < j && j < rank_))
    throw PreconditionViolation("brackets are set only for 0 <= i < j < rank");
  if (coeffs.size() != rank_)
    throw PreconditionViolation("bracket coefficient vector has length " +
                                std::to_string(coeffs.size()) + ", rank is " +
                                std::to_string(rank_));
  constants_[pair_index(i, j)] = std::move(coeffs);
}

void LieRingData::set_bracket(std::size_t i, std::size_t j, const std::vector<long> &coeffs) {
  std::vector<mpz_class> c;
  c.reserve(coeffs.size());
  for (long x : coeffs)
    c.emplace_back(x);
  set_bracket(i, j, std::move(c));
}

auto LieRingData::is_abelian() const -> bool {
  for (const auto &v : constants_)
    for (const auto &x : v)
      if (sgn(x) != 0)
        return false;
  return true;
}

auto validate(const LieRingData &data) -> ValidationReport {
  ValidationReport rep;
  const std::size_t d = data.rank();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      if (data.stored(i, j).size() != d) {
        rep.valid = false;
        rep.message = "bracket [e" + std::to_string(i + 1) + ",e" + std::to_string(j + 1) +
                      "] has wrong length";
        return rep;
      }

  // [x,[y,z]] expanded on basis vectors: sum_l [y,z]_l [e_x, e_l]
  auto nested = [&](std::size_t x, std::size_t y, std::size_t z) {
    std::vector<mpz_class> out(d);
    auto inner = data.bracket(y, z);
    for (std::size_t l = 0; l < d; ++l) {
      if (sgn(inner[l]) == 0)
        continue;
      auto outer = data.bracket(x, l);
      for (std::size_t r = 0; r < d; ++r)
        out[r] += inner[l] * outer[r];
    }
    return out;
  };

  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      for (std::size_t l = j + 1; l < d; ++l) {
        ++rep.triplesChecked;
        auto a = nested(i, j, l), b = nested(j, l, i), c = nested(l, i, j);
        std::vector<mpz_class> sum(d);
        bool zero = true;
        for (std::size_t r = 0; r < d; ++r) {
          sum[r] = a[r] + b[r] + c[r];
          zero = zero && sgn(sum[r]) == 0;
        }
        if (!zero && rep.valid) {
          rep.valid = false;
          rep.witness = {static_cast<int>(i + 1), static_cast<int>(j + 1),
                         static_cast<int>(l + 1)};
          rep.residual = std::move(sum);
          rep.message = "Jacobi identity fails on basis triple (" + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + "," + std::to_string(l + 1) + ")";
        }
      }
  return rep;
}

void require_valid(const LieRingData &data) {
  auto rep = validate(data);
  if (!rep.valid)
    throw ValidationError(rep.message, rep.witness);
}

auto is_uniform_valuation(u64 p, const Valuation &s) -> bool {
  if (!s)
    return true;
  return p == 2 ? *s >= 2 : *s >= 1;
}

auto uniformity(const LieRingData &data, u64 p) -> UniformityReport {
  Valuation s;
  const std::size_t d = data.rank();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      for (const auto &c : data.stored(i, j)) {
        if (sgn(c) == 0)
          continue;
        auto v = static_cast<unsigned>(mpz_valuation(c, p));
        s = s ? std::min(*s, v) : v;
      }
  return {s, is_uniform_valuation(p, s)};
}

auto uniformity(const LieRingData &data) -> UniformityReport {
  return uniformity(data, data.prime());
}

auto scale(const LieRingData &data, unsigned s) -> LieRingData {
  LieRingData out = data;
  mpz_class f;
  mpz_ui_pow_ui(f.get_mpz_t(), data.prime(), s);
  const std::size_t d = data.rank();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      auto c = data.stored(i, j);
      for (auto &x : c)
        x *= f;
      out.set_bracket(i, j, std::move(c));
    }
  return out;
}

ReducedLieRing::ReducedLieRing(LieRingData base, unsigned k)
    : base_(std::move(base)), mod_(base_.prime(), k), s_(uniformity(base_).s) {
  const std::size_t d = base_.rank();
  table_.assign(d * d, Vec(d, 0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      auto c = base_.bracket(i, j);
      for (std::size_t l = 0; l < d; ++l)
        table_[i * d + j][l] = mod_.from_mpz(c[l]);
    }
}

auto ReducedLieRing::basis_bracket(std::size_t i, std::size_t j) const -> Vec {
  return table_[i * rank() + j];
}

auto ReducedLieRing::bracket(std::span<const u64> x, std::span<const u64> y) const -> Vec {
  const std::size_t d = rank();
  Vec out(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    if (x[i] == 0)
      continue;
    for (std::size_t j = 0; j < d; ++j) {
      if (y[j] == 0 || i == j)
        continue;
      u64 w = mod_.mul(x[i], y[j]);
      const auto &c = table_[i * d + j];
      for (std::size_t l = 0; l < d; ++l)
        if (c[l] != 0)
          out[l] = mod_.fma(out[l], w, c[l]);
    }
  }
  return out;
}

auto ReducedLieRing::ad(std::span<const u64> x) const -> ResidueMatrix {
  const std::size_t d = rank();
  ResidueMatrix m(mod_, d, d);
  for (std::size_t i = 0; i < d; ++i) {
    auto col = bracket(x, unit(i));
    for (std::size_t l = 0; l < d; ++l)
      m.set(l, i, col[l]);
  }
  return m;
}

auto ReducedLieRing::unit(std::size_t i) const -> Vec {
  Vec e(rank(), 0);
  e[i] = mod_.reduce(1);
  return e;
}

auto center(const ReducedLieRing &ring) -> CenterResult {
  const std::size_t d = ring.rank();
  // unknown v_i; constraint (j, r): sum_i v_i [e_i, e_j]_r = 0
  ResidueMatrix m(ring.modulus(), d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      auto c = ring.basis_bracket(i, j);
      for (std::size_t r = 0; r < d; ++r)
        m.set(i, j * d + r, c[r]);
    }
  auto span = kernel_of(m);
  unsigned e = span.order_exponent();
  return {std::move(span), e};
}

auto derived_ideal(const ReducedLieRing &ring) -> HowellForm {
  const std::size_t d = ring.rank();
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      rows.push_back(ring.basis_bracket(i, j));
  return howell_form(ring.modulus(), d, rows);
}

auto flatten(const ResidueMatrix &m) -> Vec {
  Vec v;
  v.reserve(m.rows() * m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (u64 x : m.row(r))
      v.push_back(x);
  return v;
}

auto unflatten(const Modulus &mod, std::size_t d, std::span<const u64> v) -> ResidueMatrix {
  if (v.size() != d * d)
    throw PreconditionViolation("flattened matrix has wrong length");
  ResidueMatrix m(mod, d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      m.set(r, c, v[r * d + c]);
  return m;
}

auto derivations(const ReducedLieRing &ring) -> DerivationModule {
  const std::size_t d = ring.rank();
  const auto &mod = ring.modulus();
  const std::size_t pairs = d * (d - 1) / 2;
  // Unknown D[l][c] sits at row l*d + c; constraint (pair, r) is the r-th
  // coordinate of D[e_i,e_j] - [De_i,e_j] - [e_i,De_j].
  ResidueMatrix m(mod, d * d, pairs * d);
  std::size_t pair = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j, ++pair) {
      auto cij = ring.basis_bracket(i, j);
      for (std::size_t r = 0; r < d; ++r) {
        const std::size_t col = pair * d + r;
        for (std::size_t l = 0; l < d; ++l) {
          std::size_t u = r * d + l;
          m.set(u, col, mod.add(m.at(u, col), cij[l]));
          u64 a = ring.basis_bracket(l, j)[r];
          u = l * d + i;
          m.set(u, col, mod.sub(m.at(u, col), a));
          u64 b = ring.basis_bracket(i, l)[r];
          u = l * d + j;
          m.set(u, col, mod.sub(m.at(u, col), b));
        }
      }
    }
  DerivationModule out{kernel_of(m), zero_span(mod, d * d), 0, 0, 0, 0};
  std::vector<Vec> inn;
  for (std::size_t l = 0; l < d; ++l)
    inn.push_back(flatten(ring.ad(ring.unit(l))));
  out.inn = howell_form(mod, d * d, inn);
  out.derOrderExp = out.der.order_exponent();
  out.innOrderExp = out.inn.order_exponent();
  out.h1OrderExp = quotient_order(out.der, out.inn);
  out.h1AnnihilatorExp = out.der.annihilator_exponent(out.inn);
  return out;
}

auto h1_lie(const ReducedLieRing &ring) -> unsigned { return derivations(ring).h1OrderExp; }

auto is_derivation(const ReducedLieRing &ring, const ResidueMatrix &dm) -> bool {
  const std::size_t d = ring.rank();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      auto lhs = dm.apply(ring.basis_bracket(i, j));
      auto dei = dm.apply(ring.unit(i));
      auto dej = dm.apply(ring.unit(j));
      auto rhs = vec_add(ring.modulus(), ring.bracket(dei, ring.unit(j)),
                         ring.bracket(ring.unit(i), dej));
      if (lhs != rhs)
        return false;
    }
  return true;
}

auto center_free_rank(const LieRingData &data, unsigned window) -> CenterRankEstimate {
  auto s = uniformity(data).s;
  const unsigned from = (s ? *s : 0) + 1;
  CenterRankEstimate est{0, from, from + window - 1, {}, true};
  for (unsigned k = from; k <= est.toPrecision; ++k)
    est.perPrecision.push_back(center(ReducedLieRing(data, k)).span.free_rank());
  est.z = est.perPrecision.back();
  est.stable = std::all_of(est.perPrecision.begin(), est.perPrecision.end(),
                           [&](std::size_t z) { return z == est.z; });
  return est;
}

auto adjoint_exp(const LieRingData &data, std::span<const u64> u, const Modulus &target)
    -> ResidueMatrix {
  const std::size_t d = data.rank();
  const u64 p = data.prime();
  auto s = uniformity(data).s;
  auto result = ResidueMatrix::identity(target, d);
  if (!s)
    return result;
  if (!is_uniform_valuation(p, s))
    throw PreconditionViolation("adjoint_exp needs a uniform ring");
  // ad u = p^s A with A the ad-matrix of the reduced bracket [x,y]/p^s, so
  // exp(ad u) = sum_n (p^{ns}/n!) A^n.
  mpz_class ps;
  mpz_ui_pow_ui(ps.get_mpz_t(), p, *s);
  ResidueMatrix a(target, d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t l = 0; l < d; ++l) {
      if (u[l] == 0)
        continue;
      auto c = data.bracket(l, i);
      for (std::size_t r = 0; r < d; ++r) {
        mpz_class q = c[r] / ps;
        a.set(r, i, target.fma(a.at(r, i), target.reduce(u[l]), target.from_mpz(q)));
      }
    }
  ResidueMatrix power = ResidueMatrix::identity(target, d);
  mpq_class coeff = 1;
  const auto t = static_cast<long>(target.exponent());
  for (long n = 1;; ++n) {
    // n*s - v_p(n!) >= n*s - (n-1)/(p-1) bounds all later terms too
    if (n * static_cast<long>(*s) - (n - 1) / static_cast<long>(p - 1) >= t)
      break;
    power = power * a;
    coeff = coeff * mpq_class(ps) / n;
    u64 c = PRational(coeff).to_residue(target);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t col = 0; col < d; ++col)
        result.set(r, col, target.fma(result.at(r, col), c, power.at(r, col)));
  }
  return result;
}

} // namespace lazard
