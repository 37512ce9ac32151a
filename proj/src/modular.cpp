#include "lazard/modular.hpp"

#include "lazard/errors.hpp"

#include <climits>
#include <limits>

namespace lazard {

auto is_prime(u64 n) -> bool {
  if (n < 2)
    return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0)
      return false;
  return true;
}

Modulus::Modulus(u64 p, unsigned k) : p_(p), k_(k), pk_(1) {
  if (!is_prime(p))
    throw PreconditionViolation("modulus base " + std::to_string(p) + " is not prime");
  if (k < 1)
    throw PreconditionViolation("modulus exponent must be at least 1");
  constexpr u64 limit = u64{1} << 62;
  for (unsigned i = 0; i < k; ++i) {
    if (pk_ > limit / p)
      throw PreconditionViolation("modulus " + std::to_string(p) + "^" + std::to_string(k) +
                                  " exceeds 2^62");
    pk_ *= p;
  }
  if (pk_ <= (u64{1} << 32))
    barrett_ = ~u64{0} / pk_;
}

auto Modulus::from_signed(std::int64_t x) const -> u64 {
  auto m = static_cast<std::int64_t>(pk_);
  auto r = x % m;
  if (r < 0)
    r += m;
  return static_cast<u64>(r);
}

auto Modulus::from_mpz(const mpz_class &x) const -> u64 {
  static_assert(sizeof(unsigned long) == sizeof(u64));
  return mpz_fdiv_ui(x.get_mpz_t(), pk_);
}

auto Modulus::to_signed(u64 x) const -> std::int64_t {
  return x > pk_ / 2 ? static_cast<std::int64_t>(x) - static_cast<std::int64_t>(pk_)
                     : static_cast<std::int64_t>(x);
}

auto Modulus::valuation(u64 x) const -> unsigned {
  if (x == 0)
    return k_;
  unsigned v = 0;
  while (x % p_ == 0) {
    x /= p_;
    ++v;
  }
  return v;
}

auto Modulus::p_power(unsigned e) const -> u64 {
  if (e >= k_)
    return 0;
  u64 r = 1;
  for (unsigned i = 0; i < e; ++i)
    r *= p_;
  return r;
}

auto Modulus::inverse(u64 unit) const -> u64 {
  if (!is_unit(unit))
    throw PreconditionViolation("inverse of non-unit " + std::to_string(unit) + " mod " +
                                std::to_string(pk_));
  // extended Euclid on signed 128-bit to stay clear of overflow
  __int128 a = static_cast<__int128>(unit), m = static_cast<__int128>(pk_);
  __int128 x0 = 1, x1 = 0;
  while (m != 0) {
    __int128 q = a / m;
    __int128 t = a - q * m;
    a = m;
    m = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
  }
  __int128 r = x0 % static_cast<__int128>(pk_);
  if (r < 0)
    r += pk_;
  return static_cast<u64>(r);
}

namespace {
void check_same(const Modulus &a, const Modulus &b) {
  if (!(a == b))
    throw ModulusMismatch("residues over different moduli: " + std::to_string(a.value()) +
                          " vs " + std::to_string(b.value()));
}
} // namespace

auto Residue::operator+(const Residue &o) const -> Residue {
  check_same(mod_, o.mod_);
  return Residue(mod_, mod_.add(value_, o.value_));
}
auto Residue::operator-(const Residue &o) const -> Residue {
  check_same(mod_, o.mod_);
  return Residue(mod_, mod_.sub(value_, o.value_));
}
auto Residue::operator*(const Residue &o) const -> Residue {
  check_same(mod_, o.mod_);
  return Residue(mod_, mod_.mul(value_, o.value_));
}

auto mpz_valuation(const mpz_class &x, u64 p) -> int {
  if (sgn(x) == 0)
    return std::numeric_limits<int>::max();
  mpz_class pz(static_cast<unsigned long>(p));
  mpz_class t = x;
  return static_cast<int>(mpz_remove(t.get_mpz_t(), t.get_mpz_t(), pz.get_mpz_t()));
}

PRational::PRational(long num, long den) : q_(num, den) {
  if (den == 0)
    throw PreconditionViolation("zero denominator");
  q_.canonicalize();
}

PRational::PRational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

auto PRational::valuation(u64 p) const -> int {
  if (is_zero())
    return std::numeric_limits<int>::max();
  return mpz_valuation(q_.get_num(), p) - mpz_valuation(q_.get_den(), p);
}

auto PRational::to_residue(const Modulus &mod) const -> u64 {
  if (mpz_valuation(q_.get_den(), mod.prime()) > 0)
    throw DenominatorNotInvertible("coefficient " + str() + " has " +
                                   std::to_string(mod.prime()) + " in its denominator");
  u64 num = mod.from_mpz(q_.get_num());
  u64 den = mod.from_mpz(q_.get_den());
  return mod.mul(num, mod.inverse(den));
}

auto PRational::str() const -> std::string {
  if (q_.get_den() == 1)
    return q_.get_num().get_str();
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

auto ResidueMatrix::from_rows(const Modulus &mod, std::size_t cols, const std::vector<Vec> &rows)
    -> ResidueMatrix {
  ResidueMatrix m(mod, 0, cols);
  for (const auto &r : rows)
    m.append_row(r);
  return m;
}

auto ResidueMatrix::identity(const Modulus &mod, std::size_t n) -> ResidueMatrix {
  ResidueMatrix m(mod, n, n);
  for (std::size_t i = 0; i < n; ++i)
    m.set(i, i, 1);
  return m;
}

void ResidueMatrix::append_row(std::span<const u64> values) {
  if (values.size() != cols_)
    throw PreconditionViolation("row of length " + std::to_string(values.size()) +
                                " appended to matrix with " + std::to_string(cols_) + " columns");
  for (u64 v : values)
    data_.push_back(mod_.reduce(v));
  ++rows_;
}

auto ResidueMatrix::operator*(const ResidueMatrix &o) const -> ResidueMatrix {
  if (!(mod_ == o.mod_))
    throw ModulusMismatch("matrix product over different moduli");
  if (cols_ != o.rows_)
    throw PreconditionViolation("matrix product shape mismatch");
  ResidueMatrix r(mod_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t l = 0; l < cols_; ++l) {
      u64 a = at(i, l);
      if (a == 0)
        continue;
      for (std::size_t j = 0; j < o.cols_; ++j)
        r.data_[i * o.cols_ + j] = mod_.fma(r.data_[i * o.cols_ + j], a, o.at(l, j));
    }
  return r;
}

auto ResidueMatrix::apply(std::span<const u64> v) const -> Vec {
  if (v.size() != cols_)
    throw PreconditionViolation("matrix-vector shape mismatch");
  Vec r(rows_, 0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      r[i] = mod_.fma(r[i], at(i, j), v[j]);
  return r;
}

auto ResidueMatrix::left_apply(std::span<const u64> v) const -> Vec {
  if (v.size() != rows_)
    throw PreconditionViolation("vector-matrix shape mismatch");
  Vec r(cols_, 0);
  for (std::size_t i = 0; i < rows_; ++i) {
    if (v[i] == 0)
      continue;
    for (std::size_t j = 0; j < cols_; ++j)
      r[j] = mod_.fma(r[j], v[i], at(i, j));
  }
  return r;
}

auto ResidueMatrix::transpose() const -> ResidueMatrix {
  ResidueMatrix t(mod_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      t.data_[j * rows_ + i] = at(i, j);
  return t;
}

auto ResidueMatrix::is_zero() const -> bool { return vec_is_zero(data_); }

auto vec_add(const Modulus &mod, std::span<const u64> a, std::span<const u64> b) -> Vec {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    r[i] = mod.add(a[i], b[i]);
  return r;
}

auto vec_sub(const Modulus &mod, std::span<const u64> a, std::span<const u64> b) -> Vec {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    r[i] = mod.sub(a[i], b[i]);
  return r;
}

auto vec_scale(const Modulus &mod, u64 s, std::span<const u64> a) -> Vec {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    r[i] = mod.mul(s, a[i]);
  return r;
}

auto vec_is_zero(std::span<const u64> a) -> bool {
  for (u64 x : a)
    if (x != 0)
      return false;
  return true;
}

auto vec_valuation(const Modulus &mod, std::span<const u64> a) -> unsigned {
  unsigned v = mod.exponent();
  for (u64 x : a)
    v = std::min(v, mod.valuation(x));
  return v;
}

auto vec_reduce(const Modulus &to, std::span<const u64> a) -> Vec {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    r[i] = to.reduce(a[i]);
  return r;
}

} // namespace lazard
