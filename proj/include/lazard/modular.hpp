#pragma once

// Exact arithmetic over Z/p^k and over Q with p-adic valuations.
//
// Residues are stored as reduced 64-bit words; products go through a 128-bit
// intermediate, so any modulus below 2^62 is exact. Everything that can grow
// without bound (structure constants, BCH coefficients, automorphism orders)
// is carried as GMP integers or rationals.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace lazard {

using u64 = std::uint64_t;
using Vec = std::vector<u64>;

auto is_prime(u64 n) -> bool;

/// The coefficient ring Z/p^k.
class Modulus {
public:
  Modulus(u64 p, unsigned k);

  auto prime() const -> u64 { return p_; }
  auto exponent() const -> unsigned { return k_; }
  auto value() const -> u64 { return pk_; }

  auto reduce(u64 x) const -> u64 { return x % pk_; }
  auto add(u64 a, u64 b) const -> u64 {
    u64 s = a + b;
    return s >= pk_ ? s - pk_ : s;
  }
  auto sub(u64 a, u64 b) const -> u64 { return a >= b ? a - b : a + (pk_ - b); }
  auto neg(u64 a) const -> u64 { return a == 0 ? 0 : pk_ - a; }
  auto mul(u64 a, u64 b) const -> u64 {
    if (barrett_ != 0) {
      // both factors are below 2^32, so the product fits in 64 bits
      u64 x = a * b;
      u64 q = static_cast<u64>((static_cast<unsigned __int128>(x) * barrett_) >> 64);
      u64 r = x - q * pk_;
      while (r >= pk_)
        r -= pk_;
      return r;
    }
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % pk_);
  }
  /// a + b*c
  auto fma(u64 a, u64 b, u64 c) const -> u64 { return add(a, mul(b, c)); }

  auto from_signed(std::int64_t x) const -> u64;
  auto from_mpz(const mpz_class &x) const -> u64;
  /// Signed representative in (-p^k/2, p^k/2].
  auto to_signed(u64 x) const -> std::int64_t;

  /// p-adic valuation of a residue; the zero residue has valuation k.
  auto valuation(u64 x) const -> unsigned;
  /// p^e reduced mod p^k (zero once e >= k).
  auto p_power(unsigned e) const -> u64;
  /// Inverse of a unit; throws PreconditionViolation on non-units.
  auto inverse(u64 unit) const -> u64;
  auto is_unit(u64 x) const -> bool { return x % p_ != 0; }

  auto with_exponent(unsigned k) const -> Modulus { return Modulus(p_, k); }

  auto operator==(const Modulus &o) const -> bool { return p_ == o.p_ && k_ == o.k_; }

private:
  u64 p_;
  unsigned k_;
  u64 pk_;
  u64 barrett_ = 0; // floor((2^64 - 1) / p^k) when p^k <= 2^32, else 0
};

/// A single element of Z/p^k together with its ring.
class Residue {
public:
  Residue(const Modulus &mod, u64 value) : mod_(mod), value_(mod.reduce(value)) {}
  static auto from_signed(const Modulus &mod, std::int64_t v) -> Residue {
    return Residue(mod, mod.from_signed(v));
  }

  auto value() const -> u64 { return value_; }
  auto modulus() const -> const Modulus & { return mod_; }
  auto valuation() const -> unsigned { return mod_.valuation(value_); }

  auto operator+(const Residue &o) const -> Residue;
  auto operator-(const Residue &o) const -> Residue;
  auto operator*(const Residue &o) const -> Residue;
  auto operator-() const -> Residue { return Residue(mod_, mod_.neg(value_)); }
  auto operator==(const Residue &o) const -> bool {
    return mod_ == o.mod_ && value_ == o.value_;
  }

private:
  Modulus mod_;
  u64 value_;
};

/// Arbitrary-precision rational kept in lowest terms with positive denominator.
class PRational {
public:
  PRational() = default;
  PRational(long num, long den = 1);
  explicit PRational(mpq_class q);

  auto value() const -> const mpq_class & { return q_; }
  auto numerator() const -> mpz_class { return q_.get_num(); }
  auto denominator() const -> mpz_class { return q_.get_den(); }
  auto is_zero() const -> bool { return sgn(q_) == 0; }

  /// v_p of the rational; zero has no valuation and reports INT32_MAX.
  auto valuation(u64 p) const -> int;
  /// Image in Z/p^k. Throws DenominatorNotInvertible when p divides the
  /// denominator.
  auto to_residue(const Modulus &mod) const -> u64;
  /// "num/den" (or "num" when the denominator is 1).
  auto str() const -> std::string;

  auto operator==(const PRational &o) const -> bool { return q_ == o.q_; }

private:
  mpq_class q_;
};

auto mpz_valuation(const mpz_class &x, u64 p) -> int;

/// Dense row-major matrix over a shared Z/p^k.
class ResidueMatrix {
public:
  explicit ResidueMatrix(const Modulus &mod, std::size_t rows = 0, std::size_t cols = 0)
      : mod_(mod), rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  static auto from_rows(const Modulus &mod, std::size_t cols, const std::vector<Vec> &rows)
      -> ResidueMatrix;
  static auto identity(const Modulus &mod, std::size_t n) -> ResidueMatrix;

  auto modulus() const -> const Modulus & { return mod_; }
  auto rows() const -> std::size_t { return rows_; }
  auto cols() const -> std::size_t { return cols_; }

  auto at(std::size_t r, std::size_t c) const -> u64 { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, u64 v) { data_[r * cols_ + c] = mod_.reduce(v); }
  auto row(std::size_t r) const -> std::span<const u64> {
    return {data_.data() + r * cols_, cols_};
  }
  auto row_vec(std::size_t r) const -> Vec { return Vec(row(r).begin(), row(r).end()); }
  void append_row(std::span<const u64> values);

  auto operator*(const ResidueMatrix &o) const -> ResidueMatrix;
  /// Matrix times column vector.
  auto apply(std::span<const u64> v) const -> Vec;
  /// Row vector times matrix.
  auto left_apply(std::span<const u64> v) const -> Vec;
  auto transpose() const -> ResidueMatrix;
  auto is_zero() const -> bool;

  auto operator==(const ResidueMatrix &o) const -> bool {
    return mod_ == o.mod_ && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

private:
  Modulus mod_;
  std::size_t rows_;
  std::size_t cols_;
  Vec data_;
};

// Small vector helpers, all arithmetic mod `mod`.
auto vec_add(const Modulus &mod, std::span<const u64> a, std::span<const u64> b) -> Vec;
auto vec_sub(const Modulus &mod, std::span<const u64> a, std::span<const u64> b) -> Vec;
auto vec_scale(const Modulus &mod, u64 s, std::span<const u64> a) -> Vec;
auto vec_is_zero(std::span<const u64> a) -> bool;
/// Minimum coordinate valuation (k for the zero vector).
auto vec_valuation(const Modulus &mod, std::span<const u64> a) -> unsigned;
/// Reinterpret residues mod p^k as residues mod p^j by reduction (j <= k).
auto vec_reduce(const Modulus &to, std::span<const u64> a) -> Vec;

} // namespace lazard
