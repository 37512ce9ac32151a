#pragma once

// Integral Lie rings given by structure constants, and their reductions mod p^k.
//
// Only brackets [e_i, e_j] with i < j are stored; [e_j, e_i] = -[e_i, e_j] and
// [e_i, e_i] = 0 are implicit. Indices are 0-based in code and 1-based in
// JSON and in every user-facing witness.

#include "lazard/howell.hpp"
#include "lazard/modular.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lazard {

/// p-adic valuation that may be +infinity (std::nullopt).
using Valuation = std::optional<unsigned>;

auto valuation_str(const Valuation &v) -> std::string;

class LieRingData {
public:
  LieRingData(std::string label, u64 prime, std::size_t rank);

  auto label() const -> const std::string & { return label_; }
  auto prime() const -> u64 { return prime_; }
  auto rank() const -> std::size_t { return rank_; }

  /// [e_i, e_j] for any i, j (antisymmetric completion applied).
  auto bracket(std::size_t i, std::size_t j) const -> std::vector<mpz_class>;
  /// Stored constants for i < j.
  auto stored(std::size_t i, std::size_t j) const -> const std::vector<mpz_class> &;
  void set_bracket(std::size_t i, std::size_t j, std::vector<mpz_class> coeffs);
  void set_bracket(std::size_t i, std::size_t j, const std::vector<long> &coeffs);
  void set_label(std::string label) { label_ = std::move(label); }

  auto is_abelian() const -> bool;
  auto operator==(const LieRingData &o) const -> bool = default;

private:
  auto pair_index(std::size_t i, std::size_t j) const -> std::size_t;

  std::string label_;
  u64 prime_;
  std::size_t rank_;
  std::vector<std::vector<mpz_class>> constants_;
};

struct ValidationReport {
  bool valid = true;
  std::size_t triplesChecked = 0;
  /// 1-based basis triple of the first Jacobi failure.
  std::vector<int> witness;
  std::vector<mpz_class> residual;
  std::string message;
};

/// Jacobi identity over Z on every basis triple, plus shape checks.
auto validate(const LieRingData &data) -> ValidationReport;
/// validate() that throws ValidationError on failure.
void require_valid(const LieRingData &data);

struct UniformityReport {
  Valuation s;
  bool uniform;
};

/// Largest s with every structure constant in p^s Z. Uniform means s >= 1
/// for odd p and s >= 2 for p = 2.
auto uniformity(const LieRingData &data, u64 p) -> UniformityReport;
auto uniformity(const LieRingData &data) -> UniformityReport;
auto is_uniform_valuation(u64 p, const Valuation &s) -> bool;

/// Rescales the basis e_i -> p^s e_i, which multiplies every constant by p^s.
auto scale(const LieRingData &data, unsigned s) -> LieRingData;

/// The ring L / p^k L.
class ReducedLieRing {
public:
  ReducedLieRing(LieRingData base, unsigned k);

  auto base() const -> const LieRingData & { return base_; }
  auto modulus() const -> const Modulus & { return mod_; }
  auto rank() const -> std::size_t { return base_.rank(); }
  auto precision() const -> unsigned { return mod_.exponent(); }
  /// Valuation of the integral structure constants.
  auto bracket_valuation() const -> const Valuation & { return s_; }

  auto basis_bracket(std::size_t i, std::size_t j) const -> Vec;
  auto bracket(std::span<const u64> x, std::span<const u64> y) const -> Vec;
  /// ad(x) as a matrix acting on column vectors: column i is [x, e_i].
  auto ad(std::span<const u64> x) const -> ResidueMatrix;
  auto unit(std::size_t i) const -> Vec;

private:
  LieRingData base_;
  Modulus mod_;
  Valuation s_;
  std::vector<Vec> table_; // [e_i, e_j] for all i, j, row-major
};

struct CenterResult {
  HowellForm span;
  unsigned orderExponent;
};

auto center(const ReducedLieRing &ring) -> CenterResult;
auto derived_ideal(const ReducedLieRing &ring) -> HowellForm;

/// Derivations are d x d matrices D with D e_i = sum_l D[l][i] e_l, flattened
/// row-major into (Z/p^k)^(d*d).
struct DerivationModule {
  HowellForm der;
  HowellForm inn;
  unsigned derOrderExp;
  unsigned innOrderExp;
  unsigned h1OrderExp;
  /// Smallest e with p^e Der inside Inn.
  unsigned h1AnnihilatorExp;
};

auto derivations(const ReducedLieRing &ring) -> DerivationModule;
auto h1_lie(const ReducedLieRing &ring) -> unsigned;
auto is_derivation(const ReducedLieRing &ring, const ResidueMatrix &d) -> bool;
auto flatten(const ResidueMatrix &m) -> Vec;
auto unflatten(const Modulus &mod, std::size_t d, std::span<const u64> v) -> ResidueMatrix;

/// Estimate of dim Z(L (x) Q_p): number of valuation-zero pivots of the
/// center, recorded over a window of consecutive precisions.
struct CenterRankEstimate {
  std::size_t z;
  unsigned fromPrecision;
  unsigned toPrecision;
  std::vector<std::size_t> perPrecision;
  bool stable;
};

auto center_free_rank(const LieRingData &data, unsigned window = 3) -> CenterRankEstimate;

/// exp(ad u) on L / p^t L, computed from the Lie side as a p-adically
/// convergent power series. `u` holds coordinates mod any power of p >= t.
auto adjoint_exp(const LieRingData &data, std::span<const u64> u, const Modulus &target)
    -> ResidueMatrix;

} // namespace lazard
