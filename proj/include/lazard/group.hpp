#pragma once

// The finite group U_m = (L / p^m L, BCH product) of a uniform Lie ring.
//
// Elements are Lie coordinate vectors. The refined polycyclic generating
// sequence is a_{l,i} = p^l e_i (level-major, n = l*d + i); every element has
// a unique normal form prod_n a_n^{c_n} with digits c_n in [0, p).

#include "lazard/bch.hpp"
#include "lazard/liering.hpp"

#include <memory>
#include <mutex>
#include <optional>

namespace lazard {

class LazardGroup {
public:
  /// Requires a valid, uniform ring.
  LazardGroup(LieRingData data, unsigned m);

  auto ring() const -> const ReducedLieRing & { return ring_; }
  auto data() const -> const LieRingData & { return ring_.base(); }
  auto modulus() const -> const Modulus & { return ring_.modulus(); }
  auto prime() const -> u64 { return modulus().prime(); }
  auto rank() const -> std::size_t { return ring_.rank(); }
  auto precision() const -> unsigned { return modulus().exponent(); }
  auto certificate() const -> const TruncationCertificate & { return eval_->certificate(); }

  /// log_p |U_m| = d*m.
  auto order_exponent() const -> unsigned;
  auto order() const -> mpz_class;

  auto identity() const -> Vec { return Vec(rank(), 0); }
  auto mul(std::span<const u64> x, std::span<const u64> y) const -> Vec;
  void mul_into(std::span<const u64> x, std::span<const u64> y, std::span<u64> out) const;
  auto inv(std::span<const u64> x) const -> Vec;
  /// x^n, which is n*x on Lie coordinates.
  auto power(std::span<const u64> x, long n) const -> Vec;
  /// x^n by repeated multiplication (cross-check of power()).
  auto power_iterated(std::span<const u64> x, long n) const -> Vec;
  /// g x g^-1
  auto conjugate(std::span<const u64> g, std::span<const u64> x) const -> Vec;
  /// Throws ModulusMismatch unless x is a reduced vector of the right length.
  void check(std::span<const u64> x) const;

  auto generators() const -> std::vector<Vec>;
  /// Unit vector of generator i scaled by p^level.
  auto pc_generator(unsigned level, std::size_t i) const -> Vec;

  /// Elements are indexed so that index order is lexicographic order of
  /// coordinate vectors (first coordinate most significant).
  auto element_count() const -> u64;
  auto enumerable(u64 budget) const -> bool;
  auto index_of(std::span<const u64> x) const -> u64;
  auto element(u64 index) const -> Vec;

  /// Normal-form digits with respect to the refined pcgs.
  auto pc_digits(std::span<const u64> x) const -> std::vector<unsigned>;
  auto from_pc_digits(const std::vector<unsigned> &digits) const -> Vec;

  /// For each pair n < n' of pcgs indices, the digits of a_n^-1 a_n' a_n.
  struct Relation {
    std::size_t lower, upper;
    std::vector<unsigned> digits;
  };
  auto pc_relations() const -> const std::vector<Relation> &;

private:
  ReducedLieRing ring_;
  std::shared_ptr<const BchEvaluator> eval_;
  struct RelationCache {
    std::once_flag once;
    std::vector<Relation> relations;
  };
  std::shared_ptr<RelationCache> relations_;
};

struct PPowerSubgroup {
  HowellForm span;
  unsigned indexExponent;
};

/// U_m^{p^j} = p^j L / p^m L.
auto ppower_subgroup(const LazardGroup &g, unsigned j) -> PPowerSubgroup;

/// Endomorphism given by the images of the standard generators.
struct Endomorphism {
  std::vector<Vec> images;
  auto operator==(const Endomorphism &) const -> bool = default;
};

auto identity_endomorphism(const LazardGroup &g) -> Endomorphism;
/// x -> h x h^-1
auto inner(const LazardGroup &g, std::span<const u64> h) -> Endomorphism;
/// Endomorphism whose generator images are the columns of a.
auto from_matrix(const ResidueMatrix &a) -> Endomorphism;
auto apply(const LazardGroup &g, const Endomorphism &phi, std::span<const u64> x) -> Vec;
/// f o h
auto compose(const LazardGroup &g, const Endomorphism &f, const Endomorphism &h) -> Endomorphism;
/// rho_{i,j}: the map induced on U_j = U_i / U_i^{p^j}. gi.precision() >= gj.precision().
auto restriction(const LazardGroup &gi, const LazardGroup &gj, const Endomorphism &phi)
    -> Endomorphism;

struct HomCheck {
  bool homomorphism;
  bool bijective;
  /// Index of the first failing relation, when any.
  std::optional<std::size_t> failedRelation;
};

/// Exact check against the pc presentation; bijectivity via independence of
/// the generator images modulo U^p.
auto check_automorphism(const LazardGroup &g, const Endomorphism &phi) -> HomCheck;
auto is_automorphism(const LazardGroup &g, const Endomorphism &phi) -> bool;

struct VerifyOptions {
  /// Exhaustive verification when the relevant element count is at most this.
  u64 exhaustiveLimit = 10000;
  /// Pair checks run exhaustively when the number of pairs is at most this.
  u64 pairLimit = u64{1} << 20;
  u64 samples = 10000;
  u64 seed = 1;
};

/// phi(xy) == phi(x) phi(y), over all pairs or over random samples.
struct PairCheck {
  bool passed;
  bool exhaustive;
  u64 checked;
};
auto check_homomorphism_pairs(const LazardGroup &g, const Endomorphism &phi,
                              const VerifyOptions &opts = {}) -> PairCheck;

/// Coordinates of U^{p^i} / U^{p^j} as L / p^{j-i} L.
struct SectionModule {
  unsigned i, j;
  Modulus moduleModulus;
  std::size_t dim;
  /// Conjugation by each standard generator on the rescaled coordinates.
  std::vector<ResidueMatrix> action;
  bool abelian;
  bool intertwines;
  bool exhaustive;
  u64 checks;
  auto verdict() const -> bool { return abelian && intertwines; }
};

/// Requires 0 <= i < j <= min(2i + 1, m).
auto section_module(const LazardGroup &g, unsigned i, unsigned j, const VerifyOptions &opts = {})
    -> SectionModule;
/// p^i y as a group element.
auto section_embed(const LazardGroup &g, unsigned i, std::span<const u64> y) -> Vec;
/// x / p^i reduced mod p^{j-i}; x must lie in U^{p^i}.
auto section_rescale(const LazardGroup &g, unsigned i, unsigned j, std::span<const u64> x) -> Vec;
/// Conjugation by h on the rescaled section coordinates, from the group law.
auto section_action(const LazardGroup &g, unsigned i, unsigned j, std::span<const u64> h)
    -> ResidueMatrix;

} // namespace lazard
