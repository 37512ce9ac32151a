#pragma once

// Automorphism orders of small quotients, the empirical stabilization
// constant k, and the bound chain
//   |Aut(U_i)| <= |Aut(U_k)| * p^{d^2 k} * |Inn(U_i)|,  |Inn(U_i)| <= p^{(d-z) i}.

#include "lazard/group.hpp"
#include "lazard/liering.hpp"

#include <gmpxx.h>

#include <optional>
#include <string>

namespace lazard {

inline constexpr u64 kDefaultAutBudget = 729;

struct AutSearchOptions {
  /// Largest group order searched (aut_bruteforce).
  u64 budget = kDefaultAutBudget;
  /// Largest number of search nodes before refusing.
  u64 nodeBudget = u64{1} << 36;
  /// Automorphisms returned for inspection.
  std::size_t keep = 8;
  /// Wall-clock limit in seconds; 0 means none.
  double timeLimitSeconds = 0;
  bool parallel = true;
};

struct AutSearchResult {
  mpz_class order;
  std::vector<Endomorphism> generatorImages;
  u64 visitedNodes = 0;
  u64 prunedNodes = 0;
};

/// Backtracking over images of the standard generators, checked against the
/// pc presentation. Refuses (BudgetExceeded) above the order or node budget.
auto aut_bruteforce(const LazardGroup &g, const AutSearchOptions &opts = {}) -> AutSearchResult;

/// Invertible A mod p^m with A[x, y] = [Ax, Ay] on basis pairs; d <= 4.
/// Images are returned as matrix columns.
auto lie_matrix_automorphisms(const ReducedLieRing &ring, const AutSearchOptions &opts = {})
    -> AutSearchResult;

struct InnOrder {
  unsigned centerExp;
  /// log_p |G / Z(G)|
  unsigned innExp;
  /// "exhaustive" (multiplication table scan) or "lie-center".
  std::string method;
};

auto inn_order(const LazardGroup &g) -> InnOrder;

struct StabilizationLevel {
  unsigned i;
  unsigned h1Exp;
  unsigned annihilatorExp;
  /// "group-h1" or "lie-der".
  std::string method;
};

struct StabilizationResult {
  unsigned k;
  unsigned iMin, iMax;
  std::vector<StabilizationLevel> levels;
  /// The last three annihilator exponents agree.
  bool stabilizes;
};

struct StabilizationOptions {
  /// Group-side H^1 is used while |U_{2i-1}| stays within this.
  u64 groupBudget = u64{1} << 16;
};

/// Level i measures H^1 of U acting on L / p^i L, as
/// H^1(U_{2i-1}, U^{p^{i-1}} / U^{p^{2i-1}}) when the group fits the budget and
/// as Der / Inn of L / p^i L otherwise. k is the largest annihilator exponent.
auto stabilization_k(const LieRingData &data, unsigned iMin, unsigned iMax,
                     const StabilizationOptions &opts = {}) -> StabilizationResult;

struct LevelBound {
  unsigned i;
  unsigned groupExp;
  unsigned innExpBound;
  /// "below-k", "unconditional" (k <= i <= 2k) or "conditional" (i > 2k,
  /// relies on p^k H^1 = 0 at every level).
  std::string validity;
  /// Bound on |Aut(U_i)|: cofactor * p^autBoundExp, absent below k or when
  /// |Aut(U_k)| is unavailable.
  std::optional<unsigned> autBoundExp;
  std::optional<mpz_class> autBound;
};

struct BoundOptions {
  AutSearchOptions aut;
  /// Levels used for the hypothesis check.
  unsigned stabilizationMax = 4;
  std::optional<StabilizationResult> stabilization;
};

struct BoundReport {
  u64 p;
  std::size_t d;
  CenterRankEstimate z;
  unsigned k;
  std::optional<mpz_class> autUkOrder;
  /// "bruteforce", "lie-matrix" or "unavailable".
  std::string autUkMethod;
  unsigned kernelBoundExp;
  /// D = dCofactor * p^dExp with p not dividing dCofactor.
  std::optional<mpz_class> dCofactor;
  std::optional<unsigned> dExp;
  std::vector<LevelBound> perLevel;
  mpq_class ratioExponent;
  StabilizationResult stabilization;
  bool hypothesisHolds;
  std::string conclusion;
  std::vector<std::string> refusals;
};

auto bound_report(const LieRingData &data, unsigned k, unsigned iMax,
                  const BoundOptions &opts = {}) -> BoundReport;

/// The chain with d, z given and k, |Aut(U_k)| left symbolic: exponents are
/// linear in i (or k) with the coefficients below.
struct SymbolicBound {
  std::size_t d, z;
  unsigned groupExpPerLevel;
  unsigned innExpPerLevel;
  unsigned kernelExpPerK;
  mpq_class ratioExponent;
  auto group_exp(unsigned i) const -> unsigned { return groupExpPerLevel * i; }
  auto inn_exp(unsigned i) const -> unsigned { return innExpPerLevel * i; }
  auto kernel_exp(unsigned k) const -> unsigned { return kernelExpPerK * k; }
};

auto symbolic_bound(std::size_t d, std::size_t z) -> SymbolicBound;

struct TotientRatio {
  mpz_class phi;
  mpq_class autOverPhi;
  /// |Aut|^d / phi^(d-z), the d-th power of |Aut| / phi^{(d-z)/d}.
  mpq_class powerRatio;
  double scaledRatio;
};

/// phi(p^n) = p^n - p^(n-1), phi(1) = 1.
auto totient_ratio(u64 p, unsigned orderExp, const mpz_class &autOrder, std::size_t d,
                   std::size_t z) -> TotientRatio;

} // namespace lazard
