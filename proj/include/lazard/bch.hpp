#pragma once

// Baker-Campbell-Hausdorff series on two generators a, b.
//
// Hall set convention. Words are generated by degree and, within a degree,
// in a fixed order; word w < w' when deg w < deg w', or the degrees agree and
// w was generated first. Letters: a < b. A bracket [u, v] belongs to the set
// when u < v and v is either a letter or v = [v1, v2] with v1 <= u. Degree 2
// is [a,b]; degree 3 is [a,[a,b]], [b,[a,b]].
//
// Coefficients are exact rationals obtained by expanding log(exp(a) exp(b)) in
// the free associative algebra and projecting each homogeneous component onto
// the Hall basis.

#include "lazard/liering.hpp"
#include "lazard/modular.hpp"

#include <memory>
#include <string>
#include <vector>

namespace lazard {

struct HallWord {
  unsigned degree;
  /// Children as indices into the basis; -1 for letters.
  int left = -1;
  int right = -1;
  /// 0 for a, 1 for b; only meaningful for letters.
  int letter = -1;
};

class HallBasis {
public:
  explicit HallBasis(unsigned maxDegree);

  auto max_degree() const -> unsigned { return maxDegree_; }
  auto size() const -> std::size_t { return words_.size(); }
  auto word(std::size_t i) const -> const HallWord & { return words_[i]; }
  auto words() const -> const std::vector<HallWord> & { return words_; }
  /// Indices [first, last) of the words of degree n.
  auto degree_range(unsigned n) const -> std::pair<std::size_t, std::size_t>;
  auto count(unsigned n) const -> std::size_t;
  /// Bracket notation, e.g. "[a,[a,b]]".
  auto str(std::size_t i) const -> std::string;
  /// Foliage, e.g. "aab".
  auto foliage(std::size_t i) const -> std::string;

private:
  unsigned maxDegree_;
  std::vector<HallWord> words_;
  std::vector<std::size_t> start_; // start_[n] = first index of degree n
};

auto hall_basis(unsigned maxDegree) -> HallBasis;

/// Largest degree for which series are generated.
inline constexpr unsigned kMaxSeriesDegree = 12;

class BchSeries {
public:
  BchSeries(HallBasis basis, std::vector<PRational> coefficients);

  auto max_degree() const -> unsigned { return basis_.max_degree(); }
  auto basis() const -> const HallBasis & { return basis_; }
  auto coefficient(std::size_t word) const -> const PRational & { return coeffs_[word]; }
  auto coefficients() const -> const std::vector<PRational> & { return coeffs_; }
  /// Series restricted to degrees <= d.
  auto truncated(unsigned d) const -> BchSeries;
  /// Smallest v_p over nonzero coefficients of degree n; INT_MAX if none.
  auto min_valuation(unsigned n, u64 p) const -> int;

private:
  HallBasis basis_;
  std::vector<PRational> coeffs_;
};

/// Memoized per degree; each degree is generated independently of the others.
auto bch_series(unsigned maxDegree) -> const BchSeries &;

/// Homogeneous components of log(exp(a) exp(b)) in the free associative
/// algebra. Component n is indexed by words of length n read as binary
/// numbers, first letter most significant, a = 0 and b = 1.
auto associative_bch(unsigned maxDegree) -> std::vector<std::vector<mpq_class>>;

/// Expansion of a Hall word into the free associative algebra (integer
/// coefficients, same indexing as associative_bch).
auto associative_expansion(const HallBasis &basis, std::size_t word) -> std::vector<long>;

struct MarginEntry {
  unsigned degree;
  /// Minimal coefficient valuation at this degree (INT_MAX when no nonzero term).
  int coefficientValuation;
  /// Lower bound on the valuation of any degree-n contribution.
  long margin;
  /// "series" when read off generated coefficients, "denominator-bound" beyond.
  std::string source;
};

struct TruncationCertificate {
  u64 p;
  unsigned k;
  Valuation s;
  unsigned degree;
  unsigned scanWindow;
  std::vector<MarginEntry> margins;
};

/// Least D such that every degree n in (D, D + scanWindow] has margin >= k,
/// with margin (n-1)s + v_p(coefficient). Infinite s gives D = 1.
auto truncation_degree(u64 p, unsigned k, const Valuation &s, unsigned scanWindow = 20)
    -> TruncationCertificate;

/// Compiled evaluator for BCH(x, y) on a reduced Lie ring. Terms are
/// evaluated through the bracket divided by p^s, with the scalar
/// coefficient * p^{(n-1)s}, so only that product must be p-integral.
class BchEvaluator {
public:
  BchEvaluator(const BchSeries &series, const ReducedLieRing &ring);

  auto certificate() const -> const TruncationCertificate & { return cert_; }
  auto modulus() const -> const Modulus & { return mod_; }
  auto rank() const -> std::size_t { return d_; }

  auto operator()(std::span<const u64> x, std::span<const u64> y) const -> Vec;
  /// Allocation-free variant; `out` must not alias x or y.
  void apply(std::span<const u64> x, std::span<const u64> y, std::span<u64> out) const;

private:
  struct Entry {
    std::size_t i, j;
    std::vector<std::pair<std::size_t, u64>> coeffs;
  };
  struct Term {
    int left, right, letter;
    u64 scalar;
  };
  void reduced_bracket(const u64 *x, const u64 *y, u64 *out) const;

  Modulus mod_;
  std::size_t d_;
  TruncationCertificate cert_;
  std::vector<Entry> bracket_;
  std::vector<Term> terms_;
};

/// Single-shot evaluation; builds an evaluator each call.
auto evaluate_bch(const BchSeries &series, const ReducedLieRing &ring, std::span<const u64> x,
                  std::span<const u64> y) -> Vec;

} // namespace lazard
