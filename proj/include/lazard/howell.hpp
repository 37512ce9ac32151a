#pragma once

// Howell normal form for row modules over Z/p^k.
//
// Z/p^k is not a domain, so plain row echelon form does not decide span
// membership. The Howell form adds, for every pivot row r with pivot p^v, the
// row p^(k-v)*r back into the elimination; the resulting echelon basis has the
// property that any span element whose first c entries vanish is a
// combination of the basis rows with pivot column >= c. Canonical conventions:
//
//   * pivot columns strictly increase;
//   * every pivot entry is exactly p^v (unit part divided out);
//   * entries above a pivot p^v are reduced into [0, p^v).
//
// Two matrices have the same row span iff their Howell bases are equal.

#include "lazard/modular.hpp"

#include <optional>

namespace lazard {

struct Pivot {
  std::size_t row;
  std::size_t col;
  unsigned valuation;
  auto operator==(const Pivot &) const -> bool = default;
};

class HowellForm {
public:
  HowellForm(ResidueMatrix basis, ResidueMatrix transform, std::vector<Pivot> pivots);

  auto basis() const -> const ResidueMatrix & { return basis_; }
  /// transform * original == basis. Rows index basis rows, columns index the
  /// rows of the matrix the form was computed from.
  auto transform() const -> const ResidueMatrix & { return transform_; }
  auto pivots() const -> const std::vector<Pivot> & { return pivots_; }
  auto modulus() const -> const Modulus & { return basis_.modulus(); }
  auto width() const -> std::size_t { return basis_.cols(); }
  auto rank() const -> std::size_t { return pivots_.size(); }

  /// log_p of the number of elements in the span.
  auto order_exponent() const -> unsigned;
  /// Number of pivots with valuation zero (the free rank of the span).
  auto free_rank() const -> std::size_t;

  struct Reduction {
    Vec remainder;
    Vec coefficients; // one per basis row
  };
  /// Division by the basis: v = coefficients * basis + remainder, with the
  /// remainder's pivot-column entries reduced into [0, p^v).
  auto reduce(std::span<const u64> v) const -> Reduction;
  auto contains(std::span<const u64> v) const -> bool;
  /// Canonical representative of v modulo the span.
  auto canonical(std::span<const u64> v) const -> Vec { return reduce(v).remainder; }
  /// True when every row of `other` lies in this span.
  auto contains_span(const HowellForm &other) const -> bool;
  /// Smallest e with p^e * (this span) inside `inner`.
  auto annihilator_exponent(const HowellForm &inner) const -> unsigned;

  auto operator==(const HowellForm &o) const -> bool {
    return basis_ == o.basis_ && pivots_ == o.pivots_;
  }

private:
  ResidueMatrix basis_;
  ResidueMatrix transform_;
  std::vector<Pivot> pivots_;
};

auto howell_form(const ResidueMatrix &m) -> HowellForm;
/// Howell form of an explicit list of rows of the given width.
auto howell_form(const Modulus &mod, std::size_t width, const std::vector<Vec> &rows)
    -> HowellForm;
/// The zero submodule of (Z/p^k)^width.
auto zero_span(const Modulus &mod, std::size_t width) -> HowellForm;
/// All of (Z/p^k)^width.
auto full_span(const Modulus &mod, std::size_t width) -> HowellForm;

struct LinearSolution {
  /// Canonical particular solution: reduced modulo the kernel, so equal
  /// systems always return the same vector.
  Vec particular;
  HowellForm kernel;
};

/// Solves x * m == b for a row vector x. Unsolvable systems return nullopt.
auto solve_linear(const ResidueMatrix &m, std::span<const u64> b) -> std::optional<LinearSolution>;

/// Howell form of the left kernel {y : y * m == 0}.
auto kernel_of(const ResidueMatrix &m) -> HowellForm;

/// log_p of the size of the row span.
auto span_order(const ResidueMatrix &rows) -> unsigned;

/// log_p |A / B|. Throws ContainmentViolation (with a row of B as witness)
/// when B is not inside A.
auto quotient_order(const HowellForm &a, const HowellForm &b) -> unsigned;

} // namespace lazard
