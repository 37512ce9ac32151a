#include "lazard/howell.hpp"

#include "lazard/errors.hpp"

#include <algorithm>

namespace lazard {

namespace {

// r -= q * s over the whole row
void axpy_sub(const Modulus &mod, Vec &r, u64 q, const Vec &s) {
  if (q == 0)
    return;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (s[i] != 0)
      r[i] = mod.sub(r[i], mod.mul(q, s[i]));
}

struct EchelonRow {
  Vec entries;
  std::size_t col;
  unsigned valuation;
};

// Howell elimination on rows of a fixed width. Returns rows in echelon order
// with the canonical normalization described in the header.
auto eliminate(const Modulus &mod, std::size_t width, std::vector<Vec> work)
    -> std::vector<EchelonRow> {
  const unsigned k = mod.exponent();
  std::vector<EchelonRow> out;
  std::erase_if(work, [](const Vec &r) { return vec_is_zero(r); });

  for (std::size_t col = 0; col < width && !work.empty(); ++col) {
    std::size_t best = work.size();
    unsigned bestVal = k;
    for (std::size_t i = 0; i < work.size(); ++i) {
      unsigned v = mod.valuation(work[i][col]);
      if (v < bestVal) {
        bestVal = v;
        best = i;
        if (v == 0)
          break;
      }
    }
    if (best == work.size())
      continue;

    Vec pivot = std::move(work[best]);
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(best));

    const u64 ppow = mod.p_power(bestVal);
    const u64 unit = pivot[col] / ppow;
    if (unit != 1) {
      const u64 inv = mod.inverse(unit);
      for (auto &x : pivot)
        x = mod.mul(x, inv);
    }
    for (auto &r : work) {
      u64 e = r[col];
      if (e != 0)
        axpy_sub(mod, r, e / ppow, pivot);
    }
    if (bestVal > 0) {
      Vec ann = vec_scale(mod, mod.p_power(k - bestVal), pivot);
      if (!vec_is_zero(ann))
        work.push_back(std::move(ann));
    }
    std::erase_if(work, [](const Vec &r) { return vec_is_zero(r); });
    out.push_back({std::move(pivot), col, bestVal});
  }

  for (std::size_t i = 0; i < out.size(); ++i) {
    const u64 ppow = mod.p_power(out[i].valuation);
    for (std::size_t j = 0; j < i; ++j) {
      u64 e = out[j].entries[out[i].col];
      if (e >= ppow)
        axpy_sub(mod, out[j].entries, e / ppow, out[i].entries);
    }
  }
  return out;
}

struct Augmented {
  HowellForm image;
  HowellForm kernel;
};

auto augmented_forms(const ResidueMatrix &m) -> Augmented {
  const auto &mod = m.modulus();
  const std::size_t n = m.rows(), c = m.cols();
  std::vector<Vec> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec r(c + n, 0);
    std::copy(m.row(i).begin(), m.row(i).end(), r.begin());
    r[c + i] = 1;
    rows.push_back(std::move(r));
  }
  auto ech = eliminate(mod, c + n, std::move(rows));

  ResidueMatrix basis(mod, 0, c), transform(mod, 0, n), kbasis(mod, 0, n);
  std::vector<Pivot> pivots, kpivots;
  for (auto &r : ech) {
    std::span<const u64> all(r.entries);
    if (r.col < c) {
      pivots.push_back({basis.rows(), r.col, r.valuation});
      basis.append_row(all.subspan(0, c));
      transform.append_row(all.subspan(c, n));
    } else {
      kpivots.push_back({kbasis.rows(), r.col - c, r.valuation});
      kbasis.append_row(all.subspan(c, n));
    }
  }
  auto kid = ResidueMatrix::identity(mod, kbasis.rows());
  return {HowellForm(std::move(basis), std::move(transform), std::move(pivots)),
          HowellForm(std::move(kbasis), std::move(kid), std::move(kpivots))};
}

} // namespace

HowellForm::HowellForm(ResidueMatrix basis, ResidueMatrix transform, std::vector<Pivot> pivots)
    : basis_(std::move(basis)), transform_(std::move(transform)), pivots_(std::move(pivots)) {}

auto HowellForm::order_exponent() const -> unsigned {
  unsigned e = 0;
  for (const auto &p : pivots_)
    e += modulus().exponent() - p.valuation;
  return e;
}

auto HowellForm::free_rank() const -> std::size_t {
  return static_cast<std::size_t>(
      std::count_if(pivots_.begin(), pivots_.end(), [](const Pivot &p) { return p.valuation == 0; }));
}

auto HowellForm::reduce(std::span<const u64> v) const -> Reduction {
  if (v.size() != width())
    throw PreconditionViolation("vector of length " + std::to_string(v.size()) +
                                " reduced against span of width " + std::to_string(width()));
  const auto &mod = modulus();
  Reduction red{Vec(v.begin(), v.end()), Vec(pivots_.size(), 0)};
  for (std::size_t i = 0; i < pivots_.size(); ++i) {
    const auto &pv = pivots_[i];
    const u64 ppow = mod.p_power(pv.valuation);
    u64 e = red.remainder[pv.col];
    u64 q = e / ppow;
    if (q == 0)
      continue;
    red.coefficients[i] = q;
    auto row = basis_.row(pv.row);
    for (std::size_t j = pv.col; j < row.size(); ++j)
      if (row[j] != 0)
        red.remainder[j] = mod.sub(red.remainder[j], mod.mul(q, row[j]));
  }
  return red;
}

auto HowellForm::contains(std::span<const u64> v) const -> bool {
  return vec_is_zero(reduce(v).remainder);
}

auto HowellForm::contains_span(const HowellForm &other) const -> bool {
  for (std::size_t r = 0; r < other.basis().rows(); ++r)
    if (!contains(other.basis().row(r)))
      return false;
  return true;
}

auto HowellForm::annihilator_exponent(const HowellForm &inner) const -> unsigned {
  const auto &mod = modulus();
  for (unsigned e = 0; e <= mod.exponent(); ++e) {
    bool ok = true;
    for (std::size_t r = 0; r < basis_.rows() && ok; ++r)
      ok = inner.contains(vec_scale(mod, mod.p_power(e), basis_.row(r)));
    if (ok)
      return e;
  }
  return mod.exponent();
}

auto howell_form(const ResidueMatrix &m) -> HowellForm { return augmented_forms(m).image; }

auto howell_form(const Modulus &mod, std::size_t width, const std::vector<Vec> &rows)
    -> HowellForm {
  return howell_form(ResidueMatrix::from_rows(mod, width, rows));
}

auto zero_span(const Modulus &mod, std::size_t width) -> HowellForm {
  return HowellForm(ResidueMatrix(mod, 0, width), ResidueMatrix(mod, 0, 0), {});
}

auto full_span(const Modulus &mod, std::size_t width) -> HowellForm {
  std::vector<Pivot> pv;
  for (std::size_t i = 0; i < width; ++i)
    pv.push_back({i, i, 0});
  return HowellForm(ResidueMatrix::identity(mod, width), ResidueMatrix::identity(mod, width),
                    std::move(pv));
}

auto solve_linear(const ResidueMatrix &m, std::span<const u64> b) -> std::optional<LinearSolution> {
  if (b.size() != m.cols())
    throw PreconditionViolation("right-hand side has length " + std::to_string(b.size()) +
                                ", system has " + std::to_string(m.cols()) + " columns");
  auto forms = augmented_forms(m);
  auto red = forms.image.reduce(b);
  if (!vec_is_zero(red.remainder))
    return std::nullopt;
  Vec x = forms.image.transform().left_apply(red.coefficients);
  x = forms.kernel.canonical(x);
  return LinearSolution{std::move(x), std::move(forms.kernel)};
}

auto kernel_of(const ResidueMatrix &m) -> HowellForm { return augmented_forms(m).kernel; }

auto span_order(const ResidueMatrix &rows) -> unsigned {
  std::vector<Vec> r;
  for (std::size_t i = 0; i < rows.rows(); ++i)
    r.push_back(rows.row_vec(i));
  unsigned e = 0;
  for (const auto &row : eliminate(rows.modulus(), rows.cols(), std::move(r)))
    e += rows.modulus().exponent() - row.valuation;
  return e;
}

auto quotient_order(const HowellForm &a, const HowellForm &b) -> unsigned {
  if (!(a.modulus() == b.modulus()) || a.width() != b.width())
    throw ModulusMismatch("quotient_order on spans over different ambient modules");
  for (std::size_t r = 0; r < b.basis().rows(); ++r)
    if (!a.contains(b.basis().row(r)))
      throw ContainmentViolation("quotient_order: inner span is not contained in outer span",
                                 b.basis().row_vec(r));
  return a.order_exponent() - b.order_exponent();
}

} // namespace lazard
