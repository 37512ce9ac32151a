#include "lazard/group.hpp"

#include "lazard/errors.hpp"

#include <random>

namespace lazard {

LazardGroup::LazardGroup(LieRingData data, unsigned m)
    : ring_((require_valid(data), std::move(data)), m),
      relations_(std::make_shared<RelationCache>()) {
  if (!is_uniform_valuation(prime(), ring_.bracket_valuation()))
    throw PreconditionViolation("ring '" + ring_.base().label() + "' is not uniform (s = " +
                                valuation_str(ring_.bracket_valuation()) + ")");
  eval_ = std::make_shared<BchEvaluator>(bch_series(kMaxSeriesDegree), ring_);
}

auto LazardGroup::order_exponent() const -> unsigned {
  return static_cast<unsigned>(rank()) * precision();
}

auto LazardGroup::order() const -> mpz_class {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), prime(), order_exponent());
  return r;
}

void LazardGroup::check(std::span<const u64> x) const {
  if (x.size() != rank())
    throw ModulusMismatch("element of length " + std::to_string(x.size()) + " in a rank-" +
                          std::to_string(rank()) + " group");
  for (u64 v : x)
    if (v >= modulus().value())
      throw ModulusMismatch("coordinate " + std::to_string(v) + " is not reduced mod " +
                            std::to_string(modulus().value()));
}

auto LazardGroup::mul(std::span<const u64> x, std::span<const u64> y) const -> Vec {
  Vec out(rank());
  mul_into(x, y, out);
  return out;
}

void LazardGroup::mul_into(std::span<const u64> x, std::span<const u64> y,
                           std::span<u64> out) const {
  check(x);
  check(y);
  eval_->apply(x, y, out);
}

auto LazardGroup::inv(std::span<const u64> x) const -> Vec {
  check(x);
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    r[i] = modulus().neg(x[i]);
  return r;
}

auto LazardGroup::power(std::span<const u64> x, long n) const -> Vec {
  check(x);
  return vec_scale(modulus(), modulus().from_signed(n), x);
}

auto LazardGroup::power_iterated(std::span<const u64> x, long n) const -> Vec {
  Vec base = n < 0 ? inv(x) : Vec(x.begin(), x.end());
  Vec acc = identity();
  for (long i = 0; i < (n < 0 ? -n : n); ++i)
    acc = mul(acc, base);
  return acc;
}

auto LazardGroup::conjugate(std::span<const u64> g, std::span<const u64> x) const -> Vec {
  return mul(mul(g, x), inv(g));
}

auto LazardGroup::generators() const -> std::vector<Vec> {
  std::vector<Vec> gens;
  for (std::size_t i = 0; i < rank(); ++i)
    gens.push_back(ring_.unit(i));
  return gens;
}

auto LazardGroup::pc_generator(unsigned level, std::size_t i) const -> Vec {
  Vec e(rank(), 0);
  e[i] = modulus().p_power(level);
  return e;
}

auto LazardGroup::element_count() const -> u64 {
  u64 n = 1;
  for (std::size_t i = 0; i < rank(); ++i) {
    if (n > (u64{1} << 62) / modulus().value())
      throw BudgetExceeded("group order exceeds 2^62 elements");
    n *= modulus().value();
  }
  return n;
}

auto LazardGroup::enumerable(u64 budget) const -> bool {
  try {
    return element_count() <= budget;
  } catch (const BudgetExceeded &) {
    return false;
  }
}

auto LazardGroup::index_of(std::span<const u64> x) const -> u64 {
  u64 idx = 0;
  for (u64 v : x)
    idx = idx * modulus().value() + v;
  return idx;
}

auto LazardGroup::element(u64 index) const -> Vec {
  Vec x(rank());
  for (std::size_t i = rank(); i-- > 0;) {
    x[i] = index % modulus().value();
    index /= modulus().value();
  }
  return x;
}

auto LazardGroup::pc_digits(std::span<const u64> x) const -> std::vector<unsigned> {
  check(x);
  const std::size_t d = rank();
  const unsigned m = precision();
  const u64 p = prime();
  std::vector<unsigned> digits(d * m, 0);
  Vec r(x.begin(), x.end());
  for (unsigned l = 0; l < m; ++l) {
    const u64 pl = modulus().p_power(l);
    Vec h = identity();
    for (std::size_t i = 0; i < d; ++i) {
      if (r[i] % pl != 0)
        throw Error("pc normal form: remainder left the filtration");
      auto c = static_cast<unsigned>((r[i] / pl) % p);
      digits[l * d + i] = c;
      if (c != 0)
        h = mul(h, power(pc_generator(l, i), c));
    }
    r = mul(inv(h), r);
  }
  if (!vec_is_zero(r))
    throw Error("pc normal form did not terminate at the identity");
  return digits;
}

auto LazardGroup::from_pc_digits(const std::vector<unsigned> &digits) const -> Vec {
  const std::size_t d = rank();
  Vec r = identity();
  for (std::size_t n = 0; n < digits.size(); ++n)
    if (digits[n] != 0)
      r = mul(r, power(pc_generator(static_cast<unsigned>(n / d), n % d), digits[n]));
  return r;
}

auto LazardGroup::pc_relations() const -> const std::vector<Relation> & {
  std::call_once(relations_->once, [this] {
    const std::size_t d = rank(), n = d * precision();
    for (std::size_t a = 0; a < n; ++a) {
      Vec ga = pc_generator(static_cast<unsigned>(a / d), a % d);
      for (std::size_t b = a + 1; b < n; ++b) {
        Vec gb = pc_generator(static_cast<unsigned>(b / d), b % d);
        relations_->relations.push_back({a, b, pc_digits(conjugate(inv(ga), gb))});
      }
    }
  });
  return relations_->relations;
}

auto ppower_subgroup(const LazardGroup &g, unsigned j) -> PPowerSubgroup {
  if (j > g.precision())
    throw PreconditionViolation("p-power level exceeds the group precision");
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < g.rank(); ++i)
    rows.push_back(g.pc_generator(j, i));
  auto span = howell_form(g.modulus(), g.rank(), rows);
  unsigned idx = g.order_exponent() - span.order_exponent();
  return {std::move(span), idx};
}

auto identity_endomorphism(const LazardGroup &g) -> Endomorphism { return {g.generators()}; }

auto inner(const LazardGroup &g, std::span<const u64> h) -> Endomorphism {
  Endomorphism e;
  for (const auto &x : g.generators())
    e.images.push_back(g.conjugate(h, x));
  return e;
}

auto from_matrix(const ResidueMatrix &a) -> Endomorphism {
  Endomorphism e;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    Vec col(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
      col[r] = a.at(r, c);
    e.images.push_back(std::move(col));
  }
  return e;
}

namespace {
void check_shape(const LazardGroup &g, const Endomorphism &phi) {
  if (phi.images.size() != g.rank())
    throw PreconditionViolation("endomorphism needs one image per generator");
  for (const auto &x : phi.images)
    g.check(x);
}
} // namespace

auto apply(const LazardGroup &g, const Endomorphism &phi, std::span<const u64> x) -> Vec {
  check_shape(g, phi);
  const std::size_t d = g.rank();
  auto digits = g.pc_digits(x);
  Vec r = g.identity();
  for (std::size_t n = 0; n < digits.size(); ++n)
    if (digits[n] != 0) {
      u64 f = g.modulus().mul(g.modulus().p_power(static_cast<unsigned>(n / d)), digits[n]);
      r = g.mul(r, g.power(phi.images[n % d], static_cast<long>(f)));
    }
  return r;
}

auto compose(const LazardGroup &g, const Endomorphism &f, const Endomorphism &h)
    -> Endomorphism {
  Endomorphism e;
  for (const auto &x : h.images)
    e.images.push_back(apply(g, f, x));
  return e;
}

auto restriction(const LazardGroup &gi, const LazardGroup &gj, const Endomorphism &phi)
    -> Endomorphism {
  if (gj.precision() > gi.precision())
    throw PreconditionViolation("restriction goes from a deeper level to a shallower one");
  if (!(gi.data() == gj.data()))
    throw PreconditionViolation("restriction between groups of different rings");
  check_shape(gi, phi);
  Endomorphism e;
  for (const auto &x : phi.images)
    e.images.push_back(vec_reduce(gj.modulus(), x));
  return e;
}

auto check_automorphism(const LazardGroup &g, const Endomorphism &phi) -> HomCheck {
  check_shape(g, phi);
  const std::size_t d = g.rank(), n = d * g.precision();
  std::vector<Vec> a(n);
  for (std::size_t k = 0; k < n; ++k)
    a[k] = g.power(phi.images[k % d],
                   static_cast<long>(g.modulus().p_power(static_cast<unsigned>(k / d))));
  HomCheck out{true, false, std::nullopt};
  const auto &rels = g.pc_relations();
  for (std::size_t r = 0; r < rels.size(); ++r) {
    const auto &rel = rels[r];
    Vec lhs = g.conjugate(g.inv(a[rel.lower]), a[rel.upper]);
    Vec rhs = g.identity();
    for (std::size_t k = 0; k < n; ++k)
      if (rel.digits[k] != 0)
        rhs = g.mul(rhs, g.power(a[k], rel.digits[k]));
    if (lhs != rhs) {
      out.homomorphism = false;
      out.failedRelation = r;
      break;
    }
  }
  Modulus fp(g.prime(), 1);
  std::vector<Vec> rows;
  for (const auto &x : phi.images)
    rows.push_back(vec_reduce(fp, x));
  out.bijective = howell_form(fp, d, rows).rank() == d;
  return out;
}

auto is_automorphism(const LazardGroup &g, const Endomorphism &phi) -> bool {
  auto c = check_automorphism(g, phi);
  return c.homomorphism && c.bijective;
}

auto check_homomorphism_pairs(const LazardGroup &g, const Endomorphism &phi,
                              const VerifyOptions &opts) -> PairCheck {
  check_shape(g, phi);
  PairCheck out{true, false, 0};
  const bool small = g.enumerable(opts.pairLimit) && g.element_count() * g.element_count() <=
                                                         opts.pairLimit;
  auto test = [&](const Vec &x, const Vec &y) {
    ++out.checked;
    if (apply(g, phi, g.mul(x, y)) != g.mul(apply(g, phi, x), apply(g, phi, y)))
      out.passed = false;
  };
  if (small) {
    out.exhaustive = true;
    const u64 n = g.element_count();
    std::vector<Vec> images(n), elems(n);
    for (u64 i = 0; i < n; ++i) {
      elems[i] = g.element(i);
      images[i] = apply(g, phi, elems[i]);
    }
    for (u64 i = 0; i < n && out.passed; ++i)
      for (u64 j = 0; j < n && out.passed; ++j) {
        ++out.checked;
        Vec prod = g.mul(elems[i], elems[j]);
        if (images[g.index_of(prod)] != g.mul(images[i], images[j]))
          out.passed = false;
      }
    return out;
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<u64> coord(0, g.modulus().value() - 1);
  Vec x(g.rank()), y(g.rank());
  for (u64 s = 0; s < opts.samples && out.passed; ++s) {
    for (auto &v : x)
      v = coord(rng);
    for (auto &v : y)
      v = coord(rng);
    test(x, y);
  }
  return out;
}

auto section_embed(const LazardGroup &g, unsigned i, std::span<const u64> y) -> Vec {
  return vec_scale(g.modulus(), g.modulus().p_power(i), y);
}

auto section_rescale(const LazardGroup &g, unsigned i, unsigned j, std::span<const u64> x)
    -> Vec {
  Modulus target(g.prime(), j - i);
  const u64 pi = g.modulus().p_power(i);
  Vec r(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (pi == 0 || x[t] % pi != 0)
      throw ContainmentViolation("element does not lie in U^{p^" + std::to_string(i) + "}",
                                 Vec(x.begin(), x.end()));
    r[t] = target.reduce(x[t] / pi);
  }
  return r;
}

auto section_action(const LazardGroup &g, unsigned i, unsigned j, std::span<const u64> h)
    -> ResidueMatrix {
  Modulus target(g.prime(), j - i);
  const std::size_t d = g.rank();
  ResidueMatrix m(target, d, d);
  for (std::size_t c = 0; c < d; ++c) {
    Vec e(d, 0);
    e[c] = 1;
    auto col = section_rescale(g, i, j, g.conjugate(h, section_embed(g, i, e)));
    for (std::size_t r = 0; r < d; ++r)
      m.set(r, c, col[r]);
  }
  return m;
}

auto section_module(const LazardGroup &g, unsigned i, unsigned j, const VerifyOptions &opts)
    -> SectionModule {
  if (!(i < j && j <= 2 * i + 1 && j <= g.precision()))
    throw PreconditionViolation("section window (" + std::to_string(i) + "," + std::to_string(j) +
                                ") outside i < j <= min(2i+1, m) with m = " +
                                std::to_string(g.precision()));
  const std::size_t d = g.rank();
  Modulus target(g.prime(), j - i);
  SectionModule sm{i, j, target, d, {}, true, true, true, 0};
  for (const auto &gen : g.generators())
    sm.action.push_back(section_action(g, i, j, gen));

  // section elements y in (Z/p^{j-i})^d
  u64 sectionSize = 1;
  bool sectionSmall = true;
  for (std::size_t t = 0; t < d && sectionSmall; ++t) {
    sectionSmall = sectionSize <= opts.exhaustiveLimit / target.value();
    sectionSize *= target.value();
  }
  auto section_elem = [&](u64 idx) {
    Vec y(d);
    for (std::size_t t = d; t-- > 0;) {
      y[t] = idx % target.value();
      idx /= target.value();
    }
    return y;
  };
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<u64> ycoord(0, target.value() - 1);
  std::uniform_int_distribution<u64> gcoord(0, g.modulus().value() - 1);
  auto random_section = [&] {
    Vec y(d);
    for (auto &v : y)
      v = ycoord(rng);
    return y;
  };
  auto random_group = [&] {
    Vec x(d);
    for (auto &v : x)
      v = gcoord(rng);
    return x;
  };

  // (a) abelian, with the group product inducing coordinate addition
  auto pair_ok = [&](const Vec &y1, const Vec &y2) {
    ++sm.checks;
    Vec a = section_embed(g, i, y1), b = section_embed(g, i, y2);
    Vec ab = g.mul(a, b), ba = g.mul(b, a);
    Vec q = g.mul(ab, g.inv(ba));
    if (vec_valuation(g.modulus(), q) < j)
      return false;
    return section_rescale(g, i, j, ab) == vec_add(target, y1, y2);
  };
  if (sectionSmall) {
    for (u64 s = 0; s < sectionSize && sm.abelian; ++s)
      for (u64 t = 0; t < sectionSize && sm.abelian; ++t)
        sm.abelian = pair_ok(section_elem(s), section_elem(t));
  } else {
    sm.exhaustive = false;
    for (u64 s = 0; s < opts.samples && sm.abelian; ++s)
      sm.abelian = pair_ok(random_section(), random_section());
  }

  // (b) conjugation on the section matches exp(ad u) on L / p^{j-i} L
  auto conj_ok = [&](const Vec &u, const Vec &y) {
    ++sm.checks;
    auto ad = adjoint_exp(g.data(), u, target);
    Vec lhs = section_rescale(g, i, j, g.conjugate(u, section_embed(g, i, y)));
    return lhs == ad.apply(y);
  };
  for (std::size_t t = 0; t < d && sm.intertwines; ++t)
    sm.intertwines = sm.action[t] == adjoint_exp(g.data(), g.generators()[t], target);
  const bool groupSmall = g.enumerable(opts.exhaustiveLimit);
  if (groupSmall && sectionSmall) {
    for (u64 ui = 0; ui < g.element_count() && sm.intertwines; ++ui) {
      Vec u = g.element(ui);
      auto ad = adjoint_exp(g.data(), u, target);
      for (u64 s = 0; s < sectionSize && sm.intertwines; ++s) {
        ++sm.checks;
        Vec y = section_elem(s);
        sm.intertwines =
            section_rescale(g, i, j, g.conjugate(u, section_embed(g, i, y))) == ad.apply(y);
      }
    }
  } else {
    sm.exhaustive = false;
    for (u64 s = 0; s < opts.samples && sm.intertwines; ++s)
      sm.intertwines = conj_ok(random_group(), random_section());
  }
  return sm;
}

} // namespace lazard
