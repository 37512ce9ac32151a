#include "lazard/corpus.hpp"
#include "lazard/errors.hpp"
#include "lazard/group.hpp"
#include "lazard/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace lazard;

namespace {

auto random_vec(std::mt19937_64 &rng, const Modulus &mod, std::size_t d) -> Vec {
  Vec v(d);
  for (auto &x : v)
    x = rng() % mod.value();
  return v;
}

auto uniform_corpus() -> std::vector<CorpusEntry> {
  std::vector<CorpusEntry> out;
  for (auto &e : corpus())
    if (e.expectedUniform)
      out.push_back(e);
  return out;
}

auto commutator(const LazardGroup &g, const Vec &x, const Vec &y) -> Vec {
  return g.mul(g.mul(g.inv(x), g.inv(y)), g.mul(x, y));
}

} // namespace

TEST_CASE("multiplication examples") {
  std::mt19937_64 rng(1);
  LazardGroup ab(abelian(5, 2), 3);
  for (int t = 0; t < 200; ++t) {
    auto x = random_vec(rng, ab.modulus(), 2), y = random_vec(rng, ab.modulus(), 2);
    CHECK(ab.mul(x, y) == vec_add(ab.modulus(), x, y));
  }
  LazardGroup h(corpus_entry("heisenberg-scaled-p3").data, 2);
  CHECK(h.mul(Vec{1, 0, 0}, Vec{0, 1, 0}) == Vec{1, 1, 6});
  for (int t = 0; t < 10000; ++t) {
    auto x = random_vec(rng, h.modulus(), 3);
    REQUIRE(h.mul(x, h.identity()) == x);
    REQUIRE(h.mul(x, h.inv(x)) == h.identity());
  }
  CHECK_THROWS_AS(LazardGroup(heisenberg(3), 2), PreconditionViolation);
  CHECK_THROWS_AS(h.mul(Vec{9, 0, 0}, Vec{0, 0, 0}), ModulusMismatch);
}

TEST_CASE("powers") {
  std::mt19937_64 rng(2);
  LazardGroup h3(corpus_entry("heisenberg-scaled-p3").data, 3);
  CHECK(h3.power(Vec{1, 0, 0}, 3) == Vec{3, 0, 0});
  CHECK(h3.power_iterated(Vec{1, 0, 0}, 3) == Vec{3, 0, 0});
  for (const auto &e : uniform_corpus()) {
    LazardGroup g(e.data, 3);
    for (int t = 0; t < 50; ++t) {
      auto x = random_vec(rng, g.modulus(), g.rank());
      CHECK(g.power(x, 0) == g.identity());
      CHECK(g.power(x, 2) == g.mul(x, x));
      for (long n : {3L, 7L, -1L, -4L})
        CHECK(g.power(x, n) == g.power_iterated(x, n));
    }
  }
}

TEST_CASE("order and filtration laws") {
  for (const auto &e : uniform_corpus())
    for (unsigned m = 1; m <= 3; ++m) {
      LazardGroup g(e.data, m);
      const auto d = static_cast<unsigned>(g.rank());
      CHECK(g.order_exponent() == d * m);
      for (unsigned j = 0; j <= m; ++j)
        CHECK(ppower_subgroup(g, j).indexExponent == d * j);
    }
  CHECK_THROWS_AS(ppower_subgroup(LazardGroup(abelian(3, 2), 2), 3), PreconditionViolation);
}

TEST_CASE("p-th powers fill the p-power subgroup") {
  for (const auto &name : {"heisenberg-scaled-p3", "sl2-p3-s1", "abelian-d2-p3"}) {
    const auto data = corpus_entry(name).data;
    LazardGroup g(data, data.rank() == 3 ? 2u : 3u);
    const auto sub = ppower_subgroup(g, 1);
    std::set<Vec> powers;
    for (u64 i = 0; i < g.element_count(); ++i)
      powers.insert(g.power(g.element(i), 3));
    u64 inSpan = 0;
    for (u64 i = 0; i < g.element_count(); ++i)
      inSpan += sub.span.contains(g.element(i));
    CHECK(powers.size() == inSpan);
    for (const auto &x : powers)
      CHECK(sub.span.contains(x));
  }
}

TEST_CASE("exhaustive group axioms on small groups") {
  for (const auto &e : uniform_corpus())
    for (unsigned m = 1; m <= 3; ++m) {
      LazardGroup g(e.data, m);
      if (!g.enumerable(729))
        continue;
      auto t = kernels::mul_table_omp(g);
      CHECK(kernels::associativity_failures_omp(t) == 0);
      for (std::uint32_t a = 0; a < t.order; ++a) {
        CHECK(t.mul(a, t.identity) == a);
        CHECK(t.mul(a, t.inverse[a]) == t.identity);
      }
    }
}

TEST_CASE("element orders") {
  LazardGroup g(corpus_entry("heisenberg-scaled-p3").data, 2);
  for (u64 i = 1; i < g.element_count(); ++i) {
    const Vec x = g.element(i);
    const unsigned v = vec_valuation(g.modulus(), x);
    long order = 1;
    Vec y = x;
    while (y != g.identity()) {
      y = g.mul(y, x);
      ++order;
    }
    CHECK(order == static_cast<long>(std::pow(3, 2 - v)));
  }
}

TEST_CASE("filtration compatibility") {
  std::mt19937_64 rng(4);
  for (const auto &e : uniform_corpus()) {
    if (!e.expectedS)
      continue;
    const unsigned s = *e.expectedS;
    LazardGroup g(e.data, 4);
    const auto &mod = g.modulus();
    for (unsigned i = 0; i < 4; ++i)
      for (int t = 0; t < 200; ++t) {
        auto x = vec_scale(mod, mod.p_power(i), random_vec(rng, mod, g.rank()));
        auto y = vec_scale(mod, mod.p_power(i), random_vec(rng, mod, g.rank()));
        CHECK(vec_valuation(mod, g.mul(x, y)) >= i);
        auto u = random_vec(rng, mod, g.rank());
        CHECK(vec_valuation(mod, commutator(g, u, x)) >= std::min(4u, i + s));
      }
  }
}

TEST_CASE("restriction") {
  const auto data = corpus_entry("heisenberg-scaled-p3").data;
  LazardGroup g2(data, 2), g1(data, 1);
  CHECK(restriction(g2, g2, inner(g2, Vec{1, 2, 3})) == inner(g2, Vec{1, 2, 3}));
  const Vec h{4, 5, 7};
  CHECK(restriction(g2, g1, inner(g2, h)) == inner(g1, vec_reduce(g1.modulus(), h)));
  CHECK_THROWS_AS(restriction(g1, g2, identity_endomorphism(g1)), PreconditionViolation);

  // Aut((Z/9)^2) -> Aut((Z/3)^2): enumerate every matrix.
  LazardGroup a2(abelian(3, 2), 2), a1(abelian(3, 2), 1);
  const auto id1 = identity_endomorphism(a1);
  u64 autos = 0, kernel = 0;
  for (u64 idx = 0; idx < 6561; ++idx) {
    u64 r = idx;
    ResidueMatrix m(a2.modulus(), 2, 2);
    for (std::size_t c = 0; c < 4; ++c) {
      m.set(c / 2, c % 2, r % 9);
      r /= 9;
    }
    const auto phi = from_matrix(m);
    if (!is_automorphism(a2, phi))
      continue;
    ++autos;
    kernel += restriction(a2, a1, phi) == id1;
  }
  CHECK(autos == 3888);
  CHECK(kernel == 81);
  CHECK(autos / kernel == 48);
}

TEST_CASE("automorphism checks") {
  LazardGroup g(corpus_entry("sl2-p3-s1").data, 2);
  CHECK(is_automorphism(g, identity_endomorphism(g)));
  CHECK(is_automorphism(g, inner(g, Vec{1, 4, 2})));
  CHECK(check_homomorphism_pairs(g, inner(g, Vec{1, 4, 2})).passed);
  // scaling one generator by 2 breaks the bracket relations
  Endomorphism bad = identity_endomorphism(g);
  bad.images[0] = Vec{2, 0, 0};
  const auto check = check_automorphism(g, bad);
  CHECK_FALSE(check.homomorphism);
  CHECK(check.failedRelation.has_value());
  CHECK_FALSE(check_homomorphism_pairs(g, bad).passed);
  Endomorphism singular = identity_endomorphism(g);
  singular.images[0] = Vec{3, 0, 0};
  CHECK_FALSE(is_automorphism(g, singular));
}

TEST_CASE("section modules") {
  LazardGroup ab(abelian(3, 2), 3);
  auto sa = section_module(ab, 1, 3);
  CHECK(sa.verdict());
  for (const auto &m : sa.action)
    CHECK(m == ResidueMatrix::identity(sa.moduleModulus, 2));

  LazardGroup h(corpus_entry("heisenberg-scaled-p3").data, 2);
  auto sh = section_module(h, 1, 2);
  CHECK(sh.verdict());
  CHECK(sh.exhaustive);
  CHECK(sh.moduleModulus.value() == 3);
  CHECK(sh.dim == 3);

  LazardGroup sl(corpus_entry("sl2-p5-s1").data, 2);
  VerifyOptions full;
  full.exhaustiveLimit = 5 * 5 * 5 * 5 * 5 * 5;
  auto ss = section_module(sl, 1, 2, full);
  CHECK(ss.verdict());
  CHECK(ss.exhaustive);

  CHECK_THROWS_AS(section_module(LazardGroup(abelian(3, 2), 4), 1, 4), PreconditionViolation);

  // embed / rescale round trip
  const Vec y{1, 2, 0};
  CHECK(section_rescale(h, 1, 2, section_embed(h, 1, y)) == y);
  CHECK_THROWS_AS(section_rescale(h, 1, 2, Vec{1, 0, 0}), ContainmentViolation);
}

TEST_CASE("pc digits round trip") {
  LazardGroup g(corpus_entry("sl2-p3-s2").data, 2);
  for (u64 i = 0; i < g.element_count(); ++i) {
    const Vec x = g.element(i);
    REQUIRE(g.from_pc_digits(g.pc_digits(x)) == x);
    REQUIRE(g.index_of(x) == i);
  }
}
