#include "lazard/bch.hpp"
#include "lazard/corpus.hpp"
#include "lazard/group.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <climits>
#include <random>

using namespace lazard;

namespace {

auto random_vec(std::mt19937_64 &rng, const Modulus &mod, std::size_t d) -> Vec {
  Vec v(d);
  for (auto &x : v)
    x = rng() % mod.value();
  return v;
}

} // namespace

TEST_CASE("hall basis counts") {
  CHECK(hall_basis(1).count(1) == 2);
  CHECK(hall_basis(3).count(3) == 2);
  CHECK(hall_basis(5).count(5) == 6);
  const auto basis = hall_basis(12);
  for (unsigned n = 1; n <= 12; ++n)
    CHECK(basis.count(n) == oracle::witt_count(n));
  CHECK(basis.str(basis.degree_range(2).first) == "[a,b]");
}

TEST_CASE("low-degree BCH coefficients") {
  const auto &s = bch_series(3);
  const auto &b = s.basis();
  CHECK(s.coefficient(0) == PRational(1));
  CHECK(s.coefficient(1) == PRational(1));
  CHECK(s.coefficient(b.degree_range(2).first) == PRational(1, 2));
  const auto [lo, hi] = b.degree_range(3);
  REQUIRE(hi - lo == 2);
  CHECK(b.str(lo) == "[a,[a,b]]");
  CHECK(b.str(lo + 1) == "[b,[a,b]]");
  CHECK(s.coefficient(lo) == PRational(1, 12));
  CHECK(s.coefficient(lo + 1) == PRational(-1, 12));
}

TEST_CASE("BCH series matches the free associative log(exp a exp b)") {
  const unsigned degree = 7;
  const auto &s = bch_series(degree);
  oracle::Poly series;
  for (std::size_t w = 0; w < s.basis().size(); ++w)
    for (const auto &[word, c] : oracle::expand_hall_word(s.basis(), w))
      series[word] += s.coefficient(w).value() * c;
  for (auto it = series.begin(); it != series.end();)
    it = it->second == 0 ? series.erase(it) : std::next(it);
  CHECK(series == oracle::free_log_exp_exp(degree));
}

TEST_CASE("series prefixes are stable") {
  const auto &big = bch_series(9);
  for (unsigned d = 1; d < 9; ++d) {
    const auto &small = bch_series(d);
    REQUIRE(small.basis().size() <= big.basis().size());
    for (std::size_t w = 0; w < small.basis().size(); ++w) {
      CHECK(small.basis().str(w) == big.basis().str(w));
      CHECK(small.coefficient(w) == big.coefficient(w));
    }
  }
}

TEST_CASE("denominator bound on every coefficient") {
  const auto &s = bch_series(12);
  for (u64 p : {2u, 3u, 5u, 7u, 11u, 13u})
    for (std::size_t w = 0; w < s.basis().size(); ++w) {
      const auto &c = s.coefficient(w);
      if (c.is_zero())
        continue;
      const int n = static_cast<int>(s.basis().word(w).degree);
      CHECK(c.valuation(p) >= -((n - 1) / static_cast<int>(p - 1)));
    }
}

TEST_CASE("truncation_degree") {
  for (u64 p : {3u, 5u, 7u, 11u})
    CHECK(truncation_degree(p, 1, Valuation(1u)).degree == 1);
  CHECK(truncation_degree(3, 4, std::nullopt).degree == 1);
  // The first discarded degree is 4 and 2 respectively.
  CHECK(truncation_degree(5, 3, Valuation(1u)).degree == 3);
  CHECK(truncation_degree(3, 2, Valuation(2u)).degree == 1);

  // Recompute the certificate from the series coefficients.
  const auto &s = bch_series(12);
  for (u64 p : {3u, 5u, 7u})
    for (unsigned k = 1; k <= 6; ++k)
      for (unsigned sv = 1; sv <= 3; ++sv) {
        const auto cert = truncation_degree(p, k, Valuation(sv));
        unsigned expect = 1;
        for (unsigned n = 2; n <= cert.scanWindow; ++n) {
          long v;
          if (n <= 12) {
            int mv = INT_MAX;
            const auto [lo, hi] = s.basis().degree_range(n);
            for (std::size_t w = lo; w < hi; ++w)
              if (!s.coefficient(w).is_zero())
                mv = std::min(mv, s.coefficient(w).valuation(p));
            if (mv == INT_MAX)
              continue;
            v = mv;
          } else {
            v = -static_cast<long>((n - 1) / (p - 1));
          }
          if (static_cast<long>(n - 1) * sv + v < static_cast<long>(k))
            expect = n;
        }
        CHECK(cert.degree == expect);
        for (const auto &m : cert.margins)
          if (m.degree > cert.degree)
            CHECK(m.margin >= static_cast<long>(k));
      }
}

TEST_CASE("evaluate_bch on small rings") {
  const auto &series = bch_series(6);
  SUBCASE("abelian ring adds") {
    ReducedLieRing ring(abelian(3, 2), 3);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
      auto x = random_vec(rng, ring.modulus(), 2), y = random_vec(rng, ring.modulus(), 2);
      CHECK(evaluate_bch(series, ring, x, y) == vec_add(ring.modulus(), x, y));
    }
  }
  SUBCASE("scaled Heisenberg over Z/9") {
    ReducedLieRing ring(corpus_entry("heisenberg-scaled-p3").data, 2);
    CHECK(evaluate_bch(series, ring, Vec{1, 0, 0}, Vec{0, 1, 0}) == Vec{1, 1, 6});
  }
}

TEST_CASE("BCH inverse and identity laws") {
  std::mt19937_64 rng(5);
  for (const auto &name : {"heisenberg-scaled-p3", "sl2-p3-s1", "sl2-p5-s1", "sl2-p3-s2"}) {
    const auto data = corpus_entry(name).data;
    for (unsigned m : {2u, 4u}) {
      ReducedLieRing ring(data, m);
      BchEvaluator eval(bch_series(kMaxSeriesDegree), ring);
      const auto &mod = ring.modulus();
      for (int t = 0; t < 10000; ++t) {
        auto x = random_vec(rng, mod, 3);
        Vec neg(3);
        for (std::size_t i = 0; i < 3; ++i)
          neg[i] = mod.neg(x[i]);
        REQUIRE(vec_is_zero(eval(x, neg)));
        REQUIRE(eval(x, Vec(3, 0)) == x);
        REQUIRE(eval(Vec(3, 0), x) == x);
      }
    }
  }
}

TEST_CASE("scaled Heisenberg matches the unitriangular matrix oracle") {
  SUBCASE("exhaustive over Z/9") {
    LazardGroup g(corpus_entry("heisenberg-scaled-p3").data, 2);
    oracle::HeisenbergMatrices mats(3, 1, 2);
    const u64 n = g.element_count();
    u64 mismatches = 0;
    for (u64 a = 0; a < n; ++a) {
      const Vec x = g.element(a);
      for (u64 b = 0; b < n; ++b) {
        const Vec y = g.element(b);
        mismatches += g.mul(x, y) != mats.mul(x, y);
      }
    }
    CHECK(mismatches == 0);
  }
  SUBCASE("sampled over Z/125, s = 2") {
    LazardGroup g(scale(heisenberg(5), 2), 3);
    oracle::HeisenbergMatrices mats(5, 2, 3);
    std::mt19937_64 rng(9);
    for (int t = 0; t < 20000; ++t) {
      auto x = random_vec(rng, g.modulus(), 3), y = random_vec(rng, g.modulus(), 3);
      REQUIRE(g.mul(x, y) == mats.mul(x, y));
    }
  }
}
