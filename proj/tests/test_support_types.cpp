#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "pircsi/combinat.hpp"
#include "pircsi/linsys.hpp"
#include "pircsi/rational.hpp"
#include "pircsi/rng.hpp"

using namespace pircsi;

TEST_CASE("rational arithmetic and canonical form") {
  Rational a(2, 4);
  CHECK(a.num() == 1);
  CHECK(a.den() == 2);
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
  CHECK((Rational(3, 7) * Rational(7, 3)) == Rational(1));
  CHECK((Rational(1) / Rational(4)).str() == "1/4");
  CHECK(Rational(-2, -4) == Rational(1, 2));
  CHECK(Rational(2, -4).str() == "-1/2");
  CHECK(Rational::parse("14/171") == Rational(14, 171));
  CHECK(Rational::parse("3") == Rational(3));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(0).is_zero());
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(Rational(1).inverse() / Rational(0), std::invalid_argument);
  CHECK(Rational(1, 3).to_double() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("rational survives large products") {
  Rational p(1);
  for (int i = 2; i <= 40; ++i) p *= Rational(1, i);
  Rational back = p;
  for (int i = 2; i <= 40; ++i) back *= Rational(i);
  CHECK(back == Rational(1));
}

TEST_CASE("rng determinism and fork independence") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform_below(1000) == b.uniform_below(1000));

  Rng base(7);
  Rng c1 = base.fork(1);
  Rng c1_again = base.fork(1);
  Rng c2 = base.fork(2);
  CHECK(c1.uniform_below(1 << 30) == c1_again.uniform_below(1 << 30));
  // distinct tags give distinct streams (overwhelmingly)
  bool differs = false;
  Rng d1 = base.fork(1), d2 = base.fork(2);
  for (int i = 0; i < 8; ++i)
    if (d1.uniform_below(1 << 20) != d2.uniform_below(1 << 20)) differs = true;
  CHECK(differs);
  (void)c2;
}

TEST_CASE("uniform_below covers the range without bias artifacts") {
  Rng rng(99);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) ++counts[rng.uniform_below(5)];
  for (int c : counts) {
    CHECK(c > 9000);
    CHECK(c < 11000);
  }
  CHECK(rng.uniform_below(1) == 0);
  CHECK_THROWS_AS(rng.uniform_below(0), std::invalid_argument);
}

TEST_CASE("uniform_below_big handles wide bounds") {
  Rng rng(5);
  BigInt bound = BigInt("123456789012345678901234567890");
  for (int i = 0; i < 50; ++i) {
    BigInt v = rng.uniform_below_big(bound);
    CHECK(v >= 0);
    CHECK(v < bound);
  }
}

TEST_CASE("scripted choices replay and reject out-of-range values") {
  ScriptedChoices s({3, 0, 2});
  CHECK(s.uniform_below(5) == 3);
  CHECK(s.uniform_below(1) == 0);  // consumes nothing
  CHECK(s.uniform_below(2) == 0);
  CHECK(s.uniform_below(4) == 2);
  CHECK(s.exhausted());
  CHECK_THROWS_AS(s.uniform_below(2), std::runtime_error);
  ScriptedChoices bad({9});
  CHECK_THROWS_AS(bad.uniform_below(3), std::runtime_error);
}

TEST_CASE("pick_distinct returns sorted distinct subsets") {
  Rng rng(11);
  std::vector<int> pool{4, 8, 15, 16, 23, 42};
  for (int i = 0; i < 100; ++i) {
    auto picked = pick_distinct(pool, 3, rng);
    CHECK(picked.size() == 3);
    CHECK(std::is_sorted(picked.begin(), picked.end()));
    std::set<int> pool_set(pool.begin(), pool.end());
    for (int v : picked) CHECK(pool_set.count(v) == 1);
  }
  CHECK_THROWS_AS(pick_distinct(pool, 7, rng), std::invalid_argument);
}

TEST_CASE("binomial, factorial, multinomial") {
  CHECK(binomial(9, 3) == 84);
  CHECK(binomial(5, 0) == 1);
  CHECK(binomial(4, 5) == 0);
  CHECK(binomial(52, 26) == BigInt("495918532948104"));
  CHECK(factorial(10) == 3628800);
  CHECK(multinomial({3, 3}) == 20);
  CHECK(multinomial({2, 1, 1}) == 12);
  CHECK(multinomial({0}) == 1);
}

TEST_CASE("subset enumeration is complete and ordered") {
  std::vector<int> pool{1, 2, 3, 4, 5};
  std::vector<std::vector<int>> seen;
  for_each_subset<int>(pool, 3, [&](const std::vector<int>& s) { seen.push_back(s); });
  CHECK(seen.size() == 10);
  CHECK(seen.front() == std::vector<int>{1, 2, 3});
  CHECK(seen.back() == std::vector<int>{3, 4, 5});
  std::set<std::vector<int>> uniq(seen.begin(), seen.end());
  CHECK(uniq.size() == seen.size());

  int empty_count = 0;
  for_each_subset<int>(pool, 0, [&](const std::vector<int>& s) {
    CHECK(s.empty());
    ++empty_count;
  });
  CHECK(empty_count == 1);
}

TEST_CASE("coefficient sequences cover (q-1)^len") {
  int count = 0;
  for_each_coeff_seq(3, 3, [&](const std::vector<std::uint32_t>& c) {
    for (auto v : c) {
      CHECK(v >= 1);
      CHECK(v <= 2);
    }
    ++count;
  });
  CHECK(count == 8);
  count = 0;
  for_each_coeff_seq(5, 0, [&](const std::vector<std::uint32_t>&) { ++count; });
  CHECK(count == 1);
}

TEST_CASE("exact linear solver") {
  // x + y = 1, x - y = 1/3  ->  x = 2/3, y = 1/3
  std::vector<LinearEquation> eqs(2);
  eqs[0].coeffs = {Rational(1), Rational(1)};
  eqs[0].rhs = Rational(1);
  eqs[1].coeffs = {Rational(1), Rational(-1)};
  eqs[1].rhs = Rational(1, 3);
  auto sol = solve_unique(eqs, 2, "test");
  CHECK(sol[0] == Rational(2, 3));
  CHECK(sol[1] == Rational(1, 3));

  std::vector<LinearEquation> under(1);
  under[0].coeffs = {Rational(1), Rational(1)};
  under[0].rhs = Rational(1);
  CHECK_THROWS_AS(solve_unique(under, 2, "under"), LinearSystemError);

  std::vector<LinearEquation> incons(2);
  incons[0].coeffs = {Rational(1)};
  incons[0].rhs = Rational(1);
  incons[1].coeffs = {Rational(2)};
  incons[1].rhs = Rational(3);
  CHECK_THROWS_AS(solve_unique(incons, 1, "incons"), LinearSystemError);
}
