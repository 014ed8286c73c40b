#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pivm/padic.hpp"

using namespace pivm;

namespace {

const PrimeContext kP5(5, 8);

// The value equals q to its full relative precision.
::testing::AssertionResult matches(const Padic& x, const mpq_class& q) {
  const long p = x.prime();
  if (q == 0) {
    if (x.is_zero()) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "expected zero, got " << x.to_string();
  }
  const long v = oracle::valuation(q, p);
  if (x.is_zero() || x.valuation() != v) {
    return ::testing::AssertionFailure() << "valuation mismatch for " << q.get_str() << ": " << x.to_string();
  }
  const mpq_class unit = v >= 0 ? mpq_class(q / oracle::power(p, v)) : mpq_class(q * oracle::power(p, -v));
  const mpz_class want = oracle::rational_residue(unit, p, x.relative_precision());
  if (x.unit() != want) {
    return ::testing::AssertionFailure() << "digits of " << q.get_str() << ": got " << x.to_string();
  }
  return ::testing::AssertionSuccess();
}

mpq_class random_rational(long p) {
  mpz_class num = oracle::uniform(-2000, 2000);
  mpz_class den = oracle::uniform(1, 2000);
  num *= oracle::power(p, oracle::uniform(0, 2));
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

Padic random_integral(const PrimeContext& ctx) {
  const long p = ctx.prime();
  std::vector<int> digits(static_cast<std::size_t>(ctx.precision()));
  for (auto& d : digits) d = static_cast<int>(oracle::uniform(0, p - 1));
  digits[0] = static_cast<int>(oracle::uniform(1, p - 1));
  return Padic::from_digits(ctx, oracle::uniform(0, 3), digits);
}

}  // namespace

TEST(PrimeContext, RejectsBadParameters) {
  EXPECT_THROW(PrimeContext(2, 8), PreconditionError);
  EXPECT_THROW(PrimeContext(9, 8), PreconditionError);
  EXPECT_THROW(PrimeContext(5, 3), PreconditionError);
  EXPECT_NO_THROW(PrimeContext(101, 4));
}

TEST(FromRational, FifteenAtFive) {
  const Padic x = Padic::from_rational(15, 1, kP5);
  EXPECT_EQ(x.valuation(), 1);
  const auto d = x.digits();
  ASSERT_EQ(d.size(), 8U);
  EXPECT_EQ(d[0], 3);
  for (std::size_t i = 1; i < d.size(); ++i) EXPECT_EQ(d[i], 0);
}

TEST(FromRational, ZeroIsExact) {
  const Padic z = Padic::from_rational(0, 7, PrimeContext(7, 5));
  EXPECT_TRUE(z.is_exact_zero());
  EXPECT_TRUE(z.norm().zero);
}

TEST(FromRational, OneHalfAgreesWithInverseModulo125) {
  const Padic x = Padic::from_rational(1, 2, PrimeContext(5, 4));
  const auto d = x.digits();
  EXPECT_EQ(d[0], 3);
  EXPECT_EQ(d[1], 2);
  EXPECT_EQ(d[2], 2);
  EXPECT_EQ(x.residue(3), oracle::rational_residue(mpq_class(1, 2), 5, 3));
}

TEST(FromRational, ZeroDenominator) { EXPECT_THROW(Padic::from_rational(1, 0, kP5), PreconditionError); }

TEST(FromRational, MatchesLongDivision) {
  for (long p : {3L, 5L, 7L, 11L}) {
    const PrimeContext ctx(p, 10);
    for (int i = 0; i < 200; ++i) {
      mpz_class m = oracle::uniform(1, 5000);
      mpz_class n = oracle::uniform(1, 5000);
      if (m % p == 0 || n % p == 0) continue;
      const auto want = oracle::long_division_digits(m, n, p, 10);
      EXPECT_EQ(Padic::from_rational(m, n, ctx).digits(), want) << m.get_str() << "/" << n.get_str();
    }
  }
}

TEST(Arithmetic, Examples) {
  const Padic one = Padic::one(kP5);
  const Padic p = Padic::from_int(5, kP5);
  EXPECT_EQ((one + p).norm(), Norm::of_valuation(5, 0));
  EXPECT_TRUE(p * Padic::from_rational(1, 5, kP5) == one);
  const Padic h = Padic::from_rational(1, 2, kP5);
  const Padic z = h - h;
  EXPECT_TRUE(z.is_zero());
  EXPECT_FALSE(z.is_exact_zero());
  EXPECT_THROW((void)z.valuation(), PrecisionError);
  EXPECT_THROW((void)z.norm(), PrecisionError);
  EXPECT_THROW((void)z.inverse(), PrecisionError);
  EXPECT_THROW((void)(one / Padic::zero(kP5)), PreconditionError);
}

TEST(Arithmetic, NormsAndValuations) {
  EXPECT_EQ(norm(Padic::from_int(15, kP5)).to_string(), "5^-1");
  EXPECT_EQ(valuation(Padic::from_rational(1, 25, kP5)), -2);
  EXPECT_TRUE(eq_mod(Padic::from_int(63, kP5), Padic::from_rational(1, 2, kP5), 3));
  EXPECT_FALSE(eq_mod(Padic::from_int(64, kP5), Padic::from_rational(1, 2, kP5), 3));
  const Padic coarse = Padic::from_rational(1, 2, PrimeContext(5, 4));
  EXPECT_THROW((void)eq_mod(coarse, Padic::from_int(63, kP5), 6), PrecisionError);
}

TEST(Arithmetic, PowInt) {
  const Padic p = Padic::from_int(5, kP5);
  EXPECT_EQ(pow_int(p, 2).valuation(), 2);
  EXPECT_TRUE(pow_int(Padic::from_int(17, kP5), 0) == Padic::one(kP5));
  const PrimeContext c3(5, 4);
  const Padic x = pow_int(Padic::from_int(6, c3), 4);
  EXPECT_EQ(x.residue(3), 46);
  const auto d = x.digits();
  EXPECT_EQ(d[0], 1);
  EXPECT_EQ(d[1], 4);
  EXPECT_EQ(d[2], 1);
}

TEST(Arithmetic, RingOperationsMatchRationals) {
  for (long p : {3L, 5L, 7L, 13L}) {
    const PrimeContext ctx(p, 9);
    for (int i = 0; i < 300; ++i) {
      const mpq_class x = random_rational(p);
      const mpq_class y = random_rational(p);
      const Padic X = Padic::from_rational(x, ctx);
      const Padic Y = Padic::from_rational(y, ctx);
      EXPECT_TRUE(matches(X * Y, x * y));
      if (y != 0) EXPECT_TRUE(matches(X / Y, x / y));
      // Sums are compared mod the guaranteed absolute precision.
      const Padic S = X + Y;
      const mpq_class s = x + y;
      if (!S.is_zero() && oracle::valuation(s, p) == S.valuation()) {
        EXPECT_TRUE(matches(S, s)) << x.get_str() << " + " << y.get_str();
      } else {
        EXPECT_GE(oracle::valuation(s, p), S.absolute_precision());
      }
    }
  }
}

TEST(Arithmetic, CancellationTracksPrecision) {
  const Padic x = Padic::from_rational(1, 3, kP5);
  const Padic y = x + Padic::from_int(125, kP5);
  const Padic d = y - x;
  EXPECT_EQ(d.valuation(), 3);
  EXPECT_EQ(d.absolute_precision(), 8);
  EXPECT_EQ(d.relative_precision(), 5);
}

TEST(Properties, StrongTriangle) {
  for (int i = 0; i < 1000; ++i) {
    const Padic x = random_integral(kP5);
    const Padic y = random_integral(kP5);
    const Padic s = x + y;
    const Norm bound = std::max(x.norm(), y.norm());
    EXPECT_LE(s.norm_bound(), bound);
    if (x.norm() != y.norm()) EXPECT_EQ(s.norm(), bound);
  }
}

TEST(Properties, Multiplicativity) {
  for (int i = 0; i < 1000; ++i) {
    const Padic x = random_integral(kP5) / Padic::from_int(oracle::power(5, oracle::uniform(0, 3)).get_si(), kP5);
    const Padic y = random_integral(kP5);
    EXPECT_EQ((x * y).norm(), x.norm() * y.norm());
  }
}

TEST(Properties, ProductInequality) {
  for (int i = 0; i < 500; ++i) {
    const int len = static_cast<int>(oracle::uniform(1, 6));
    Padic pa = Padic::one(kP5);
    Padic pb = Padic::one(kP5);
    Norm worst = Norm::zero_norm(5);
    for (int j = 0; j < len; ++j) {
      const Padic a = random_integral(kP5);
      const Padic b = oracle::uniform(0, 1) ? a + Padic::from_int(5 * oracle::uniform(1, 30), kP5) : random_integral(kP5);
      pa *= a;
      pb *= b;
      worst = std::max(worst, (a - b).norm_bound());
    }
    EXPECT_LE((pa - pb).norm_bound(), worst);
  }
}

TEST(Serialization, TextRoundTrip) {
  for (int i = 0; i < 200; ++i) {
    const Padic x = random_integral(kP5) / Padic::from_int(25, kP5);
    const Padic y = Padic::parse(x.to_string(), kP5);
    EXPECT_EQ(y.to_string(), x.to_string());
    EXPECT_EQ(y.unit(), x.unit());
  }
  EXPECT_TRUE(Padic::parse("0", kP5).is_exact_zero());
  const Padic z = Padic::parse("O(5^7)", kP5);
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.absolute_precision(), 7);
  EXPECT_EQ(Padic::from_int(15, kP5).to_string(), "5^1 * [3,0,0,0,0,0,0,0] (prec 8)");
  EXPECT_THROW(Padic::parse("garbage", kP5), PreconditionError);
}

TEST(Serialization, JsonRoundTrip) {
  for (int i = 0; i < 200; ++i) {
    const Padic x = random_integral(kP5) - Padic::from_int(oracle::uniform(0, 50), kP5);
    const Padic y = Padic::from_json(x.to_json(), kP5);
    EXPECT_EQ(y.to_json(), x.to_json());
  }
  const Padic h = Padic::from_rational(1, 2, kP5);
  const Padic z = h - h;
  EXPECT_EQ(Padic::from_json(z.to_json(), kP5).absolute_precision(), z.absolute_precision());
  const auto j = Padic::from_int(15, kP5).to_json();
  EXPECT_EQ(j.at("valuation"), 1);
  EXPECT_EQ(j.at("effective_precision"), 8);
}
