#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pivm/hensel.hpp"
#include "pivm/solver.hpp"

using namespace pivm;

namespace {

Polynomial univariate(const PrimeContext& ctx, std::initializer_list<long> coeffs) {
  std::vector<Padic> c;
  for (long x : coeffs) c.push_back(Padic::from_int(x, ctx));
  return Polynomial::univariate(c);
}

long eval_mod(const std::vector<long>& coeffs, long x, long m) {
  __int128 acc = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = (acc * x + coeffs[i]) % m;
  return static_cast<long>((acc + m) % m);
}

}  // namespace

TEST(Lift, SquareRootOfTwoModSeven) {
  const PrimeContext ctx(7, 8);
  const IntPolySystem F({univariate(ctx, {-2, 0, 1})});
  const long seed[1] = {3};
  const auto r = lift(F, seed);
  EXPECT_EQ(r[0].residue(2), 10);
  EXPECT_TRUE(F.evaluate(r)[0].is_zero());
}

TEST(Lift, ExactRootStays) {
  const PrimeContext ctx(5, 8);
  const IntPolySystem F({univariate(ctx, {-1, 0, 0, 1})});
  const long seed[1] = {1};
  EXPECT_TRUE(lift(F, seed)[0] == Padic::one(ctx));
}

TEST(Lift, Errors) {
  const PrimeContext ctx(5, 8);
  const IntPolySystem F({univariate(ctx, {-2, 0, 1})});
  const long bad[1] = {1};
  EXPECT_THROW(lift(F, bad), SeedNotRootError);
  const IntPolySystem G({univariate(ctx, {0, 0, 1})});
  const long zero[1] = {0};
  EXPECT_THROW(lift(G, zero), SingularJacobianError);
}

TEST(Lift, SystemGAtOnes) {
  const CouplingParams cp = CouplingParams::make(PrimeContext(5, 10), 2, 5, 5);
  const IntPolySystem G = translation_invariant_system(cp);
  const long seed[3] = {1, 1, 1};
  const auto u = lift(G, seed);
  for (const auto& g : G.evaluate(u)) EXPECT_GE(g.valuation_lower_bound(), 10);
  for (const auto& x : u) EXPECT_EQ(x.unit_residue(), 1);
}

TEST(Lift, SchedulesAgree) {
  for (int k : {2, 3, 4}) {
    const CouplingParams cp = CouplingParams::make(PrimeContext(7, 12), k, 7, mpq_class(14, 3));
    const UTriple q = hensel_translation_invariant(cp, LiftSchedule::kQuadratic);
    const UTriple l = hensel_translation_invariant(cp, LiftSchedule::kLinear);
    EXPECT_TRUE(eq_mod(q.u1, l.u1, 12));
    EXPECT_TRUE(eq_mod(q.u2, l.u2, 12));
    EXPECT_TRUE(eq_mod(q.u3, l.u3, 12));
  }
}

TEST(Lift, UnivariateMatchesExhaustiveSearch) {
  for (long p : {3L, 5L, 7L, 11L}) {
    const long m3 = p * p * p;
    const PrimeContext ctx(p, 6);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<long> c(static_cast<std::size_t>(oracle::uniform(2, 4)) + 1);
      for (auto& x : c) x = oracle::uniform(-20, 20);
      c.back() = 1;
      std::vector<Padic> pc;
      for (long x : c) pc.push_back(Padic::from_int(x, ctx));
      const IntPolySystem F({Polynomial::univariate(pc)});
      for (long a = 0; a < p; ++a) {
        if (eval_mod(c, a, p) != 0) continue;
        std::vector<long> dc;
        for (std::size_t i = 1; i < c.size(); ++i) dc.push_back(static_cast<long>(i) * c[i]);
        if (eval_mod(dc, a, p) == 0) continue;
        std::vector<long> roots;
        for (long x = a; x < m3; x += p) {
          if (eval_mod(c, x, m3) == 0) roots.push_back(x);
        }
        ASSERT_EQ(roots.size(), 1U);
        const long seed[1] = {a};
        EXPECT_EQ(lift(F, seed)[0].residue(3), roots[0]);
      }
    }
  }
}

TEST(JacobianDet, SystemG) {
  for (int k : {2, 3, 4}) {
    for (long p : {5L, 7L, 11L}) {
      const CouplingParams cp = CouplingParams::make(PrimeContext(p, 8), k, p, p);
      const long seed[3] = {1, 1, 1};
      EXPECT_EQ(jacobian_det_mod_p(translation_invariant_system(cp), seed), oracle::powmod(2, 3 * k, p));
    }
  }
  const PrimeContext ctx(5, 8);
  const long one[1] = {1};
  EXPECT_EQ(jacobian_det_mod_p(IntPolySystem({univariate(ctx, {-1, 1})}), one), 1);
}

TEST(LinearSolve, Examples) {
  const PrimeContext ctx(5, 8);
  auto P = [&](long x) { return Padic::from_int(x, ctx); };
  const PadicMatrix I{{P(1), P(0)}, {P(0), P(1)}};
  const std::vector<Padic> rhs{P(7), Padic::from_rational(1, 3, ctx)};
  const auto x = linear_solve_Zp(I, rhs);
  EXPECT_TRUE(x[0] == rhs[0] && x[1] == rhs[1]);
  const PadicMatrix M{{P(2), P(1)}, {P(1), P(1)}};
  const std::vector<Padic> b{P(1), P(0)};
  const auto y = linear_solve_Zp(M, b);
  EXPECT_TRUE(y[0] == P(1));
  EXPECT_TRUE(y[1] == P(-1));
  const PadicMatrix S{{P(5), P(10)}, {P(15), P(25)}};
  EXPECT_THROW(linear_solve_Zp(S, b), SingularJacobianError);
}

TEST(LinearSolve, RandomUnitDeterminant) {
  const PrimeContext ctx(7, 10);
  for (int t = 0; t < 100; ++t) {
    PadicMatrix M(3, std::vector<Padic>(3, Padic::zero(ctx)));
    std::vector<std::vector<long>> raw(3, std::vector<long>(3));
    for (auto& row : raw)
      for (auto& x : row) x = oracle::uniform(-50, 50);
    const long det = raw[0][0] * (raw[1][1] * raw[2][2] - raw[1][2] * raw[2][1]) -
                     raw[0][1] * (raw[1][0] * raw[2][2] - raw[1][2] * raw[2][0]) +
                     raw[0][2] * (raw[1][0] * raw[2][1] - raw[1][1] * raw[2][0]);
    if (det % 7 == 0) continue;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) M[i][j] = Padic::from_int(raw[i][j], ctx);
    std::vector<Padic> rhs;
    for (int i = 0; i < 3; ++i) rhs.push_back(Padic::from_int(oracle::uniform(-100, 100), ctx));
    const auto x = linear_solve_Zp(M, rhs);
    for (int i = 0; i < 3; ++i) {
      const Padic lhs = M[i][0] * x[0] + M[i][1] * x[1] + M[i][2] * x[2];
      EXPECT_TRUE(eq_mod(lhs, rhs[i], 10));
    }
  }
}

TEST(Polynomial, DerivativeAndArithmetic) {
  const PrimeContext ctx(5, 8);
  const Polynomial x = Polynomial::variable(1, 0, ctx);
  const Polynomial f = x.pow(3) - Polynomial::constant(1, Padic::from_int(2, ctx)) * x;
  const Polynomial df = f.derivative(0);
  const Padic at[1] = {Padic::from_int(4, ctx)};
  EXPECT_TRUE(f.evaluate(at) == Padic::from_int(56, ctx));
  EXPECT_TRUE(df.evaluate(at) == Padic::from_int(46, ctx));
}
