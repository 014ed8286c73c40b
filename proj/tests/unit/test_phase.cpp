#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pivm/phase.hpp"

using namespace pivm;

namespace {

CouplingParams params(long p, int k, int N = 8) { return CouplingParams::make(PrimeContext(p, N), k, p, p); }

UTriple resolve_at(const FixedPointCertificate& c, const CouplingParams& wide) {
  for (const auto& s : solve_translation_invariant(wide)) {
    if (s.branch == c.branch && eq_mod(s.scalar(), c.scalar(), 3)) return s.value;
  }
  throw std::runtime_error("solution lost at higher precision");
}

}  // namespace

TEST(SphereVolume, MatchesSum) {
  for (int k = 2; k <= 6; ++k)
    for (int n = 0; n <= 12; ++n) EXPECT_EQ(sphere_volume(k, n), oracle::sphere_volume(k, n));
}

TEST(PartitionFunction, ClosedFormMatchesEnumeration) {
  for (auto [p, k, nmax] : {std::tuple{5L, 2, 3}, std::tuple{13L, 3, 2}}) {
    const CouplingParams cp = params(p, k);
    const int N = cp.ctx.precision();
    for (const auto& c : solve_translation_invariant(cp)) {
      for (int n = 1; n <= nmax; ++n) {
        const CouplingParams wide = cp.with_precision(enumeration_precision(c.value, n, cp));
        const UTriple u = resolve_at(c, wide);
        const TreeIndex t = TreeIndex::geometry(k, n);
        const Padic brute = partition_function_from_u(constant_field(t, u), t, wide);
        const Padic closed = partition_closed_form(u, n, wide);
        const long long vz = partition_valuation(u, n, wide).get_si();
        EXPECT_EQ(brute.valuation(), vz);
        EXPECT_TRUE(eq_mod(brute, closed, vz + N - 2)) << "p=" << p << " k=" << k << " n=" << n;
        const Padic product = partition_product_form(u, n, wide);
        EXPECT_TRUE(eq_mod(product * depth_one_partition(u, wide), closed, vz + N - 2));
      }
    }
  }
}

TEST(PartitionFunction, ValuationIsAffineInVolume) {
  const CouplingParams cp = params(5, 2);
  for (const auto& c : solve_translation_invariant(cp)) {
    const MeasureClassification m = classify(c.value, cp);
    for (int n = 1; n <= 30; ++n) {
      EXPECT_EQ(partition_valuation(c.value, n, cp), static_cast<long>(m.z1_valuation) + 2 * sphere_volume(2, n - 1) * static_cast<long>(m.e));
    }
  }
  EXPECT_THROW(partition_closed_form(fix_in_Ep(cp).value, 40, cp), PreconditionError);
}

TEST(Classify, FiveTwo) {
  const CouplingParams cp = params(5, 2);
  int bounded = 0;
  int quasi = 0;
  for (const auto& c : solve_translation_invariant(cp)) {
    const MeasureClassification m = classify(c.value, cp);
    if (c.branch == Branch::kEp) {
      EXPECT_EQ(m.branch, MeasureBranch::kGibbsBounded);
      EXPECT_EQ(m.e, 0);
      EXPECT_EQ(m.z_valuation(5), static_cast<long>(m.z1_valuation));
      ++bounded;
    } else {
      EXPECT_EQ(m.branch, MeasureBranch::kQuasiUnbounded);
      EXPECT_GT(m.e, 0);
      EXPECT_GE(m.z_valuation(2), 4);
      EXPECT_LT(m.z_valuation(2), m.z_valuation(3));
      ++quasi;
    }
  }
  EXPECT_EQ(bounded, 1);
  EXPECT_EQ(quasi, 2);
}

TEST(Classify, NormReciprocity) {
  const CouplingParams cp = params(5, 2);
  for (const auto& c : solve_translation_invariant(cp)) {
    const MeasureClassification m = classify(c.value, cp);
    for (int n = 1; n <= 6; ++n) EXPECT_EQ(m.Z_norm_exponent(n) + m.mu_norm_exponent(n), 0);
    const CouplingParams wide = cp.with_precision(enumeration_precision(c.value, 1, cp));
    const UTriple u = resolve_at(c, wide);
    const TreeIndex t = TreeIndex::geometry(2, 1);
    const MeasureTable table = measure_table_from_u(constant_field(t, u), t, wide);
    ASSERT_TRUE(table.materialized());
    for (const auto& mu : table.values) EXPECT_EQ(mu.norm(), Norm::of_valuation(5, -m.mu_norm_exponent(1).get_si()));
  }
}

TEST(Classify, RequiresUnitU2U3) {
  const CouplingParams cp = params(5, 2);
  const Padic one = Padic::one(cp.ctx);
  EXPECT_THROW(classify(UTriple{one, Padic::from_int(5, cp.ctx), one}, cp), PreconditionError);
}

TEST(Verdict, Grid) {
  EXPECT_EQ(detect_phase_transition(params(5, 2)).verdict, Verdict::kPhaseTransition);
  EXPECT_EQ(detect_phase_transition(params(7, 2)).verdict, Verdict::kNoTransition);
  EXPECT_EQ(detect_phase_transition(params(11, 2)).verdict, Verdict::kNoTransition);
  const PhaseReport r = detect_phase_transition(params(13, 3));
  EXPECT_EQ(r.verdict, Verdict::kPhaseTransition);
  EXPECT_EQ(r.bounded_count(), 1U);
  EXPECT_EQ(r.unbounded_count(), 3U);
  EXPECT_TRUE(r.census_complete);
}

TEST(Verdict, MatchesResidueCriterion) {
  for (long p : {5L, 7L, 11L, 13L, 17L}) {
    for (int k : {2, 3, 4}) {
      const PhaseReport r = detect_phase_transition(params(p, k, 6));
      const bool roots = !oracle::kth_roots_of_minus_one(k, p).empty();
      EXPECT_EQ(r.verdict == Verdict::kPhaseTransition, roots) << "p=" << p << " k=" << k;
      EXPECT_EQ(r.bounded_count(), 1U);
      EXPECT_EQ(r.criterion_trace.at("coprime"), std::gcd(static_cast<long>(k), p) == 1);
    }
  }
}

TEST(Verdict, ContractionAndUnsupported) {
  const PhaseReport c = detect_phase_transition(CouplingParams::make(PrimeContext(3, 8), 9, 9, 3));
  EXPECT_EQ(c.verdict, Verdict::kPhaseTransition);
  EXPECT_EQ(c.criterion_trace.at("minus_Ep_regime"), "contraction-only");
  const PhaseReport u = detect_phase_transition(CouplingParams::make(PrimeContext(5, 8), 5, 25, 5));
  EXPECT_FALSE(u.census_complete);
  EXPECT_EQ(u.verdict, Verdict::kNoTransition);
}

TEST(Verdict, PeriodicKeptApart) {
  const PhaseReport r = detect_phase_transition(params(5, 2));
  EXPECT_EQ(r.solutions.size(), 3U);
  EXPECT_EQ(r.periodic.size(), 2U);
  for (const auto& s : r.periodic) {
    EXPECT_TRUE(s.classification.extension);
    EXPECT_TRUE(s.partner.has_value());
  }
  const auto j = r.to_json(params(5, 2));
  EXPECT_EQ(j.at("verdict"), "PHASE_TRANSITION");
}

TEST(StrongDecay, Example) {
  const CouplingParams cp = params(5, 2);
  const Padic one = Padic::one(cp.ctx);
  const UTriple u{Padic::from_rational(1, 5, cp.ctx), one, one};
  const DecayReport r = strong_decay_check(u, 3, cp);
  ASSERT_EQ(r.rows.size(), 3U);
  EXPECT_EQ(r.rows[2].bound_exponent, -14);
  EXPECT_EQ(r.rows[2].volume, 14);
  EXPECT_EQ(r.rows[2].boundary, 8);
  EXPECT_TRUE(r.monotone);
  for (const auto& row : r.rows) EXPECT_EQ(row.bound_holds, row.exact_exponent < row.bound_exponent);
}

TEST(StrongDecay, Monotone) {
  const CouplingParams cp = params(7, 3);
  const Padic one = Padic::one(cp.ctx);
  const UTriple u{Padic::from_rational(3, 49, cp.ctx), one, one};
  const DecayReport r = strong_decay_check(u, 12, cp);
  for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_LT(r.rows[i].bound_exponent, r.rows[i - 1].bound_exponent);
  EXPECT_TRUE(r.monotone);
}

TEST(StrongDecay, Preconditions) {
  const CouplingParams cp = params(5, 2);
  const Padic one = Padic::one(cp.ctx);
  EXPECT_THROW(strong_decay_check(UTriple{one, one, one}, 3, cp), PreconditionError);
  EXPECT_THROW(strong_decay_check(UTriple{Padic::from_rational(1, 5, cp.ctx), Padic::from_int(5, cp.ctx), one}, 3, cp),
               PreconditionError);
}
