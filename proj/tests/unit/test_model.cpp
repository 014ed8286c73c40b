#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pivm/analysis.hpp"
#include "pivm/model.hpp"
#include "pivm/solver.hpp"

using namespace pivm;

namespace {

CouplingParams params(long p, int k, int N = 10) { return CouplingParams::make(PrimeContext(p, N), k, p, p); }

Padic random_Ep(const PrimeContext& ctx) {
  return Padic::one(ctx) + Padic::from_int(ctx.prime() * oracle::uniform(1, 100000), ctx);
}

UTriple random_Ep_triple(const PrimeContext& ctx) { return UTriple{random_Ep(ctx), random_Ep(ctx), random_Ep(ctx)}; }

// h_{s(x)s(y)}^{s(x)s(y)} over the last generation, straight from the definition.
Padic h_product(const Configuration& sigma, const HField& h, const TreeIndex& t) {
  Padic w = Padic::one(h.front().pp.context());
  const auto [first, last] = t.generation(t.depth());
  for (std::size_t id = first; id < last; ++id) {
    const Edge e = t.edge(id);
    const int sx = sigma.spin(e.parent);
    const int sy = sigma.spin(e.child);
    const HQuadruple& q = h[id];
    const Padic& c = sx > 0 ? (sy > 0 ? q.pp : q.pm) : (sy > 0 ? q.mp : q.mm);
    w *= sx * sy > 0 ? c : c.inverse();
  }
  return w;
}

Padic sum_values(const MeasureTable& m) {
  Padic s = Padic::zero(m.Z.context());
  for (const auto& v : m.values) s += v;
  return s;
}

HField random_h_field(const TreeIndex& t, const PrimeContext& ctx) {
  HField h;
  for (std::size_t i = 0; i < t.edge_count(); ++i) h.push_back({random_Ep(ctx), random_Ep(ctx), random_Ep(ctx), random_Ep(ctx)});
  return h;
}

// Leaf data in E_p^3, filled inward by the recurrence.
UField recurrence_field(const TreeIndex& t, const CouplingParams& cp) {
  UField u(t.edge_count(), UTriple{Padic::one(cp.ctx), Padic::one(cp.ctx), Padic::one(cp.ctx)});
  const auto [first, last] = t.generation(t.depth());
  for (std::size_t id = first; id < last; ++id) u[id] = random_Ep_triple(cp.ctx);
  for (int m = t.depth() - 1; m >= 1; --m) recurrence_step(u, t, m, cp);
  return u;
}

HField gauge(const UField& u, const CouplingParams& cp) {
  HField h;
  for (const auto& x : u) h.push_back(h_from_u(x, random_Ep(cp.ctx), cp));
  return h;
}

}  // namespace

TEST(CouplingParams, Validation) {
  const PrimeContext ctx(5, 8);
  EXPECT_THROW(CouplingParams::make(ctx, 2, 1, 5), PreconditionError);
  EXPECT_THROW(CouplingParams::make(ctx, 2, 5, 0), PreconditionError);
  EXPECT_THROW(CouplingParams::make(ctx, 2, 5, mpq_class(1, 5)), PreconditionError);
  EXPECT_THROW(CouplingParams::make(ctx, 1, 5, 5), PreconditionError);
  const CouplingParams cp = CouplingParams::make(ctx, 2, 0, 25);
  EXPECT_TRUE(cp.a == Padic::one(ctx));
  EXPECT_TRUE(in_Ep(cp.b));
  EXPECT_FALSE(cp.b == Padic::one(ctx));
}

TEST(Hamiltonian, AllPlus) {
  const CouplingParams cp = params(5, 2);
  const TreeIndex t = TreeIndex::build(2, 2);
  const Configuration plus = Configuration::all_plus(t);
  const Padic want = Padic::from_int(6, cp.ctx) * cp.J + Padic::from_int(4, cp.ctx) * cp.J1;
  EXPECT_TRUE(hamiltonian(plus, t, cp) == want);
  EXPECT_LE(hamiltonian(plus, t, cp).norm_bound(), Norm::of_valuation(5, 1));
}

TEST(Hamiltonian, FlipOneLeaf) {
  const CouplingParams cp = params(5, 2);
  const TreeIndex t = TreeIndex::build(2, 2);
  Configuration s = Configuration::all_plus(t);
  const Padic before = hamiltonian(s, t, cp);
  s.set(t.vertex_count() - 1, -1);
  const Padic diff = hamiltonian(s, t, cp) - before;
  EXPECT_TRUE(diff == -(Padic::from_int(2, cp.ctx) * (cp.J + cp.J1)));
}

TEST(Hamiltonian, BoltzmannIsExpOfH) {
  const CouplingParams cp = CouplingParams::make(PrimeContext(7, 10), 3, mpq_class(7, 2), mpq_class(-14, 5));
  const TreeIndex t = TreeIndex::build(3, 2);
  for (int i = 0; i < 100; ++i) {
    const Configuration s{static_cast<std::uint64_t>(oracle::uniform(0, (1L << t.vertex_count()) - 1)), t.vertex_count()};
    EXPECT_TRUE(eq_mod(boltzmann_factor(s, t, cp), exp_p(hamiltonian(s, t, cp)), 10));
  }
}

TEST(Configuration, BitsRoundTrip) {
  const Configuration s{0b1011, 7};
  EXPECT_EQ(s.to_bits(), "0010111");
  EXPECT_EQ(Configuration::from_bits(s.to_bits()).minus_mask, s.minus_mask);
}

TEST(MeasureTable, WeightsMatchDefinition) {
  const CouplingParams cp = params(5, 2);
  const TreeIndex t = TreeIndex::build(2, 2);
  const HField h = random_h_field(t, cp.ctx);
  const MeasureTable m = measure_table_from_h(h, t, cp, {1, true});
  ASSERT_EQ(m.values.size(), 128U);
  EXPECT_TRUE(eq_mod(sum_values(m), Padic::one(cp.ctx), 9));
  for (std::uint64_t mask = 0; mask < 128; ++mask) {
    const Configuration s{mask, t.vertex_count()};
    EXPECT_TRUE(m.values[mask] * m.Z == boltzmann_factor(s, t, cp) * h_product(s, h, t));
  }
}

TEST(MeasureTable, UnitFieldGivesBoltzmannWeights) {
  const CouplingParams cp = params(5, 2);
  const TreeIndex t = TreeIndex::build(2, 2);
  const HQuadruple one{Padic::one(cp.ctx), Padic::one(cp.ctx), Padic::one(cp.ctx), Padic::one(cp.ctx)};
  const MeasureTable m = measure_table_from_h(constant_field(t, one), t, cp, {1, true});
  for (std::uint64_t mask = 0; mask < m.values.size(); ++mask) {
    const Configuration s{mask, t.vertex_count()};
    EXPECT_TRUE(m.values[mask] * m.Z == exp_p(hamiltonian(s, t, cp)));
  }
}

TEST(MeasureTable, SpinFlipSymmetry) {
  const CouplingParams cp = params(5, 2);
  const TreeIndex t = TreeIndex::build(2, 1);
  const Padic x = random_Ep(cp.ctx);
  const Padic y = random_Ep(cp.ctx);
  const MeasureTable m = measure_table_from_h(constant_field(t, HQuadruple{x, y, y, x}), t, cp, {1, true});
  const std::uint64_t full = (std::uint64_t{1} << t.vertex_count()) - 1;
  for (std::uint64_t mask = 0; mask <= full; ++mask) EXPECT_TRUE(m.values[mask] == m.values[full ^ mask]);
}

TEST(MeasureTable, AllMinusLeavesWeight) {
  const CouplingParams cp = params(5, 2);
  const TreeIndex t = TreeIndex::build(2, 2);
  const UTriple u = random_Ep_triple(cp.ctx);
  const MeasureTable m = measure_table_from_u(constant_field(t, u), t, cp, {1, true});
  Configuration s = Configuration::all_plus(t);
  for (std::size_t v = 1; v < t.vertex_count(); ++v) s.set(v, -1);
  EXPECT_TRUE(m.values[s.minus_mask] * m.Z == boltzmann_factor(s, t, cp) * (u.u2 / u.u1).pow(4));
  EXPECT_TRUE(m.values[0] * m.Z == boltzmann_factor(Configuration::all_plus(t), t, cp));
}

TEST(MeasureTable, GaugeIndependence) {
  const CouplingParams cp = params(7, 2);
  for (int n : {2, 3}) {
    const TreeIndex t = TreeIndex::build(2, n);
    UField u;
    for (std::size_t i = 0; i < t.edge_count(); ++i) u.push_back(random_Ep_triple(cp.ctx));
    const MeasureTable mu = measure_table_from_u(u, t, cp, {1, true});
    for (int g = 0; g < 3; ++g) {
      const MeasureTable mh = measure_table_from_h(gauge(u, cp), t, cp, {1, true});
      for (std::size_t i = 0; i < mu.values.size(); ++i) ASSERT_TRUE(mh.values[i] == mu.values[i]);
    }
  }
}

TEST(MeasureTable, ThreadsDoNotChangeResults) {
  const CouplingParams cp = params(5, 2);
  const TreeIndex t = TreeIndex::build(2, 3);
  const HField h = random_h_field(t, cp.ctx);
  const MeasureTable a = measure_table_from_h(h, t, cp, {1, false});
  const MeasureTable b = measure_table_from_h(h, t, cp, {3, false});
  EXPECT_EQ(a.Z.to_string(), b.Z.to_string());
  EXPECT_EQ(a.values.size(), b.values.size());
}

TEST(MeasureTable, JsonRoundTrip) {
  const CouplingParams cp = params(5, 2, 6);
  const TreeIndex t = TreeIndex::build(2, 2);
  const MeasureTable m = measure_table_from_h(random_h_field(t, cp.ctx), t, cp, {1, true});
  const auto j = m.to_json();
  EXPECT_EQ(j.at("schema"), MeasureTable::kSchema);
  EXPECT_EQ(j.at("entries").size(), 128U);
  const MeasureTable back = MeasureTable::from_json(j, cp.ctx);
  EXPECT_EQ(back.to_json(), j);
}

TEST(UH, ReductionExamples) {
  const CouplingParams cp = params(5, 2);
  const Padic one = Padic::one(cp.ctx);
  const UTriple u = u_from_h({one, one, one, one}, cp);
  EXPECT_TRUE(u.u1 == cp.a2 && u.u2 == cp.a2 && u.u3 == cp.a2);
  for (int i = 0; i < 100; ++i) {
    const UTriple v = random_Ep_triple(cp.ctx);
    const UTriple w = u_from_h(h_from_u(v, random_Ep(cp.ctx), cp), cp);
    EXPECT_TRUE(w.u1 == v.u1 && w.u2 == v.u2 && w.u3 == v.u3);
  }
  EXPECT_THROW(h_from_u(u, Padic::zero(cp.ctx), cp), PreconditionError);
}

TEST(Recurrence, Examples) {
  const CouplingParams cp = params(5, 2);
  const Padic one = Padic::one(cp.ctx);
  const UTriple ones{one, one, one};
  const UTriple children[2] = {ones, ones};
  const UTriple r = recurrence_edge(children, cp);
  EXPECT_TRUE(r.u1 == cp.a2 && r.u2 == cp.a2 && r.u3 == cp.a2);
  const FixedPointCertificate c = fix_in_Ep(cp);
  const UTriple f = ti_map(c.value, cp);
  EXPECT_TRUE(f.u1 == c.value.u1 && f.u2 == c.value.u2 && f.u3 == c.value.u3);
}

TEST(Compatibility, GibbsSolutionPasses) {
  const CouplingParams cp = params(5, 2, 8);
  const TreeIndex t = TreeIndex::build(2, 2);
  const UTriple u = fix_in_Ep(cp).value;
  const CompatibilityReport r = compatibility_check(constant_field(t, h_from_u(u, Padic::one(cp.ctx), cp)), t, cp);
  EXPECT_TRUE(r.passes());
  EXPECT_LE(r.max_residual_norm, Norm::of_valuation(5, 6));
  EXPECT_EQ(r.configurations, 128U);
}

TEST(Compatibility, PerturbationFails) {
  const CouplingParams cp = params(5, 2, 8);
  const TreeIndex t = TreeIndex::build(2, 2);
  const UTriple u = fix_in_Ep(cp).value;
  HField h = constant_field(t, h_from_u(u, Padic::one(cp.ctx), cp));
  h[0].pm *= Padic::from_int(6, cp.ctx);
  const CompatibilityReport r = compatibility_check(h, t, cp);
  EXPECT_FALSE(r.passes());
  EXPECT_LE(r.min_residual_valuation, 2);
}

TEST(Compatibility, UnitFieldFails) {
  const CouplingParams cp = params(5, 2, 8);
  const TreeIndex t = TreeIndex::build(2, 2);
  const Padic one = Padic::one(cp.ctx);
  EXPECT_FALSE(compatibility_check(constant_field(t, HQuadruple{one, one, one, one}), t, cp).passes());
}

TEST(Compatibility, EquivalentToRecurrence) {
  for (auto [k, n] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}}) {
    const CouplingParams cp = params(5, k, 8);
    const TreeIndex t = TreeIndex::build(k, n);
    for (int trial = 0; trial < 3; ++trial) {
      const UField good = recurrence_field(t, cp);
      EXPECT_TRUE(compatibility_check(gauge(good, cp), t, cp).passes()) << "k=" << k << " n=" << n;
      UField bad = good;
      bad[t.generation(n - 1).first].u1 *= Padic::from_int(6, cp.ctx);
      EXPECT_FALSE(compatibility_check(gauge(bad, cp), t, cp).passes()) << "k=" << k << " n=" << n;
    }
  }
}

TEST(Compatibility, DepthOneRejected) {
  const CouplingParams cp = params(5, 2, 8);
  const TreeIndex t = TreeIndex::build(2, 1);
  const Padic one = Padic::one(cp.ctx);
  EXPECT_THROW(compatibility_check(constant_field(t, HQuadruple{one, one, one, one}), t, cp), PreconditionError);
}

TEST(ParseCoupling, Grammar) {
  EXPECT_EQ(parse_coupling("5", 5), mpq_class(5));
  EXPECT_EQ(parse_coupling("10/3", 5), mpq_class(10, 3));
  EXPECT_EQ(parse_coupling("p^2*3", 5), mpq_class(75));
  EXPECT_EQ(parse_coupling("5^1", 5), mpq_class(5));
  EXPECT_EQ(parse_coupling("-25/7", 5), mpq_class(-25, 7));
  EXPECT_THROW(parse_coupling("p^2*5", 5), PreconditionError);
  EXPECT_THROW(parse_coupling("7^1", 5), PreconditionError);
  EXPECT_THROW(parse_coupling("abc", 5), PreconditionError);
}
