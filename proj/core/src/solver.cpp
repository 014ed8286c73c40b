#include "pivm/solver.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "pivm/analysis.hpp"

namespace pivm {

namespace {

constexpr const char* kModule = "gibbs-solver";
constexpr int kGuards[] = {8, 16, 32, 64};

// Scalar fixed point found at an internal precision.
struct Solved {
  Padic value;
  long long residual_valuation;
  std::optional<long> hensel_seed;
  std::optional<Norm> factor;
  std::vector<long long> steps;
  std::string method;
};

long long residual_valuation(const Padic& r) { return r.valuation_lower_bound(); }

Norm bound_norm(long p, long long v) {
  return v >= Padic::kInfinitePrecision ? Norm::zero_norm(p) : Norm::of_valuation(p, v);
}

long long iteration_cap(int precision, long long contraction_valuation) {
  const long long v = std::max<long long>(1, contraction_valuation);
  return static_cast<long long>(precision) * ((1 + v - 1) / v) + 2;
}

// Runs solve at N + guard for growing guards until every residual reaches
// p^-N, then cuts the results back to the caller's context.
std::vector<FixedPointCertificate> with_guard(
    const CouplingParams& cp, Branch branch,
    const std::function<std::vector<Solved>(const CouplingParams&)>& solve) {
  const int N = cp.ctx.precision();
  long long best = 0;
  for (int guard : kGuards) {
    const CouplingParams inner = cp.with_precision(N + guard);
    const auto solved = solve(inner);
    long long worst = Padic::kInfinitePrecision;
    for (const auto& s : solved) worst = std::min(worst, s.residual_valuation);
    best = std::max(best, std::min<long long>(worst, N + guard));
    if (worst < N) continue;
    std::vector<FixedPointCertificate> out;
    for (const auto& s : solved) {
      const Padic u = s.value.truncated(N).in_context(cp.ctx);
      FixedPointCertificate c{.branch = branch, .value = UTriple{u, u, u}};
      c.residual_norm = bound_norm(cp.prime(), s.residual_valuation);
      c.seed_residue = u.unit_residue();
      c.hensel_seed = s.hensel_seed;
      c.contraction_factor = s.factor;
      c.step_valuations = s.steps;
      c.method = s.method;
      out.push_back(std::move(c));
    }
    return out;
  }
  throw PrecisionError(kModule, "fixed-point residual only reached p^-" + std::to_string(best) +
                                    " with 64 guard digits",
                       N + 128);
}

// Iterates x <- map(x) until two successive iterates agree to the precision
// the map delivers. Iterates are padded back to full precision each step.
Padic contract(const std::function<Padic(const Padic&)>& map, Padic x, long long cap,
               std::vector<long long>& steps) {
  for (long long i = 0; i < cap; ++i) {
    const Padic next = map(x);
    const Padic d = next - x;
    steps.push_back(d.valuation_lower_bound());
    if (d.is_zero()) return next;
    x = next.padded();
  }
  throw ConsistencyError(kModule, "contraction did not converge within " + std::to_string(cap) + " steps");
}

Padic power_k(const Padic& x, int k) { return x.pow(k); }

}  // namespace

std::string to_string(Branch b) {
  switch (b) {
    case Branch::kEp: return "Ep";
    case Branch::kMinusEp: return "MinusEp";
    case Branch::kTwoPeriodic: return "TwoPeriodic";
  }
  return "?";
}

std::string to_string(MinusEpRegime r) {
  switch (r) {
    case MinusEpRegime::kNoRoots: return "no-roots";
    case MinusEpRegime::kHenselCensus: return "hensel-census";
    case MinusEpRegime::kContractionOnly: return "contraction-only";
    case MinusEpRegime::kUnsupported: return "unsupported";
  }
  return "?";
}

std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::kU1EqU2: return "u1=u2";
    case Constraint::kU1EqU3: return "u1=u3";
    case Constraint::kU2EqU3: return "u2=u3";
  }
  return "?";
}

nlohmann::json FixedPointCertificate::to_json() const {
  nlohmann::json j;
  j["branch"] = to_string(branch);
  j["seed_residue"] = seed_residue;
  if (hensel_seed) j["hensel_seed"] = *hensel_seed;
  j["value"] = value.to_json();
  if (partner) j["partner"] = partner->to_json();
  j["residual_norm"] = residual_norm.to_string();
  j["contraction_factor"] = contraction_factor ? nlohmann::json(contraction_factor->to_string()) : nlohmann::json();
  j["method"] = method;
  if (!step_valuations.empty()) j["step_valuations"] = step_valuations;
  return j;
}

// ---------------------------------------------------------------------------
// Maps

Padic ising_potts_map(const Padic& u, const CouplingParams& cp) {
  const Padic one = Padic::one(cp.ctx);
  const Padic den = u + cp.b2;
  if (den.is_exact_zero()) throw PreconditionError(kModule, "u + b^2 vanishes");
  if (den.is_zero()) throw PrecisionError(kModule, "u + b^2 indistinguishable from zero");
  return cp.a2 * power_k((cp.b2 * u + one) / den, cp.k);
}

Padic auxiliary_map(const Padic& x, const CouplingParams& cp) {
  const Padic xk = power_k(x, cp.k);
  const Padic den = cp.a2 * xk + cp.b2;
  if (den.is_zero()) throw PrecisionError(kModule, "a^2 x^k + b^2 indistinguishable from zero");
  return (cp.a2 * cp.b2 * xk + Padic::one(cp.ctx)) / den;
}

Polynomial fixed_point_polynomial(const CouplingParams& cp) {
  std::vector<Padic> c(static_cast<std::size_t>(cp.k) + 2, Padic::zero(cp.ctx));
  c[0] = -Padic::one(cp.ctx);
  c[1] = cp.b2;
  c[static_cast<std::size_t>(cp.k)] = -(cp.a2 * cp.b2);
  c[static_cast<std::size_t>(cp.k) + 1] = cp.a2;
  return Polynomial::univariate(c);
}

IntPolySystem translation_invariant_system(const CouplingParams& cp) {
  const auto k = static_cast<unsigned>(cp.k);
  const Polynomial u1 = Polynomial::variable(3, 0, cp.ctx);
  const Polynomial u2 = Polynomial::variable(3, 1, cp.ctx);
  const Polynomial u3 = Polynomial::variable(3, 2, cp.ctx);
  const Polynomial one = Polynomial::constant(3, Padic::one(cp.ctx));
  const Polynomial b2 = Polynomial::constant(3, cp.b2);
  const Polynomial a2 = Polynomial::constant(3, cp.a2);
  const Polynomial g1 = u1 * (u3 + b2).pow(k) - a2 * (b2 * u3 + one).pow(k);
  const Polynomial g2 = u1.pow(k) * u2 * (u3 + b2).pow(k) - a2 * (b2 * u2 + one).pow(k) * u3.pow(k);
  const Polynomial g3 = (u2 + b2).pow(k) * u3.pow(k + 1) - a2 * u1.pow(k) * (b2 * u3 + one).pow(k);
  return IntPolySystem({g1, g2, g3});
}

Norm ti_residual(const UTriple& u, const CouplingParams& cp) {
  const UTriple f = ti_map(u, cp);
  const long long v = std::min({residual_valuation(f.u1 - u.u1), residual_valuation(f.u2 - u.u2),
                                residual_valuation(f.u3 - u.u3)});
  return bound_norm(cp.prime(), v);
}

// ---------------------------------------------------------------------------
// Fixed points of f

FixedPointCertificate fix_in_Ep(const CouplingParams& cp) {
  auto certs = with_guard(cp, Branch::kEp, [](const CouplingParams& in) {
    const Padic one = Padic::one(in.ctx);
    const Padic b4m1 = in.b2 * in.b2 - one;
    const long long v = b4m1.valuation();
    std::vector<long long> steps;
    const Padic x = contract([&](const Padic& y) { return auxiliary_map(y, in); }, one,
                             iteration_cap(in.ctx.precision(), v), steps);
    const Padic u = in.a2 * power_k(x, in.k);
    const long long res = residual_valuation(ising_potts_map(u, in) - u);
    return std::vector<Solved>{
        Solved{u, res, std::nullopt, b4m1.norm(), std::move(steps), "contraction of g from 1"}};
  });
  return std::move(certs.front());
}

MinusEpRegime minus_Ep_regime(const CouplingParams& cp) {
  const long p = cp.prime();
  const long k = cp.k;
  if (!minus_one_kth_root_exists_Qp(k, p)) return MinusEpRegime::kNoRoots;
  if (k % p != 0) return MinusEpRegime::kHenselCensus;
  const Padic one = Padic::one(cp.ctx);
  const long long vk = valuation_of(mpz_class(k), p);
  const long long vb = (cp.b - one).valuation();
  const Padic am1 = cp.a - one;
  const long long va = am1.is_zero() ? am1.valuation_lower_bound() : am1.valuation();
  if (k % 2 == 1 && std::min(vk, va) > vb) return MinusEpRegime::kContractionOnly;
  return MinusEpRegime::kUnsupported;
}

MinusEpResult fix_in_minus_Ep(const CouplingParams& cp) {
  MinusEpResult result{minus_Ep_regime(cp), {}, {}};
  const long p = cp.prime();
  switch (result.regime) {
    case MinusEpRegime::kNoRoots:
      result.reason = "(p-1)/gcd(k,p-1) is odd: -1 has no k-th root mod p";
      return result;
    case MinusEpRegime::kUnsupported:
      result.reason = "p divides k with (p-1)/gcd(k,p-1) even and no contraction premise; not resolved";
      return result;
    case MinusEpRegime::kHenselCensus: {
      const auto alphas = kth_roots_of_minus_one(cp.k, p);
      result.certificates = with_guard(cp, Branch::kMinusEp, [&](const CouplingParams& in) {
        const IntPolySystem F({fixed_point_polynomial(in)});
        std::vector<Solved> out;
        for (long alpha : alphas) {
          const long seed[1] = {alpha};
          const Padic x = lift(F, seed).front();
          const Padic u = in.a2 * power_k(x, in.k);
          const long long res = residual_valuation(ising_potts_map(u, in) - u);
          out.push_back(Solved{u, res, alpha, std::nullopt, {}, "hensel lift of g at alpha = " + std::to_string(alpha)});
        }
        return out;
      });
      break;
    }
    case MinusEpRegime::kContractionOnly: {
      result.certificates = with_guard(cp, Branch::kMinusEp, [](const CouplingParams& in) {
        const Padic one = Padic::one(in.ctx);
        const long long vk = valuation_of(mpz_class(in.k), in.prime());
        const long long vb = (in.b - one).valuation();
        std::vector<long long> steps;
        const Padic u = contract([&](const Padic& y) { return ising_potts_map(y, in); }, -one,
                                 iteration_cap(in.ctx.precision(), vk - vb), steps);
        const long long res = residual_valuation(ising_potts_map(u, in) - u);
        return std::vector<Solved>{Solved{u, res, std::nullopt, Norm::of_valuation(in.prime(), vk - vb),
                                          std::move(steps), "contraction of f on B(-1, |b-1|)"}};
      });
      break;
    }
  }
  // Distinct fixed points must stay distinct at N - 2 digits.
  const long long m = cp.ctx.precision() - 2;
  for (std::size_t i = 0; i < result.certificates.size(); ++i) {
    for (std::size_t j = i + 1; j < result.certificates.size(); ++j) {
      if (eq_mod(result.certificates[i].scalar(), result.certificates[j].scalar(), m)) {
        throw ConsistencyError(kModule, "two -E_p fixed points coincide mod p^" + std::to_string(m));
      }
    }
  }
  return result;
}

UTriple hensel_translation_invariant(const CouplingParams& cp, LiftSchedule schedule) {
  const IntPolySystem G = translation_invariant_system(cp);
  const long seed[3] = {1, 1, 1};
  const auto r = lift(G, seed, schedule);
  return UTriple{r[0], r[1], r[2]};
}

std::vector<FixedPointCertificate> solve_translation_invariant(const CouplingParams& cp) {
  const int N = cp.ctx.precision();
  FixedPointCertificate ep = fix_in_Ep(cp);
  const UTriple g = hensel_translation_invariant(cp.with_precision(N + kGuards[0])).in_context(cp.ctx);
  for (const Padic* c : {&g.u1, &g.u2, &g.u3}) {
    if (!eq_mod(*c, ep.scalar(), N)) {
      throw ConsistencyError(kModule, "Hensel solution of G and the contraction fixed point disagree mod p^" +
                                          std::to_string(N));
    }
  }
  ep.method += "; agrees with hensel lift of G at (1,1,1)";
  ep.residual_norm = std::max(ep.residual_norm, ti_residual(ep.value, cp.with_precision(N + kGuards[0])));

  std::vector<FixedPointCertificate> out{std::move(ep)};
  for (auto& c : fix_in_minus_Ep(cp).certificates) out.push_back(std::move(c));
  for (const auto& c : out) {
    if (c.value.u2.valuation() != 0 || c.value.u3.valuation() != 0) {
      throw ConsistencyError(kModule, "solution violates |u2| = |u3| = 1");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Period two

Padic periodic_discriminant(const CouplingParams& cp) {
  const Padic one = Padic::one(cp.ctx);
  const Padic four = Padic::from_int(4, cp.ctx);
  const Padic b4 = cp.b2 * cp.b2;
  const Padic b4m1 = b4 - one;
  return cp.a2 * b4m1 * b4m1 - four * b4 * (cp.a2 * cp.b2 + one) * (cp.b2 + cp.a2);
}

TwoPeriodicResult solve_two_periodic(const CouplingParams& cp) {
  if (cp.k != 2) throw PreconditionError(kModule, "two-periodic solutions are constructed for k = 2 only");
  TwoPeriodicResult result{{}, {}, periodic_discriminant(cp)};
  if (cp.prime() % 4 == 3) {
    result.reason = "no-sqrt";
    return result;
  }
  const int N = cp.ctx.precision();
  for (int guard : kGuards) {
    const CouplingParams in = cp.with_precision(N + guard);
    const Padic one = Padic::one(in.ctx);
    const Padic delta = periodic_discriminant(in);
    const auto root = sqrt(delta);
    if (!root) throw ConsistencyError(kModule, "Delta(a,b) has no square root although p = 1 mod 4");
    const Padic lin = in.a * (in.b2 * in.b2 - one);
    const Padic den = Padic::from_int(2, in.ctx) * in.b2 * (in.a2 * in.b2 + one);
    std::vector<FixedPointCertificate> certs;
    long long worst = Padic::kInfinitePrecision;
    for (int sign : {1, -1}) {
      const Padic x = (-lin + (sign > 0 ? *root : -*root)) / den;
      const Padic u = x * x;
      const Padic v = ising_potts_map(u, in);
      const long long res = residual_valuation(ising_potts_map(v, in) - u);
      worst = std::min(worst, res);
      const Padic uu = u.truncated(N).in_context(cp.ctx);
      const Padic vv = v.truncated(N).in_context(cp.ctx);
      FixedPointCertificate c{.branch = Branch::kTwoPeriodic, .value = UTriple{uu, uu, uu}};
      c.partner = UTriple{vv, vv, vv};
      c.residual_norm = bound_norm(cp.prime(), res);
      c.seed_residue = uu.unit_residue();
      c.method = std::string("root x") + (sign > 0 ? "+" : "-") + " of the period-two quadratic, u = x^2";
      certs.push_back(std::move(c));
    }
    if (worst < N) continue;
    result.certificates = std::move(certs);
    return result;
  }
  throw PrecisionError(kModule, "period-two residual did not reach p^-N", N + 128);
}

// ---------------------------------------------------------------------------
// Recursions on the tree

UField backward_recursion(const TreeIndex& t, UField leaf, const CouplingParams& cp) {
  if (leaf.size() != t.edge_count()) throw PreconditionError(kModule, "leaf field is not edge-indexed");
  const auto [first, last] = t.generation(t.depth());
  for (std::size_t id = first; id < last; ++id) {
    for (const Padic* c : {&leaf[id].u1, &leaf[id].u2, &leaf[id].u3}) {
      if (c->is_zero() || c->valuation() != 0) {
        throw PreconditionError(kModule, "leaf values must have norm 1 (edge " + std::to_string(id) + ")");
      }
    }
  }
  for (int m = t.depth() - 1; m >= 1; --m) recurrence_step(leaf, t, m, cp);
  return leaf;
}

UTriple restricted_edge(std::span<const UTriple> children, Constraint c, const CouplingParams& cp) {
  const Padic one = Padic::one(cp.ctx);
  auto mobius = [&](const Padic& t) {
    const Padic den = t + cp.b2;
    if (den.is_zero()) throw PrecisionError(kModule, "t + b^2 indistinguishable from zero");
    return (cp.b2 * t + one) / den;
  };
  Padic p1 = cp.a2;
  Padic p2 = cp.a2;
  for (const UTriple& ch : children) {
    switch (c) {
      case Constraint::kU1EqU2:
        p1 *= mobius(ch.u3);
        p2 *= mobius(ch.u1);
        break;
      case Constraint::kU1EqU3:
        p1 *= mobius(ch.u1);
        p2 *= mobius(ch.u2);
        break;
      case Constraint::kU2EqU3:
        p1 *= mobius(ch.u1);
        break;
    }
  }
  switch (c) {
    case Constraint::kU1EqU2: return UTriple{p1, p1, p2};
    case Constraint::kU1EqU3: return UTriple{p1, p2, p1};
    case Constraint::kU2EqU3: return UTriple{p1, p1, p1};
  }
  return UTriple{p1, p1, p1};
}

UField restricted_backward(const TreeIndex& t, UField leaf, Constraint c, const CouplingParams& cp) {
  if (leaf.size() != t.edge_count()) throw PreconditionError(kModule, "leaf field is not edge-indexed");
  const auto [first, last] = t.generation(t.depth());
  for (std::size_t id = first; id < last; ++id) {
    const UTriple& u = leaf[id];
    const bool holds = c == Constraint::kU1EqU2   ? u.u1 == u.u2
                       : c == Constraint::kU1EqU3 ? u.u1 == u.u3
                                                  : u.u2 == u.u3;
    if (!holds) throw PreconditionError(kModule, "leaf data violates " + to_string(c) + " at edge " + std::to_string(id));
    if (!in_Ep(u.u1) || !in_Ep(u.u2) || !in_Ep(u.u3)) {
      throw PreconditionError(kModule, "leaf data must lie in E_p (edge " + std::to_string(id) + ")");
    }
  }
  std::vector<UTriple> children;
  for (int m = t.depth() - 1; m >= 1; --m) {
    const auto [f, l] = t.generation(m);
    for (std::size_t id = f; id < l; ++id) {
      children.clear();
      for (std::size_t e : t.child_edges(id + 1)) children.push_back(leaf[e]);
      leaf[id] = restricted_edge(children, c, cp);
    }
  }
  return leaf;
}

std::vector<GenerationDistance> contraction_profile(const TreeIndex& t, const UField& leaf_u,
                                                    const UField& leaf_v, Constraint c,
                                                    const CouplingParams& cp) {
  const UField u = restricted_backward(t, leaf_u, c, cp);
  const UField v = restricted_backward(t, leaf_v, c, cp);
  auto distance = [&](int m) {
    const auto [f, l] = t.generation(m);
    long long d = Padic::kInfinitePrecision;
    for (std::size_t id = f; id < l; ++id) {
      d = std::min({d, (u[id].u1 - v[id].u1).valuation_lower_bound(), (u[id].u2 - v[id].u2).valuation_lower_bound(),
                    (u[id].u3 - v[id].u3).valuation_lower_bound()});
    }
    return d;
  };
  std::vector<GenerationDistance> out;
  for (int m = t.depth() - 1; m >= 1; --m) {
    const long long in = distance(m + 1);
    const long long outv = distance(m);
    const bool ok = in >= Padic::kInfinitePrecision || outv >= in + 1;
    out.push_back(GenerationDistance{m, in, outv, ok});
  }
  return out;
}

}  // namespace pivm
