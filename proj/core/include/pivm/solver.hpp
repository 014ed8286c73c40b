#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pivm/hensel.hpp"
#include "pivm/model.hpp"

namespace pivm {

enum class Branch { kEp, kMinusEp, kTwoPeriodic };
std::string to_string(Branch b);

struct FixedPointCertificate {
  Branch branch = Branch::kEp;
  UTriple value;
  /// f(u) for two-periodic solutions.
  std::optional<UTriple> partner{};
  /// Upper bound on the residual of the equation the value claims to solve.
  Norm residual_norm{};
  /// Value mod p.
  long seed_residue = 0;
  /// Residue alpha with alpha^k = -1 (mod p) that seeded a Hensel lift of g.
  std::optional<long> hensel_seed{};
  /// Certified contraction factor; absent for Hensel-only solutions.
  std::optional<Norm> contraction_factor{};
  /// Guaranteed valuations of successive iterate differences.
  std::vector<long long> step_valuations{};
  std::string method{};

  const Padic& scalar() const noexcept { return value.u1; }
  nlohmann::json to_json() const;
};

/// f(u) = a^2 ((b^2 u + 1) / (u + b^2))^k.
Padic ising_potts_map(const Padic& u, const CouplingParams& cp);
/// g(x) = (a^2 b^2 x^k + 1) / (a^2 x^k + b^2); fixed points x give u = a^2 x^k.
Padic auxiliary_map(const Padic& x, const CouplingParams& cp);
/// a^2 x^{k+1} - a^2 b^2 x^k + b^2 x - 1.
Polynomial fixed_point_polynomial(const CouplingParams& cp);
/// The system G whose zeros are the translation-invariant solutions.
IntPolySystem translation_invariant_system(const CouplingParams& cp);

/// The unique fixed point of f in E_p, by contraction of g from 1.
FixedPointCertificate fix_in_Ep(const CouplingParams& cp);

enum class MinusEpRegime {
  kNoRoots,          ///< (p-1)/gcd(k,p-1) odd
  kHenselCensus,     ///< gcd(k,p) = 1 and the ratio even
  kContractionOnly,  ///< p | k and max(|k|,|a-1|) < |b-1|
  kUnsupported,      ///< p | k, ratio even, no contraction premise
};
std::string to_string(MinusEpRegime r);
MinusEpRegime minus_Ep_regime(const CouplingParams& cp);

struct MinusEpResult {
  MinusEpRegime regime;
  std::vector<FixedPointCertificate> certificates;
  std::string reason;
};

/// Fixed points of f in -E_p.
MinusEpResult fix_in_minus_Ep(const CouplingParams& cp);

/// The E_p^3 solution, cross-checked against Hensel on G from (1,1,1), then
/// the diagonal (-E_p)^3 solutions.
std::vector<FixedPointCertificate> solve_translation_invariant(const CouplingParams& cp);

/// Solution of G from seed (1,1,1) alone.
UTriple hensel_translation_invariant(const CouplingParams& cp, LiftSchedule schedule = LiftSchedule::kQuadratic);

/// Delta(a, b) = a^2 (b^4 - 1)^2 - 4 b^4 (a^2 b^2 + 1)(b^2 + a^2).
Padic periodic_discriminant(const CouplingParams& cp);

struct TwoPeriodicResult {
  std::vector<FixedPointCertificate> certificates;
  std::string reason;
  Padic discriminant;
};

/// Period-two diagonal solutions for k = 2.
TwoPeriodicResult solve_two_periodic(const CouplingParams& cp);

/// Residual bound of the translation-invariant system at u.
Norm ti_residual(const UTriple& u, const CouplingParams& cp);

/// Fills every generation of an edge field from its last generation.
UField backward_recursion(const TreeIndex& t, UField leaf, const CouplingParams& cp);

enum class Constraint {
  kU1EqU2,  ///< reduces to the (u1, u3) system
  kU1EqU3,  ///< reduces to the (u1, u2) system
  kU2EqU3,  ///< reduces to u1 alone
};
std::string to_string(Constraint c);

/// One step of the reduced recursion that applies under the constraint.
UTriple restricted_edge(std::span<const UTriple> children, Constraint c, const CouplingParams& cp);
UField restricted_backward(const TreeIndex& t, UField leaf, Constraint c, const CouplingParams& cp);

struct GenerationDistance {
  int generation;
  /// Guaranteed valuation of max ||u - v|| on generation + 1 and on generation.
  long long input_valuation;
  long long output_valuation;
  bool within_bound;  ///< output_valuation >= input_valuation + 1
};

/// Per-generation distance between two restricted backward recursions.
std::vector<GenerationDistance> contraction_profile(const TreeIndex& t, const UField& leaf_u,
                                                    const UField& leaf_v, Constraint c,
                                                    const CouplingParams& cp);

}  // namespace pivm
