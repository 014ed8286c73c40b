#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "pivm/solver.hpp"

namespace pivm {

/// |V_n| = k (k^n - 1) / (k - 1) as an exact integer.
mpz_class sphere_volume(int k, int n);

/// delta = a (b^2 u3 + 1) / (b u3), the per-vertex growth of Z_n.
Padic growth_factor(const UTriple& u, const CouplingParams& cp);
/// Z_1 = a^k [((u3 + 1)/u3)^k + ((1 + u2)/u1)^k].
Padic depth_one_partition(const UTriple& u, const CouplingParams& cp);

/// Z_n = Z_1 delta^{k |V_{n-1}|}. Digits are only produced while the
/// exponent stays below kMaxDigitExponent; use partition_valuation beyond.
Padic partition_closed_form(const UTriple& u, int n, const CouplingParams& cp);
/// delta^{k |V_{n-1}|} alone, without the depth-one factor.
Padic partition_product_form(const UTriple& u, int n, const CouplingParams& cp);
inline constexpr long long kMaxDigitExponent = 1LL << 20;

/// v(Z_n) in exponent arithmetic.
mpz_class partition_valuation(const UTriple& u, int n, const CouplingParams& cp);

/// Working precision at which a brute-force Z_n keeps N significant digits.
int enumeration_precision(const UTriple& u, int n, const CouplingParams& cp, int slack = 4);

enum class MeasureBranch { kGibbsBounded, kQuasiUnbounded };
std::string to_string(MeasureBranch b);

struct MeasureClassification {
  MeasureBranch branch = MeasureBranch::kGibbsBounded;
  long p = 0;
  int k = 0;
  /// v(b^2 u3 + 1) - v(b u3).
  long long e = 0;
  long long z1_valuation = 0;
  /// Set when the triple is not translation invariant (period-two data).
  bool extension = false;

  /// v(Z_n) = v(Z_1) + k |V_{n-1}| e.
  mpz_class z_valuation(int n) const;
  /// |Z_n| = p^{Z_norm_exponent(n)}.
  mpz_class Z_norm_exponent(int n) const { return -z_valuation(n); }
  /// |mu_n(sigma)| = p^{mu_norm_exponent(n)} for every sigma.
  mpz_class mu_norm_exponent(int n) const { return z_valuation(n); }
  /// k |V_{n-1}|.
  mpz_class growth_coefficient(int n) const;

  nlohmann::json to_json(int n_max = 5) const;
};

/// Requires |u2| = |u3| = 1.
MeasureClassification classify(const UTriple& u, const CouplingParams& cp);

enum class Verdict { kPhaseTransition, kNoTransition };
std::string to_string(Verdict v);

struct ClassifiedSolution {
  FixedPointCertificate certificate;
  MeasureClassification classification;
  /// Classification of the partner triple for period-two solutions.
  std::optional<MeasureClassification> partner;
};

struct PhaseReport {
  Verdict verdict = Verdict::kNoTransition;
  std::vector<ClassifiedSolution> solutions;
  /// Period-two solutions (k = 2 only), reported apart from the verdict.
  std::vector<ClassifiedSolution> periodic;
  nlohmann::json criterion_trace;
  /// False when the -E_p regime is unsupported, so the verdict covers E_p only.
  bool census_complete = true;

  std::size_t bounded_count() const;
  std::size_t unbounded_count() const;
  nlohmann::json to_json(const CouplingParams& cp) const;
};

PhaseReport detect_phase_transition(const CouplingParams& cp);

struct DecayRow {
  int n;
  mpz_class boundary;  ///< |W_n|
  mpz_class volume;    ///< |V_n|
  /// |mu_n(all minus)| = p^{exact_exponent}.
  mpz_class exact_exponent;
  /// |u1|^{-|V_n|} = p^{bound_exponent}.
  mpz_class bound_exponent;
  bool bound_holds;  ///< exact_exponent < bound_exponent
};

struct DecayReport {
  std::vector<DecayRow> rows;
  /// bound_exponent strictly decreasing in n.
  bool monotone = true;
  bool all_bounds_hold() const;
  nlohmann::json to_json() const;
};

/// Requires |u1| > 1 and |u2| = |u3| = 1.
DecayReport strong_decay_check(const UTriple& u, int n_max, const CouplingParams& cp);

}  // namespace pivm
