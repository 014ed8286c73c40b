#include "pivm/phase.hpp"

#include <numeric>

#include "pivm/analysis.hpp"

namespace pivm {

namespace {

constexpr const char* kModule = "phase";

std::string mpz_string(const mpz_class& z) { return z.get_str(); }

nlohmann::json norm_power(long p, const mpz_class& exponent) {
  return std::to_string(p) + "^" + exponent.get_str();
}

long long checked_valuation(const Padic& x, const char* what) {
  if (x.is_exact_zero()) throw PreconditionError(kModule, std::string(what) + " vanishes");
  if (x.is_zero()) {
    throw PrecisionError(kModule, std::string(what) + " is indistinguishable from zero",
                         x.context().precision() + 8);
  }
  return x.valuation();
}

void require_unit_u2_u3(const UTriple& u) {
  if (u.u2.is_zero() || u.u2.valuation() != 0 || u.u3.is_zero() || u.u3.valuation() != 0) {
    throw PreconditionError(kModule, "requires |u2| = |u3| = 1");
  }
}

long long digit_exponent(int k, int n) {
  if (n < 1) throw PreconditionError(kModule, "depth must be at least 1");
  const mpz_class e = k * sphere_volume(k, n - 1);
  if (e > static_cast<long>(kMaxDigitExponent)) {
    throw PreconditionError(kModule, "exponent k|V_{n-1}| = " + e.get_str() + " too large for digits; use valuations");
  }
  return e.get_si();
}

}  // namespace

mpz_class sphere_volume(int k, int n) {
  if (k < 2 || n < 0) throw PreconditionError(kModule, "sphere_volume needs k >= 2, n >= 0");
  mpz_class kn;
  mpz_ui_pow_ui(kn.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(n));
  return k * (kn - 1) / (k - 1);
}

Padic growth_factor(const UTriple& u, const CouplingParams& cp) {
  const Padic num = cp.a * (cp.b2 * u.u3 + Padic::one(cp.ctx));
  return num / (cp.b * u.u3);
}

Padic depth_one_partition(const UTriple& u, const CouplingParams& cp) {
  const Padic one = Padic::one(cp.ctx);
  const Padic s = ((u.u3 + one) / u.u3).pow(cp.k) + ((one + u.u2) / u.u1).pow(cp.k);
  return cp.a.pow(cp.k) * s;
}

Padic partition_product_form(const UTriple& u, int n, const CouplingParams& cp) {
  return growth_factor(u, cp).pow(digit_exponent(cp.k, n));
}

Padic partition_closed_form(const UTriple& u, int n, const CouplingParams& cp) {
  const long long e = digit_exponent(cp.k, n);
  return depth_one_partition(u, cp) * growth_factor(u, cp).pow(e);
}

mpz_class partition_valuation(const UTriple& u, int n, const CouplingParams& cp) {
  const MeasureClassification c = classify(u, cp);
  return c.z_valuation(n);
}

int enumeration_precision(const UTriple& u, int n, const CouplingParams& cp, int slack) {
  const mpz_class v = partition_valuation(u, n, cp);
  const mpz_class total = cp.ctx.precision() + v + slack;
  if (!total.fits_sint_p()) throw PreconditionError(kModule, "enumeration precision overflows");
  return static_cast<int>(total.get_si());
}

std::string to_string(MeasureBranch b) {
  return b == MeasureBranch::kGibbsBounded ? "GibbsBounded" : "QuasiUnbounded";
}

std::string to_string(Verdict v) { return v == Verdict::kPhaseTransition ? "PHASE_TRANSITION" : "NO_TRANSITION"; }

mpz_class MeasureClassification::growth_coefficient(int n) const {
  if (n < 1) throw PreconditionError(kModule, "depth must be at least 1");
  return k * sphere_volume(k, n - 1);
}

mpz_class MeasureClassification::z_valuation(int n) const {
  return mpz_class(static_cast<long>(z1_valuation)) + growth_coefficient(n) * static_cast<long>(e);
}

nlohmann::json MeasureClassification::to_json(int n_max) const {
  nlohmann::json j;
  j["branch"] = to_string(branch);
  j["e"] = e;
  j["z1_valuation"] = z1_valuation;
  if (extension) j["extension"] = "period-two triple; classified by the same u3 test";
  nlohmann::json rows = nlohmann::json::array();
  for (int n = 1; n <= n_max; ++n) {
    rows.push_back({{"n", n},
                    {"growth_coefficient", mpz_string(growth_coefficient(n))},
                    {"Z_norm", norm_power(p, Z_norm_exponent(n))},
                    {"mu_norm", norm_power(p, mu_norm_exponent(n))}});
  }
  j["norms"] = rows;
  return j;
}

MeasureClassification classify(const UTriple& u, const CouplingParams& cp) {
  require_unit_u2_u3(u);
  MeasureClassification c;
  c.p = cp.prime();
  c.k = cp.k;
  const long long top = checked_valuation(cp.b2 * u.u3 + Padic::one(cp.ctx), "b^2 u3 + 1");
  c.e = top - (cp.b * u.u3).valuation();
  c.z1_valuation = checked_valuation(depth_one_partition(u, cp), "Z_1");
  c.branch = c.e == 0 ? MeasureBranch::kGibbsBounded : MeasureBranch::kQuasiUnbounded;
  return c;
}

std::size_t PhaseReport::bounded_count() const {
  std::size_t n = 0;
  for (const auto& s : solutions) n += s.classification.branch == MeasureBranch::kGibbsBounded;
  return n;
}

std::size_t PhaseReport::unbounded_count() const { return solutions.size() - bounded_count(); }

nlohmann::json PhaseReport::to_json(const CouplingParams& cp) const {
  auto entry = [](const ClassifiedSolution& s) {
    nlohmann::json j = s.certificate.to_json();
    j["classification"] = s.classification.to_json();
    if (s.partner) j["partner_classification"] = s.partner->to_json();
    return j;
  };
  nlohmann::json j;
  j["params"] = cp.to_json();
  j["verdict"] = to_string(verdict);
  j["bounded"] = bounded_count();
  j["unbounded"] = unbounded_count();
  j["solutions"] = nlohmann::json::array();
  for (const auto& s : solutions) j["solutions"].push_back(entry(s));
  if (!periodic.empty()) {
    j["periodic"] = nlohmann::json::array();
    for (const auto& s : periodic) j["periodic"].push_back(entry(s));
  }
  j["criterion_trace"] = criterion_trace;
  j["census_complete"] = census_complete;
  return j;
}

PhaseReport detect_phase_transition(const CouplingParams& cp) {
  PhaseReport r;
  const long p = cp.prime();
  const long k = cp.k;
  const long g = std::gcd(k, p - 1);
  const MinusEpRegime regime = minus_Ep_regime(cp);

  const Padic one = Padic::one(cp.ctx);
  const Padic am1 = cp.a - one;
  nlohmann::json trace;
  trace["gcd_k_p"] = std::gcd(k, p);
  trace["coprime"] = std::gcd(k, p) == 1;
  trace["gcd_k_p_minus_1"] = g;
  trace["ratio"] = (p - 1) / g;
  trace["ratio_even"] = ((p - 1) / g) % 2 == 0;
  trace["contraction_premise"] = {
      {"k_odd", k % 2 == 1},
      {"norm_k", Norm::of_valuation(p, valuation_of(mpz_class(k), p)).to_string()},
      {"norm_a_minus_1", am1.norm_bound().to_string()},
      {"norm_b_minus_1", (cp.b - one).norm().to_string()},
      {"holds", regime == MinusEpRegime::kContractionOnly}};
  trace["minus_Ep_regime"] = to_string(regime);

  for (auto& c : solve_translation_invariant(cp)) {
    MeasureClassification m = classify(c.value, cp);
    r.solutions.push_back(ClassifiedSolution{std::move(c), std::move(m), std::nullopt});
  }
  if (cp.k == 2) {
    const TwoPeriodicResult per = solve_two_periodic(cp);
    if (!per.reason.empty()) trace["periodic"] = per.reason;
    for (const auto& c : per.certificates) {
      MeasureClassification m = classify(c.value, cp);
      m.extension = true;
      MeasureClassification pm = classify(*c.partner, cp);
      pm.extension = true;
      r.periodic.push_back(ClassifiedSolution{c, std::move(m), std::move(pm)});
    }
  }
  r.criterion_trace = std::move(trace);
  r.census_complete = regime != MinusEpRegime::kUnsupported;
  r.verdict = r.bounded_count() >= 1 && r.unbounded_count() >= 1 ? Verdict::kPhaseTransition : Verdict::kNoTransition;
  return r;
}

bool DecayReport::all_bounds_hold() const {
  for (const auto& row : rows) {
    if (!row.bound_holds) return false;
  }
  return true;
}

nlohmann::json DecayReport::to_json() const {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    j["rows"].push_back({{"n", row.n},
                         {"W_n", mpz_string(row.boundary)},
                         {"V_n", mpz_string(row.volume)},
                         {"exact_exponent", mpz_string(row.exact_exponent)},
                         {"bound_exponent", mpz_string(row.bound_exponent)},
                         {"bound_holds", row.bound_holds}});
  }
  j["monotone"] = monotone;
  j["all_bounds_hold"] = all_bounds_hold();
  return j;
}

DecayReport strong_decay_check(const UTriple& u, int n_max, const CouplingParams& cp) {
  if (u.u1.is_zero() || u.u1.valuation() >= 0) throw PreconditionError(kModule, "strong decay requires |u1| > 1");
  require_unit_u2_u3(u);
  if (n_max < 1) throw PreconditionError(kModule, "n_max must be at least 1");
  const MeasureClassification c = classify(u, cp);
  const long v1 = static_cast<long>(u.u1.valuation());
  DecayReport report;
  for (int n = 1; n <= n_max; ++n) {
    mpz_class boundary;
    mpz_ui_pow_ui(boundary.get_mpz_t(), static_cast<unsigned long>(cp.k), static_cast<unsigned long>(n));
    const mpz_class volume = sphere_volume(cp.k, n);
    DecayRow row{n, boundary, volume, boundary * v1 + c.z_valuation(n), volume * v1, false};
    row.bound_holds = row.exact_exponent < row.bound_exponent;
    if (!report.rows.empty() && !(row.bound_exponent < report.rows.back().bound_exponent)) report.monotone = false;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace pivm
