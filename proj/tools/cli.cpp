#include "cli.hpp"

#include <CLI11.hpp>
#include <numeric>
#include <ostream>

#include "pivm/analysis.hpp"
#include "pivm/phase.hpp"
#include "pivm/solver.hpp"

namespace pivm::cli {

namespace {

struct RunConfig {
  std::string command;
  long p = 5;
  int k = 2;
  std::string J = "p^1";
  std::string J1 = "p^1";
  int precision = 12;
  int depth = 2;
  bool json = false;
  std::uint64_t budget = TreeIndex::kDefaultBudget;
  std::size_t solution = 0;
  unsigned threads = 1;
  std::string u1;
  std::string u2 = "1";
  std::string u3 = "1";

  nlohmann::json echo() const {
    nlohmann::json j{{"command", command}, {"p", p}, {"k", k}};
    if (command == "residues") return j;
    j["J"] = J;
    j["J1"] = J1;
    j["precision"] = precision;
    if (command == "compat" || command == "measure" || command == "decay") {
      j["depth"] = depth;
      j["budget"] = budget;
    }
    if (command == "compat" || command == "measure") j["solution"] = solution;
    if (command == "decay") j["u"] = {u1, u2, u3};
    return j;
  }
};

long long q_valuation(const mpq_class& q, long p) {
  return valuation_of(q.get_num(), p) - valuation_of(q.get_den(), p);
}

// Collects every violated precondition before any computation starts.
CouplingParams validate(const RunConfig& c) {
  std::vector<std::string> issues;
  const bool prime_ok = c.p >= 3 && is_prime(c.p);
  if (!prime_ok) issues.push_back("p = " + std::to_string(c.p) + " is not an odd prime");
  if (c.k < 2) issues.push_back("k must be at least 2");
  if (c.precision < PrimeContext::kMinPrecision) issues.push_back("precision must be at least 4");
  if (c.depth < 1) issues.push_back("depth must be at least 1");
  std::optional<mpq_class> J;
  std::optional<mpq_class> J1;
  if (prime_ok) {
    auto parse = [&](const std::string& text, const char* name, std::optional<mpq_class>& out) {
      try {
        out = parse_coupling(text, c.p);
      } catch (const Error& e) {
        issues.push_back(std::string(name) + ": " + e.what());
      }
    };
    parse(c.J, "J", J);
    parse(c.J1, "J1", J1);
    if (J && *J != 0 && q_valuation(*J, c.p) < 1) issues.push_back("need |J|_p <= 1/p");
    if (J1 && *J1 == 0) issues.push_back("need J1 != 0");
    if (J1 && *J1 != 0 && q_valuation(*J1, c.p) < 1) issues.push_back("need |J1|_p <= 1/p");
  }
  if (!issues.empty()) {
    std::string msg = "invalid configuration";
    for (const auto& s : issues) msg += "\n  - " + s;
    throw PreconditionError("cli", msg);
  }
  return CouplingParams::make(PrimeContext(c.p, c.precision), c.k, *J, *J1);
}

std::string show(const Padic& x) { return x.to_string() + "  |.| = " + x.norm_bound().to_string(); }

void print_certificate(std::ostream& out, std::size_t i, const FixedPointCertificate& c) {
  out << "[" << i << "] " << to_string(c.branch) << "  seed " << c.seed_residue << "  residual <= "
      << c.residual_norm.to_string();
  if (c.contraction_factor) out << "  factor " << c.contraction_factor->to_string();
  out << "\n    method: " << c.method << "\n";
  out << "    u1 = " << show(c.value.u1) << "\n    u2 = " << show(c.value.u2) << "\n    u3 = " << show(c.value.u3)
      << "\n";
  if (c.partner) out << "    f(u) = " << show(c.partner->u1) << "\n";
}

void print_header(std::ostream& out, const CouplingParams& cp) {
  out << "p = " << cp.prime() << ", k = " << cp.k << ", N = " << cp.ctx.precision() << ", J = " << cp.J_exact.get_str()
      << ", J1 = " << cp.J1_exact.get_str() << "\n";
}

void emit(std::ostream& out, const RunConfig& c, nlohmann::json result) {
  nlohmann::json doc{{"schema", kSchema}, {"config", c.echo()}, {"result", std::move(result)}};
  out << doc.dump(2) << "\n";
}

int cmd_residues(const RunConfig& c, std::ostream& out) {
  if (c.p < 3 || !is_prime(c.p)) throw PreconditionError("cli", "p = " + std::to_string(c.p) + " is not an odd prime");
  if (c.k < 1) throw PreconditionError("cli", "k must be positive");
  const auto roots = kth_roots_of_minus_one(c.k, c.p);
  const long g = std::gcd(static_cast<long>(c.k), c.p - 1);
  const long ratio = (c.p - 1) / g;
  const long count = kth_residue_count(c.k, c.p);
  if (c.json) {
    emit(out, c,
         {{"count", count},
          {"residues", roots},
          {"trace",
           {{"gcd_k_p_minus_1", g},
            {"ratio", ratio},
            {"ratio_even", ratio % 2 == 0},
            {"coprime", std::gcd(static_cast<long>(c.k), c.p) == 1},
            {"root_in_Qp", minus_one_kth_root_exists_Qp(c.k, c.p)}}}});
    return kOk;
  }
  out << "x^" << c.k << " = -1 over F_" << c.p << ": count " << count << "\n";
  out << "residues:";
  for (long r : roots) out << " " << r;
  out << "\n(k, p-1) = " << g << ", (p-1)/(k, p-1) = " << ratio << (ratio % 2 == 0 ? " (even)" : " (odd)") << "\n";
  return kOk;
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
  const CouplingParams cp = validate(c);
  const auto sols = solve_translation_invariant(cp);
  const MinusEpRegime regime = minus_Ep_regime(cp);
  const std::string reason = fix_in_minus_Ep(cp).reason;
  if (c.json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : sols) arr.push_back(s.to_json());
    nlohmann::json r{{"params", cp.to_json()}, {"minus_Ep_regime", to_string(regime)}, {"certificates", arr}};
    if (!reason.empty()) r["reason"] = reason;
    emit(out, c, std::move(r));
    return kOk;
  }
  print_header(out, cp);
  out << "-E_p regime: " << to_string(regime) << (reason.empty() ? "" : " (" + reason + ")") << "\n";
  out << sols.size() << " translation-invariant solution(s)\n";
  for (std::size_t i = 0; i < sols.size(); ++i) print_certificate(out, i, sols[i]);
  return kOk;
}

int cmd_periodic(const RunConfig& c, std::ostream& out) {
  const CouplingParams cp = validate(c);
  const TwoPeriodicResult r = solve_two_periodic(cp);
  if (c.json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : r.certificates) arr.push_back(s.to_json());
    nlohmann::json j{{"params", cp.to_json()}, {"discriminant", r.discriminant.to_json()}, {"certificates", arr}};
    if (!r.reason.empty()) j["reason"] = r.reason;
    emit(out, c, std::move(j));
    return kOk;
  }
  print_header(out, cp);
  out << "Delta = " << show(r.discriminant) << "\n";
  if (!r.reason.empty()) out << "no period-two solutions: " << r.reason << "\n";
  for (std::size_t i = 0; i < r.certificates.size(); ++i) print_certificate(out, i, r.certificates[i]);
  return kOk;
}

FixedPointCertificate pick_solution(const RunConfig& c, const CouplingParams& cp) {
  auto sols = solve_translation_invariant(cp);
  if (c.solution >= sols.size()) {
    throw PreconditionError("cli", "solution index " + std::to_string(c.solution) + " out of range (" +
                                       std::to_string(sols.size()) + " solutions)");
  }
  return std::move(sols[c.solution]);
}

// Quasi measures have |Z_n| < 1, so enumeration runs at N + v(Z_n) + slack
// with the solution re-solved at that precision.
CouplingParams enumeration_params(const RunConfig& c, const CouplingParams& cp, FixedPointCertificate& s) {
  const int wide = enumeration_precision(s.value, c.depth, cp);
  if (wide <= cp.ctx.precision() + 4) return cp;
  const CouplingParams w = cp.with_precision(wide);
  s = pick_solution(c, w);
  return w;
}

int cmd_compat(const RunConfig& c, std::ostream& out) {
  const CouplingParams cp = validate(c);
  if (c.depth < 2) throw PreconditionError("cli", "compat needs depth >= 2");
  FixedPointCertificate s = pick_solution(c, cp);
  const TreeIndex t = TreeIndex::build(cp.k, c.depth, c.budget);
  const CouplingParams w = enumeration_params(c, cp, s);
  const HField h = constant_field(t, h_from_u(s.value, Padic::one(w.ctx), w));
  CompatibilityReport r = compatibility_check(h, t, w, c.threads);
  r.precision = cp.ctx.precision();
  if (c.json) {
    nlohmann::json j = r.to_json();
    j["passes"] = r.passes();
    j["solution"] = s.to_json();
    emit(out, c, std::move(j));
    return kOk;
  }
  print_header(out, cp);
  out << "depth " << r.n << ": " << r.configurations << " configurations, max residual <= "
      << r.max_residual_norm.to_string() << (r.passes() ? "  (pass)" : "  (FAIL)") << "\n";
  return kOk;
}

int cmd_phase(const RunConfig& c, std::ostream& out) {
  const CouplingParams cp = validate(c);
  const PhaseReport r = detect_phase_transition(cp);
  if (c.json) {
    emit(out, c, r.to_json(cp));
    return kOk;
  }
  print_header(out, cp);
  out << to_string(r.verdict) << ": " << r.bounded_count() << " bounded, " << r.unbounded_count() << " unbounded";
  if (!r.census_complete) out << " (-E_p census unsupported for these parameters)";
  out << "\n";
  for (std::size_t i = 0; i < r.solutions.size(); ++i) {
    const auto& s = r.solutions[i];
    out << "[" << i << "] " << to_string(s.certificate.branch) << " -> " << to_string(s.classification.branch)
        << "  |Z_n| = " << cp.prime() << "^-(" << s.classification.z1_valuation << " + " << s.classification.e
        << " k|V_{n-1}|)\n";
  }
  for (const auto& s : r.periodic) {
    out << "period-two -> " << to_string(s.classification.branch) << " / " << to_string(s.partner->branch)
        << " (extension)\n";
  }
  out << "trace: " << r.criterion_trace.dump() << "\n";
  return kOk;
}

int cmd_measure(const RunConfig& c, std::ostream& out) {
  const CouplingParams cp = validate(c);
  FixedPointCertificate s = pick_solution(c, cp);
  const TreeIndex t = TreeIndex::build(cp.k, c.depth, c.budget);
  const CouplingParams w = enumeration_params(c, cp, s);
  const MeasureTable m = measure_table_from_u(constant_field(t, s.value), t, w, {c.threads, true});
  if (c.json) {
    emit(out, c, m.to_json());
    return kOk;
  }
  print_header(out, cp);
  out << "depth " << m.n << ", " << m.values.size() << " configurations, Z = " << show(m.Z) << "\n";
  const std::size_t shown = std::min<std::size_t>(m.values.size(), 16);
  for (std::size_t mask = 0; mask < shown; ++mask) {
    const Configuration sigma{mask, m.vertices};
    out << sigma.to_bits() << "  " << m.values[mask].norm_bound().to_string() << "\n";
  }
  if (shown < m.values.size()) out << "... (" << m.values.size() - shown << " more, use --json)\n";
  return kOk;
}

int cmd_decay(const RunConfig& c, std::ostream& out) {
  const CouplingParams cp = validate(c);
  if (c.u1.empty()) throw PreconditionError("cli", "decay needs --u1");
  auto value = [&](const std::string& s) { return Padic::from_rational(parse_coupling(s, cp.prime()), cp.ctx); };
  const UTriple u{value(c.u1), value(c.u2), value(c.u3)};
  const DecayReport r = strong_decay_check(u, c.depth, cp);
  if (c.json) {
    emit(out, c, r.to_json());
    return kOk;
  }
  print_header(out, cp);
  out << "n  |mu_n(-)| exponent  bound exponent  holds\n";
  for (const auto& row : r.rows) {
    out << row.n << "  " << row.exact_exponent.get_str() << "  " << row.bound_exponent.get_str() << "  "
        << (row.bound_holds ? "yes" : "no") << "\n";
  }
  return kOk;
}

void add_common(CLI::App* sub, RunConfig& c, bool coupling, bool tree) {
  sub->add_option("--p", c.p, "odd prime")->capture_default_str();
  sub->add_option("--k", c.k, "tree order")->capture_default_str();
  sub->add_flag("--json", c.json, "emit JSON");
  if (coupling) {
    sub->add_option("--J", c.J, "coupling J as m/n or p^e*u")->capture_default_str();
    sub->add_option("--J1", c.J1, "coupling J1 as m/n or p^e*u")->capture_default_str();
    sub->add_option("--precision", c.precision, "relative precision N")->capture_default_str();
  }
  if (tree) {
    sub->add_option("--depth,--n", c.depth, "tree depth")->capture_default_str();
    sub->add_option("--budget", c.budget, "enumeration budget")->capture_default_str();
    sub->add_option("--threads", c.threads, "worker threads")->capture_default_str();
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Exact p-adic Ising-Vannimenus computations on Cayley trees", "pivm"};
  app.require_subcommand(1);

  add_common(app.add_subcommand("residues", "k-th roots of -1 in F_p"), c, false, false);
  add_common(app.add_subcommand("solve", "translation-invariant solutions"), c, true, false);
  add_common(app.add_subcommand("periodic", "period-two solutions (k = 2)"), c, true, false);
  auto* compat = app.add_subcommand("compat", "brute-force compatibility check");
  add_common(compat, c, true, true);
  compat->add_option("--solution", c.solution, "index of the solution to check")->capture_default_str();
  add_common(app.add_subcommand("phase", "phase-transition verdict"), c, true, false);
  auto* measure = app.add_subcommand("measure", "dump a measure table");
  add_common(measure, c, true, true);
  measure->add_option("--solution", c.solution, "index of the solution")->capture_default_str();
  auto* decay = app.add_subcommand("decay", "strong decay exponents for a supplied triple");
  add_common(decay, c, true, true);
  decay->add_option("--u1", c.u1, "u1 (|u1| > 1)");
  decay->add_option("--u2", c.u2, "u2")->capture_default_str();
  decay->add_option("--u3", c.u3, "u3")->capture_default_str();

  std::vector<const char*> argv{"pivm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }
  c.command = app.get_subcommands().front()->get_name();

  try {
    if (c.command == "residues") return cmd_residues(c, out);
    if (c.command == "solve") return cmd_solve(c, out);
    if (c.command == "periodic") return cmd_periodic(c, out);
    if (c.command == "compat") return cmd_compat(c, out);
    if (c.command == "phase") return cmd_phase(c, out);
    if (c.command == "measure") return cmd_measure(c, out);
    if (c.command == "decay") return cmd_decay(c, out);
  } catch (const PreconditionError& e) {
    err << "error [" << e.module() << "]: " << e.what() << "\n";
    return kPrecondition;
  } catch (const ConsistencyError& e) {
    err << "consistency failure [" << e.module() << "]: " << e.what() << "\n";
    return kConsistency;
  } catch (const PrecisionError& e) {
    err << "precision exhausted [" << e.module() << "]: " << e.what();
    if (e.required_precision()) err << " (try --precision " << *e.required_precision() << ")";
    err << "\n";
    return kPrecision;
  }
  return kUsage;
}

}  // namespace pivm::cli
