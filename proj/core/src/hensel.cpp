#include "pivm/hensel.hpp"

#include <algorithm>
#include <map>

namespace pivm {

namespace {

constexpr const char* kModule = "hensel";

// A polynomial with coefficients reduced to residues modulo p^N.
struct ResiduePoly {
  std::vector<mpz_class> coeffs;
  std::vector<std::vector<unsigned>> exponents;

  ResiduePoly(const Polynomial& f, long long precision) {
    for (const Term& t : f.terms()) {
      coeffs.push_back(t.coefficient.residue(precision));
      exponents.push_back(t.exponents);
    }
  }

  mpz_class evaluate(const std::vector<mpz_class>& x, const mpz_class& modulus) const {
    mpz_class acc = 0;
    mpz_class term;
    mpz_class power;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      term = coeffs[i];
      for (std::size_t v = 0; v < x.size(); ++v) {
        const unsigned e = exponents[i][v];
        if (e == 0) continue;
        mpz_powm_ui(power.get_mpz_t(), x[v].get_mpz_t(), e, modulus.get_mpz_t());
        term *= power;
        mpz_fdiv_r(term.get_mpz_t(), term.get_mpz_t(), modulus.get_mpz_t());
      }
      acc += term;
    }
    mpz_fdiv_r(acc.get_mpz_t(), acc.get_mpz_t(), modulus.get_mpz_t());
    return acc;
  }
};

struct ResidueSystem {
  std::vector<ResiduePoly> f;
  std::vector<std::vector<ResiduePoly>> jac;

  ResidueSystem(const IntPolySystem& F, long long precision) {
    const std::size_t m = F.dimension();
    for (const auto& poly : F.polynomials()) {
      f.emplace_back(poly, precision);
      std::vector<ResiduePoly> row;
      for (std::size_t v = 0; v < m; ++v) row.emplace_back(poly.derivative(v), precision);
      jac.push_back(std::move(row));
    }
  }

  std::vector<mpz_class> values(const std::vector<mpz_class>& x, const mpz_class& modulus) const {
    std::vector<mpz_class> out;
    out.reserve(f.size());
    for (const auto& poly : f) out.push_back(poly.evaluate(x, modulus));
    return out;
  }

  std::vector<std::vector<mpz_class>> jacobian(const std::vector<mpz_class>& x,
                                               const mpz_class& modulus) const {
    std::vector<std::vector<mpz_class>> out;
    for (const auto& row : jac) {
      std::vector<mpz_class> r;
      for (const auto& poly : row) r.push_back(poly.evaluate(x, modulus));
      out.push_back(std::move(r));
    }
    return out;
  }
};

long det_mod_prime(std::vector<std::vector<mpz_class>> M, long p) {
  const std::size_t n = M.size();
  const mpz_class modulus(p);
  long det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    for (std::size_t r = col; r < n; ++r) {
      mpz_fdiv_r(M[r][col].get_mpz_t(), M[r][col].get_mpz_t(), modulus.get_mpz_t());
      if (M[r][col] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot == n) return 0;
    if (pivot != col) {
      std::swap(M[pivot], M[col]);
      det = (p - det) % p;
    }
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), M[col][col].get_mpz_t(), modulus.get_mpz_t());
    det = static_cast<long>((static_cast<__int128>(det) * mpz_fdiv_ui(M[col][col].get_mpz_t(), p)) % p);
    for (std::size_t r = col + 1; r < n; ++r) {
      mpz_class factor = M[r][col] * inv;
      for (std::size_t c = col; c < n; ++c) {
        M[r][c] -= factor * M[col][c];
        mpz_fdiv_r(M[r][c].get_mpz_t(), M[r][c].get_mpz_t(), modulus.get_mpz_t());
      }
    }
  }
  return det;
}

std::string join_seed(std::span<const long> seed) {
  std::string s = "(";
  for (std::size_t i = 0; i < seed.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(seed[i]);
  }
  return s + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// Polynomials

Polynomial::Polynomial(std::size_t variables, std::vector<Term> terms)
    : variables_(variables), terms_(std::move(terms)) {
  for (const Term& t : terms_) {
    if (t.exponents.size() != variables_) {
      throw PreconditionError(kModule, "monomial arity does not match the variable count");
    }
    if (!t.coefficient.is_integral()) {
      throw PreconditionError(kModule, "polynomial coefficients must be p-adic integers");
    }
  }
}

Padic Polynomial::evaluate(std::span<const Padic> x) const {
  if (x.size() != variables_) throw PreconditionError(kModule, "wrong number of arguments");
  if (terms_.empty()) throw PreconditionError(kModule, "cannot evaluate the empty polynomial");
  Padic acc = Padic::zero(terms_.front().coefficient.context());
  for (const Term& t : terms_) {
    Padic term = t.coefficient;
    for (std::size_t v = 0; v < variables_; ++v) {
      if (t.exponents[v]) term *= x[v].pow(t.exponents[v]);
    }
    acc += term;
  }
  return acc;
}

Polynomial Polynomial::derivative(std::size_t variable) const {
  std::vector<Term> out;
  for (const Term& t : terms_) {
    const unsigned e = t.exponents[variable];
    if (e == 0) continue;
    Term d{t.coefficient * Padic::from_int(e, t.coefficient.context()), t.exponents};
    d.exponents[variable] = e - 1;
    out.push_back(std::move(d));
  }
  if (out.empty() && !terms_.empty()) {
    std::vector<unsigned> zeros(variables_, 0);
    out.push_back(Term{Padic::zero(terms_.front().coefficient.context()), zeros});
  }
  return Polynomial(variables_, std::move(out));
}

Polynomial Polynomial::univariate(std::span<const Padic> coefficients) {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    if (coefficients[i].is_exact_zero()) continue;
    terms.push_back(Term{coefficients[i], {static_cast<unsigned>(i)}});
  }
  if (terms.empty()) throw PreconditionError(kModule, "zero polynomial");
  return Polynomial(1, std::move(terms));
}

Polynomial Polynomial::constant(std::size_t variables, const Padic& c) {
  return Polynomial(variables, {Term{c, std::vector<unsigned>(variables, 0)}});
}

Polynomial Polynomial::variable(std::size_t variables, std::size_t index, const PrimeContext& ctx) {
  std::vector<unsigned> e(variables, 0);
  e.at(index) = 1;
  return Polynomial(variables, {Term{Padic::one(ctx), std::move(e)}});
}

namespace {

Polynomial collect(std::size_t variables, std::map<std::vector<unsigned>, Padic> acc) {
  std::vector<Term> terms;
  for (auto& [e, c] : acc) {
    if (!c.is_exact_zero()) terms.push_back(Term{std::move(c), e});
  }
  if (terms.empty() && !acc.empty()) {
    terms.push_back(Term{Padic::zero(acc.begin()->second.context()), std::vector<unsigned>(variables, 0)});
  }
  return Polynomial(variables, std::move(terms));
}

void accumulate(std::map<std::vector<unsigned>, Padic>& acc, const std::vector<unsigned>& e, const Padic& c) {
  auto it = acc.find(e);
  if (it == acc.end()) {
    acc.emplace(e, c);
  } else {
    it->second += c;
  }
}

}  // namespace

Polynomial operator+(const Polynomial& f, const Polynomial& g) {
  if (f.variables() != g.variables()) throw PreconditionError(kModule, "variable count mismatch");
  std::map<std::vector<unsigned>, Padic> acc;
  for (const Term& t : f.terms()) accumulate(acc, t.exponents, t.coefficient);
  for (const Term& t : g.terms()) accumulate(acc, t.exponents, t.coefficient);
  return collect(f.variables(), std::move(acc));
}

Polynomial operator-(const Polynomial& f, const Polynomial& g) {
  std::vector<Term> neg;
  for (const Term& t : g.terms()) neg.push_back(Term{-t.coefficient, t.exponents});
  return f + Polynomial(g.variables(), std::move(neg));
}

Polynomial operator*(const Polynomial& f, const Polynomial& g) {
  if (f.variables() != g.variables()) throw PreconditionError(kModule, "variable count mismatch");
  std::map<std::vector<unsigned>, Padic> acc;
  for (const Term& s : f.terms()) {
    for (const Term& t : g.terms()) {
      std::vector<unsigned> e = s.exponents;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += t.exponents[i];
      accumulate(acc, e, s.coefficient * t.coefficient);
    }
  }
  return collect(f.variables(), std::move(acc));
}

Polynomial Polynomial::pow(unsigned e) const {
  if (terms_.empty()) throw PreconditionError(kModule, "power of the empty polynomial");
  Polynomial result = constant(variables_, Padic::one(terms_.front().coefficient.context()));
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e) base = base * base;
  }
  return result;
}

IntPolySystem::IntPolySystem(std::vector<Polynomial> polys)
    : polys_(std::move(polys)),
      ctx_(polys_.empty() || polys_.front().terms().empty()
               ? throw PreconditionError(kModule, "empty polynomial system")
               : polys_.front().terms().front().coefficient.context()),
      coefficient_precision_(Padic::kInfinitePrecision) {
  for (const auto& f : polys_) {
    if (f.variables() != polys_.size()) {
      throw PreconditionError(kModule, "system must be square (m polynomials in m unknowns)");
    }
    for (const Term& t : f.terms()) {
      if (t.coefficient.prime() != ctx_.prime()) {
        throw PreconditionError(kModule, "coefficients over different primes");
      }
      if (t.coefficient.context().precision() > ctx_.precision()) ctx_ = t.coefficient.context();
      coefficient_precision_ = std::min(coefficient_precision_, t.coefficient.absolute_precision());
    }
  }
  for (const auto& f : polys_) {
    std::vector<Polynomial> row;
    for (std::size_t v = 0; v < polys_.size(); ++v) row.push_back(f.derivative(v));
    partials_.push_back(std::move(row));
  }
}

std::vector<Padic> IntPolySystem::evaluate(std::span<const Padic> x) const {
  std::vector<Padic> out;
  for (const auto& f : polys_) out.push_back(f.evaluate(x));
  return out;
}

std::vector<std::vector<Padic>> IntPolySystem::jacobian(std::span<const Padic> x) const {
  std::vector<std::vector<Padic>> out;
  for (const auto& row : partials_) {
    std::vector<Padic> r;
    for (const auto& d : row) r.push_back(d.evaluate(x));
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Errors

SeedNotRootError::SeedNotRootError(std::size_t component, long residue)
    : PreconditionError(kModule, "seed is not a root mod p: component " + std::to_string(component) +
                                     " evaluates to " + std::to_string(residue) + " (mod p)"),
      component_(component) {}

SingularJacobianError::SingularJacobianError(std::size_t column, const std::string& what)
    : PreconditionError(kModule, what), column_(column) {}

// ---------------------------------------------------------------------------
// Linear algebra over Z/p^t

std::vector<mpz_class> detail::solve_mod_prime_power(std::vector<std::vector<mpz_class>> M,
                                                     std::vector<mpz_class> rhs, long p,
                                                     const mpz_class& modulus) {
  const std::size_t n = M.size();
  if (rhs.size() != n) throw PreconditionError(kModule, "right-hand side has the wrong length");
  for (const auto& row : M) {
    if (row.size() != n) throw PreconditionError(kModule, "matrix is not square");
  }
  const auto up = static_cast<unsigned long>(p);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    for (std::size_t r = col; r < n; ++r) {
      if (mpz_fdiv_ui(M[r][col].get_mpz_t(), up) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot == n) {
      throw SingularJacobianError(col, "matrix is singular mod p (no unit pivot in column " +
                                           std::to_string(col) + ")");
    }
    std::swap(M[pivot], M[col]);
    std::swap(rhs[pivot], rhs[col]);
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), M[col][col].get_mpz_t(), modulus.get_mpz_t());
    for (std::size_t c = col; c < n; ++c) {
      M[col][c] *= inv;
      mpz_fdiv_r(M[col][c].get_mpz_t(), M[col][c].get_mpz_t(), modulus.get_mpz_t());
    }
    rhs[col] *= inv;
    mpz_fdiv_r(rhs[col].get_mpz_t(), rhs[col].get_mpz_t(), modulus.get_mpz_t());
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || M[r][col] == 0) continue;
      const mpz_class factor = M[r][col];
      for (std::size_t c = col; c < n; ++c) {
        M[r][c] -= factor * M[col][c];
        mpz_fdiv_r(M[r][c].get_mpz_t(), M[r][c].get_mpz_t(), modulus.get_mpz_t());
      }
      rhs[r] -= factor * rhs[col];
      mpz_fdiv_r(rhs[r].get_mpz_t(), rhs[r].get_mpz_t(), modulus.get_mpz_t());
    }
  }
  return rhs;
}

std::vector<Padic> linear_solve_Zp(const PadicMatrix& M, std::span<const Padic> rhs) {
  const std::size_t n = M.size();
  if (n == 0 || rhs.size() != n) throw PreconditionError(kModule, "dimension mismatch");
  const PrimeContext& ctx = M[0].at(0).context();
  long long precision = ctx.precision();
  for (const auto& row : M) {
    if (row.size() != n) throw PreconditionError(kModule, "matrix is not square");
    for (const Padic& m : row) {
      if (!m.is_integral()) throw PreconditionError(kModule, "matrix entries must be p-adic integers");
      precision = std::min(precision, m.absolute_precision());
    }
  }
  // Scale the right-hand side into Z_p.
  long long shift = 0;
  for (const Padic& r : rhs) {
    if (!r.is_zero()) shift = std::max(shift, -r.valuation());
  }
  const Padic scale = Padic::from_integer(ctx.power(shift), ctx);
  std::vector<mpz_class> b;
  for (const Padic& r : rhs) {
    const Padic scaled = r * scale;
    precision = std::min(precision, scaled.absolute_precision());
    b.push_back(0);
  }
  if (precision <= 0) throw PrecisionError(kModule, "inputs carry no usable precision");
  const mpz_class modulus = ctx.power(precision);
  std::vector<std::vector<mpz_class>> A;
  for (const auto& row : M) {
    std::vector<mpz_class> r;
    for (const Padic& m : row) r.push_back(m.residue(precision));
    A.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < n; ++i) b[i] = (rhs[i] * scale).residue(precision);
  const auto x = detail::solve_mod_prime_power(std::move(A), std::move(b), ctx.prime(), modulus);
  std::vector<Padic> out;
  for (const auto& xi : x) out.push_back(Padic::from_residue(xi, precision, ctx) / scale);
  return out;
}

// ---------------------------------------------------------------------------
// Lifting

long jacobian_det_mod_p(const IntPolySystem& F, std::span<const long> seed) {
  if (seed.size() != F.dimension()) throw PreconditionError(kModule, "seed has the wrong dimension");
  const long p = F.context().prime();
  const ResidueSystem rs(F, 1);
  std::vector<mpz_class> a;
  for (long s : seed) a.emplace_back(((s % p) + p) % p);
  return det_mod_prime(rs.jacobian(a, mpz_class(p)), p);
}

std::vector<Padic> lift(const IntPolySystem& F, std::span<const long> seed, LiftSchedule schedule) {
  const std::size_t m = F.dimension();
  if (seed.size() != m) throw PreconditionError(kModule, "seed has the wrong dimension");
  const PrimeContext& ctx = F.context();
  const long p = ctx.prime();
  const long long target = std::min<long long>(ctx.precision(), F.coefficient_precision());
  if (target < 1) throw PrecisionError(kModule, "coefficients are not known mod p");

  const ResidueSystem rs(F, target);
  std::vector<mpz_class> x;
  for (long s : seed) x.emplace_back(((s % p) + p) % p);

  const mpz_class mod_p(p);
  const auto at_seed = rs.values(x, mod_p);
  for (std::size_t i = 0; i < m; ++i) {
    if (at_seed[i] != 0) throw SeedNotRootError(i, at_seed[i].get_si());
  }
  if (det_mod_prime(rs.jacobian(x, mod_p), p) == 0) {
    throw SingularJacobianError(0, "Jacobian is singular mod p at seed " + join_seed(seed));
  }

  long long t = 1;
  while (t < target) {
    const long long next = schedule == LiftSchedule::kQuadratic ? std::min(2 * t, target) : t + 1;
    const mpz_class modulus = ctx.power(next);
    auto fx = rs.values(x, modulus);
    auto delta = detail::solve_mod_prime_power(rs.jacobian(x, modulus), std::move(fx), p, modulus);
    for (std::size_t i = 0; i < m; ++i) {
      x[i] -= delta[i];
      mpz_fdiv_r(x[i].get_mpz_t(), x[i].get_mpz_t(), modulus.get_mpz_t());
    }
    t = next;
  }

  const mpz_class modulus = ctx.power(target);
  for (const auto& v : rs.values(x, modulus)) {
    if (v != 0) throw ConsistencyError(kModule, "Newton iteration failed to reach a root mod p^N");
  }
  std::vector<Padic> out;
  for (const auto& xi : x) out.push_back(Padic::from_residue(xi, target, ctx));
  return out;
}

}  // namespace pivm
