#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pivm/padic.hpp"

namespace pivm {

/// One monomial c * x_0^e_0 * ... * x_{m-1}^e_{m-1}.
struct Term {
  Padic coefficient;
  std::vector<unsigned> exponents;
};

/// Sparse multivariate polynomial with p-adic integer coefficients.
class Polynomial {
 public:
  Polynomial(std::size_t variables, std::vector<Term> terms);

  std::size_t variables() const noexcept { return variables_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  Padic evaluate(std::span<const Padic> x) const;
  Polynomial derivative(std::size_t variable) const;

  /// Coefficients listed from degree 0 upward.
  static Polynomial univariate(std::span<const Padic> coefficients);
  static Polynomial constant(std::size_t variables, const Padic& c);
  static Polynomial variable(std::size_t variables, std::size_t index, const PrimeContext& ctx);

  Polynomial pow(unsigned e) const;
  friend Polynomial operator+(const Polynomial& f, const Polynomial& g);
  friend Polynomial operator-(const Polynomial& f, const Polynomial& g);
  friend Polynomial operator*(const Polynomial& f, const Polynomial& g);

 private:
  std::size_t variables_;
  std::vector<Term> terms_;
};

/// A square polynomial system F = (f_1, ..., f_m) in m unknowns over Z_p.
class IntPolySystem {
 public:
  explicit IntPolySystem(std::vector<Polynomial> polys);

  std::size_t dimension() const noexcept { return polys_.size(); }
  const std::vector<Polynomial>& polynomials() const noexcept { return polys_; }
  const PrimeContext& context() const noexcept { return ctx_; }

  std::vector<Padic> evaluate(std::span<const Padic> x) const;
  std::vector<std::vector<Padic>> jacobian(std::span<const Padic> x) const;

  /// Smallest absolute precision among the coefficients.
  long long coefficient_precision() const noexcept { return coefficient_precision_; }

 private:
  std::vector<Polynomial> polys_;
  std::vector<std::vector<Polynomial>> partials_;
  PrimeContext ctx_;
  long long coefficient_precision_;
};

/// Seed residue vector does not satisfy F(a) = 0 (mod p).
class SeedNotRootError : public PreconditionError {
 public:
  SeedNotRootError(std::size_t component, long residue);
  std::size_t component() const noexcept { return component_; }

 private:
  std::size_t component_;
};

/// det J_F(a) = 0 (mod p), or a matrix is singular mod p.
class SingularJacobianError : public PreconditionError {
 public:
  SingularJacobianError(std::size_t column, const std::string& what);
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

enum class LiftSchedule {
  kQuadratic,  ///< precision p, p^2, p^4, ... capped at N
  kLinear,     ///< one digit per Newton step
};

/// Lifts a nonsingular root of F mod p to a root mod p^N, N the smaller of the
/// context precision and the coefficient precision.
std::vector<Padic> lift(const IntPolySystem& F, std::span<const long> seed,
                        LiftSchedule schedule = LiftSchedule::kQuadratic);

/// det J_F(a) reduced mod p, in [0, p).
long jacobian_det_mod_p(const IntPolySystem& F, std::span<const long> seed);

using PadicMatrix = std::vector<std::vector<Padic>>;

/// Solves M x = rhs for M with p-adic integer entries and det M a unit.
std::vector<Padic> linear_solve_Zp(const PadicMatrix& M, std::span<const Padic> rhs);

namespace detail {

/// Solves M x = rhs modulo p^t in place over residues; throws
/// SingularJacobianError when no unit pivot exists in some column.
std::vector<mpz_class> solve_mod_prime_power(std::vector<std::vector<mpz_class>> M,
                                             std::vector<mpz_class> rhs, long p,
                                             const mpz_class& modulus);

}  // namespace detail

}  // namespace pivm
