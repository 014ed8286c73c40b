#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <limits>
#include <memory>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pivm/error.hpp"

namespace pivm {

bool is_prime(long n);

/// A prime p >= 3 together with the working precision N, the number of
/// base-p digits tracked on the unit part of every value.
class PrimeContext {
 public:
  static constexpr int kMinPrecision = 4;

  PrimeContext(long p, int precision);

  long prime() const noexcept { return p_; }
  int precision() const noexcept { return precision_; }

  /// p^e. Cached for 0 <= e <= 2N + 8; larger powers are computed on demand.
  mpz_class power(long long e) const;
  const mpz_class& cached_power(int e) const { return (*powers_)[static_cast<std::size_t>(e)]; }
  int cached_power_limit() const noexcept { return static_cast<int>(powers_->size()) - 1; }

  PrimeContext with_precision(int precision) const { return PrimeContext(p_, precision); }

  friend bool operator==(const PrimeContext& a, const PrimeContext& b) noexcept {
    return a.p_ == b.p_ && a.precision_ == b.precision_;
  }

 private:
  long p_;
  int precision_;
  std::shared_ptr<const std::vector<mpz_class>> powers_;
};

/// An exact p-adic absolute value p^exponent, or 0.
struct Norm {
  long p = 0;
  bool zero = true;
  long long exponent = 0;

  static Norm of_valuation(long p, long long valuation) { return Norm{p, false, -valuation}; }
  static Norm zero_norm(long p) { return Norm{p, true, 0}; }

  /// "0" or "p^e", e.g. "5^-2".
  std::string to_string() const;

  friend bool operator==(const Norm&, const Norm&) = default;
  friend std::strong_ordering operator<=>(const Norm& a, const Norm& b) {
    if (a.zero || b.zero) return static_cast<int>(!a.zero) <=> static_cast<int>(!b.zero);
    return a.exponent <=> b.exponent;
  }
  friend Norm operator*(const Norm& a, const Norm& b) {
    if (a.zero || b.zero) return zero_norm(a.p);
    return Norm{a.p, false, a.exponent + b.exponent};
  }
};

/// Element of Q_p held as p^valuation * unit, where the unit is known modulo
/// p^relative_precision. Negative numbers are p-adic complements of the unit.
///
/// Zero comes in two flavours: an exact zero (from exact input), and an
/// inexact zero produced by cancellation, which only records that the value
/// is divisible by p^absolute_precision. Asking an inexact zero for its
/// valuation, norm or inverse raises PrecisionError.
class Padic {
 public:
  static constexpr long long kInfinitePrecision = std::numeric_limits<long long>::max() / 4;

  static Padic zero(const PrimeContext& ctx);
  static Padic one(const PrimeContext& ctx);
  static Padic from_int(long long value, const PrimeContext& ctx);
  static Padic from_integer(const mpz_class& value, const PrimeContext& ctx);
  static Padic from_rational(const mpz_class& num, const mpz_class& den, const PrimeContext& ctx);
  static Padic from_rational(const mpq_class& q, const PrimeContext& ctx);
  /// Integral value known modulo p^absolute_precision.
  static Padic from_residue(const mpz_class& residue, long long absolute_precision,
                            const PrimeContext& ctx);
  static Padic from_digits(const PrimeContext& ctx, long long valuation, std::span<const int> digits);
  static Padic approximate_zero(const PrimeContext& ctx, long long absolute_precision);

  const PrimeContext& context() const noexcept { return ctx_; }
  long prime() const noexcept { return ctx_.prime(); }

  bool is_zero() const noexcept { return kind_ != Kind::kNonzero; }
  bool is_exact_zero() const noexcept { return kind_ == Kind::kExactZero; }

  long long valuation() const;
  /// Number of reliable unit digits; 0 for zeros.
  int relative_precision() const noexcept { return kind_ == Kind::kNonzero ? prec_ : 0; }
  /// Exponent m such that the value is known modulo p^m.
  long long absolute_precision() const noexcept;
  /// Largest v with |x|_p <= p^-v guaranteed.
  long long valuation_lower_bound() const noexcept;

  const mpz_class& unit() const noexcept { return unit_; }
  std::vector<int> digits() const;
  long unit_residue() const;

  Norm norm() const;
  /// Upper bound on the norm; exact for nonzero values.
  Norm norm_bound() const;

  bool is_integral() const noexcept { return valuation_lower_bound() >= 0; }
  bool is_unit() const noexcept { return kind_ == Kind::kNonzero && val_ == 0; }

  /// x mod p^m for integral x; requires m <= absolute_precision().
  mpz_class residue(long long m) const;

  Padic operator-() const;
  friend Padic operator+(const Padic& x, const Padic& y);
  friend Padic operator-(const Padic& x, const Padic& y);
  friend Padic operator*(const Padic& x, const Padic& y);
  friend Padic operator/(const Padic& x, const Padic& y);
  Padic& operator+=(const Padic& y) { return *this = *this + y; }
  Padic& operator-=(const Padic& y) { return *this = *this - y; }
  Padic& operator*=(const Padic& y) { return *this = *this * y; }
  Padic& operator/=(const Padic& y) { return *this = *this / y; }

  Padic inverse() const;
  Padic pow(long long e) const;

  /// Forget digits at or beyond p^absolute_precision.
  Padic truncated(long long absolute_precision) const;
  /// Treat the stored representative as exact and extend it with zero digits
  /// up to the context precision.
  Padic padded() const;
  /// Same value re-homed in another context with the same prime; digits beyond
  /// the new precision are dropped.
  Padic in_context(const PrimeContext& ctx) const;

  /// Equal iff the difference vanishes to the smaller of the two precisions.
  friend bool operator==(const Padic& x, const Padic& y);

  /// "p^v * [d0,d1,...] (prec M)", "0" or "O(p^m)".
  std::string to_string() const;
  static Padic parse(std::string_view text, const PrimeContext& ctx);

  nlohmann::json to_json() const;
  static Padic from_json(const nlohmann::json& j, const PrimeContext& ctx);

 private:
  enum class Kind : unsigned char { kExactZero, kInexactZero, kNonzero };

  explicit Padic(const PrimeContext& ctx) : ctx_(ctx) {}
  static Padic make_nonzero(const PrimeContext& ctx, long long val, int prec, mpz_class unit);
  static Padic normalize(const PrimeContext& ctx, long long base_val, mpz_class s, long long window);

  PrimeContext ctx_;
  Kind kind_ = Kind::kExactZero;
  long long val_ = 0;  // valuation, or the absolute-precision bound for inexact zeros
  int prec_ = 0;
  mpz_class unit_;
};

Padic pow_int(const Padic& x, unsigned long long e);
/// x == y (mod p^m); throws PrecisionError if m exceeds either absolute precision.
bool eq_mod(const Padic& x, const Padic& y, long long m);
Norm norm(const Padic& x);
long long valuation(const Padic& x);

/// p-adic valuation of a nonzero integer.
long long valuation_of(const mpz_class& n, long p);

}  // namespace pivm
