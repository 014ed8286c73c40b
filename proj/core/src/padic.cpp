#include "pivm/padic.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace pivm {

namespace {

constexpr const char* kModule = "padic-core";

const PrimeContext& wider(const Padic& x, const Padic& y) {
  if (x.prime() != y.prime()) {
    throw PreconditionError(kModule, "operands live over different primes (" +
                                         std::to_string(x.prime()) + " vs " +
                                         std::to_string(y.prime()) + ")");
  }
  return x.context().precision() >= y.context().precision() ? x.context() : y.context();
}

mpz_class pow_ui(long p, unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), e);
  return r;
}

}  // namespace

bool is_prime(long n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (long d = 3; d <= n / d; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

long long valuation_of(const mpz_class& n, long p) {
  if (n == 0) throw PreconditionError(kModule, "valuation of zero");
  mpz_class tmp = n;
  long long v = 0;
  while (mpz_divisible_ui_p(tmp.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(tmp.get_mpz_t(), tmp.get_mpz_t(), static_cast<unsigned long>(p));
    ++v;
  }
  return v;
}

// ---------------------------------------------------------------------------
// PrimeContext

PrimeContext::PrimeContext(long p, int precision) : p_(p), precision_(precision) {
  if (!is_prime(p)) throw PreconditionError(kModule, std::to_string(p) + " is not prime");
  if (p < 3) throw PreconditionError(kModule, "p = 2 is not supported; need p >= 3");
  if (precision < kMinPrecision) {
    throw PreconditionError(kModule, "precision must be at least " + std::to_string(kMinPrecision));
  }
  auto powers = std::make_shared<std::vector<mpz_class>>();
  const int limit = 2 * precision + 8;
  powers->reserve(static_cast<std::size_t>(limit) + 1);
  powers->emplace_back(1);
  for (int e = 1; e <= limit; ++e) powers->push_back(powers->back() * p);
  powers_ = std::move(powers);
}

mpz_class PrimeContext::power(long long e) const {
  if (e < 0) throw PreconditionError(kModule, "negative exponent in integer power");
  if (e <= cached_power_limit()) return cached_power(static_cast<int>(e));
  return pow_ui(p_, static_cast<unsigned long>(e));
}

std::string Norm::to_string() const {
  if (zero) return "0";
  return std::to_string(p) + "^" + std::to_string(exponent);
}

// ---------------------------------------------------------------------------
// Construction

Padic Padic::make_nonzero(const PrimeContext& ctx, long long val, int prec, mpz_class unit) {
  Padic r(ctx);
  r.kind_ = Kind::kNonzero;
  r.val_ = val;
  r.prec_ = std::min(prec, ctx.precision());
  mpz_fdiv_r(unit.get_mpz_t(), unit.get_mpz_t(), ctx.power(r.prec_).get_mpz_t());
  r.unit_ = std::move(unit);
  return r;
}

Padic Padic::normalize(const PrimeContext& ctx, long long base_val, mpz_class s, long long window) {
  if (window <= 0) return approximate_zero(ctx, base_val + window);
  const mpz_class modulus = ctx.power(window);
  mpz_fdiv_r(s.get_mpz_t(), s.get_mpz_t(), modulus.get_mpz_t());
  if (s == 0) return approximate_zero(ctx, base_val + window);
  const long long t = valuation_of(s, ctx.prime());
  mpz_divexact(s.get_mpz_t(), s.get_mpz_t(), ctx.power(t).get_mpz_t());
  return make_nonzero(ctx, base_val + t, static_cast<int>(window - t), std::move(s));
}

Padic Padic::zero(const PrimeContext& ctx) { return Padic(ctx); }

Padic Padic::one(const PrimeContext& ctx) { return make_nonzero(ctx, 0, ctx.precision(), 1); }

Padic Padic::from_int(long long value, const PrimeContext& ctx) {
  return from_integer(mpz_class(static_cast<long>(value)), ctx);
}

Padic Padic::from_integer(const mpz_class& value, const PrimeContext& ctx) {
  return from_rational(value, 1, ctx);
}

Padic Padic::from_rational(const mpz_class& num, const mpz_class& den, const PrimeContext& ctx) {
  if (den == 0) throw PreconditionError(kModule, "zero denominator");
  if (num == 0) return zero(ctx);
  const long p = ctx.prime();
  const long long vn = valuation_of(num, p);
  const long long vd = valuation_of(den, p);
  mpz_class m = num / ctx.power(vn);
  mpz_class n = den / ctx.power(vd);
  const mpz_class& modulus = ctx.cached_power(ctx.precision());
  mpz_class inv;
  mpz_fdiv_r(n.get_mpz_t(), n.get_mpz_t(), modulus.get_mpz_t());
  mpz_invert(inv.get_mpz_t(), n.get_mpz_t(), modulus.get_mpz_t());
  return make_nonzero(ctx, vn - vd, ctx.precision(), m * inv);
}

Padic Padic::from_rational(const mpq_class& q, const PrimeContext& ctx) {
  return from_rational(q.get_num(), q.get_den(), ctx);
}

Padic Padic::from_residue(const mpz_class& residue, long long absolute_precision,
                          const PrimeContext& ctx) {
  return normalize(ctx, 0, residue, absolute_precision);
}

Padic Padic::from_digits(const PrimeContext& ctx, long long valuation, std::span<const int> digits) {
  if (digits.empty()) throw PreconditionError(kModule, "digit list is empty");
  if (digits.size() > static_cast<std::size_t>(ctx.precision())) {
    throw PreconditionError(kModule, "more digits than the working precision");
  }
  if (digits[0] == 0) throw PreconditionError(kModule, "leading unit digit must be nonzero");
  mpz_class unit = 0;
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (digits[i] < 0 || digits[i] >= ctx.prime()) {
      throw PreconditionError(kModule, "digit out of range [0, p-1]");
    }
    unit = unit * ctx.prime() + digits[i];
  }
  return make_nonzero(ctx, valuation, static_cast<int>(digits.size()), std::move(unit));
}

Padic Padic::approximate_zero(const PrimeContext& ctx, long long absolute_precision) {
  Padic r(ctx);
  r.kind_ = Kind::kInexactZero;
  r.val_ = absolute_precision;
  return r;
}

// ---------------------------------------------------------------------------
// Queries

long long Padic::valuation() const {
  if (kind_ == Kind::kExactZero) throw PreconditionError(kModule, "valuation of exact zero");
  if (kind_ == Kind::kInexactZero) {
    throw PrecisionError(kModule, "value indistinguishable from zero (O(p^" + std::to_string(val_) + "))",
                         val_ + ctx_.precision());
  }
  return val_;
}

long long Padic::absolute_precision() const noexcept {
  switch (kind_) {
    case Kind::kExactZero: return kInfinitePrecision;
    case Kind::kInexactZero: return val_;
    case Kind::kNonzero: return val_ + prec_;
  }
  return 0;
}

long long Padic::valuation_lower_bound() const noexcept {
  return kind_ == Kind::kExactZero ? kInfinitePrecision : val_;
}

std::vector<int> Padic::digits() const {
  std::vector<int> out;
  if (kind_ != Kind::kNonzero) return out;
  out.reserve(static_cast<std::size_t>(prec_));
  mpz_class u = unit_;
  const unsigned long p = static_cast<unsigned long>(ctx_.prime());
  for (int i = 0; i < prec_; ++i) {
    out.push_back(static_cast<int>(mpz_fdiv_q_ui(u.get_mpz_t(), u.get_mpz_t(), p)));
  }
  return out;
}

long Padic::unit_residue() const {
  if (kind_ != Kind::kNonzero) return 0;
  return static_cast<long>(mpz_fdiv_ui(unit_.get_mpz_t(), static_cast<unsigned long>(ctx_.prime())));
}

Norm Padic::norm() const {
  if (kind_ == Kind::kExactZero) return Norm::zero_norm(ctx_.prime());
  return Norm::of_valuation(ctx_.prime(), valuation());
}

Norm Padic::norm_bound() const {
  if (kind_ == Kind::kExactZero) return Norm::zero_norm(ctx_.prime());
  return Norm::of_valuation(ctx_.prime(), val_);
}

mpz_class Padic::residue(long long m) const {
  if (!is_integral()) throw PreconditionError(kModule, "residue of a non-integral value");
  if (m > absolute_precision()) {
    throw PrecisionError(kModule, "residue mod p^" + std::to_string(m) + " exceeds the known precision",
                         m);
  }
  if (kind_ != Kind::kNonzero || val_ >= m) return 0;
  mpz_class r = unit_ * ctx_.power(val_);
  mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), ctx_.power(m).get_mpz_t());
  return r;
}

// ---------------------------------------------------------------------------
// Arithmetic

Padic Padic::operator-() const {
  if (kind_ != Kind::kNonzero) return *this;
  return make_nonzero(ctx_, val_, prec_, ctx_.power(prec_) - unit_);
}

Padic operator+(const Padic& x, const Padic& y) {
  const PrimeContext& ctx = wider(x, y);
  if (x.is_exact_zero()) return y.in_context(ctx);
  if (y.is_exact_zero()) return x.in_context(ctx);
  const long long abs = std::min(x.absolute_precision(), y.absolute_precision());
  if (x.is_zero() && y.is_zero()) return Padic::approximate_zero(ctx, abs);
  if (x.is_zero()) return y.in_context(ctx).truncated(abs);
  if (y.is_zero()) return x.in_context(ctx).truncated(abs);

  const Padic& lo = x.val_ <= y.val_ ? x : y;
  const Padic& hi = x.val_ <= y.val_ ? y : x;
  if (hi.val_ >= abs) return lo.in_context(ctx).truncated(abs);
  const long long window = abs - lo.val_;
  mpz_class s = hi.unit_ * ctx.power(hi.val_ - lo.val_);
  s += lo.unit_;
  return Padic::normalize(ctx, lo.val_, std::move(s), window);
}

Padic operator-(const Padic& x, const Padic& y) { return x + (-y); }

Padic operator*(const Padic& x, const Padic& y) {
  const PrimeContext& ctx = wider(x, y);
  if (x.is_exact_zero() || y.is_exact_zero()) return Padic::zero(ctx);
  if (x.is_zero() || y.is_zero()) {
    return Padic::approximate_zero(ctx, x.valuation_lower_bound() + y.valuation_lower_bound());
  }
  const int prec = std::min(x.prec_, y.prec_);
  return Padic::make_nonzero(ctx, x.val_ + y.val_, prec, x.unit_ * y.unit_);
}

Padic Padic::inverse() const {
  if (kind_ == Kind::kExactZero) throw PreconditionError(kModule, "division by zero");
  if (kind_ == Kind::kInexactZero) {
    throw PrecisionError(kModule, "divisor indistinguishable from zero (O(p^" + std::to_string(val_) + "))",
                         val_ + ctx_.precision());
  }
  mpz_class inv;
  mpz_invert(inv.get_mpz_t(), unit_.get_mpz_t(), ctx_.power(prec_).get_mpz_t());
  return make_nonzero(ctx_, -val_, prec_, std::move(inv));
}

Padic operator/(const Padic& x, const Padic& y) {
  const PrimeContext& ctx = wider(x, y);
  const Padic inv = y.inverse();
  if (x.is_exact_zero()) return Padic::zero(ctx);
  return x.in_context(ctx) * inv;
}

Padic Padic::pow(long long e) const {
  if (e < 0) return inverse().pow(-e);
  if (e == 0) return one(ctx_);
  if (kind_ == Kind::kExactZero) return *this;
  const long long limit = kInfinitePrecision / (e > 0 ? e : 1);
  if (val_ > limit || val_ < -limit) throw PreconditionError(kModule, "valuation overflow in power");
  if (kind_ == Kind::kInexactZero) return approximate_zero(ctx_, val_ * e);
  mpz_class u;
  mpz_class ee(static_cast<unsigned long>(e));
  mpz_powm(u.get_mpz_t(), unit_.get_mpz_t(), ee.get_mpz_t(), ctx_.power(prec_).get_mpz_t());
  return make_nonzero(ctx_, val_ * e, prec_, std::move(u));
}

Padic Padic::truncated(long long absolute_precision) const {
  switch (kind_) {
    case Kind::kExactZero: return approximate_zero(ctx_, absolute_precision);
    case Kind::kInexactZero: return approximate_zero(ctx_, std::min(val_, absolute_precision));
    case Kind::kNonzero: break;
  }
  if (val_ >= absolute_precision) return approximate_zero(ctx_, absolute_precision);
  const long long keep = std::min<long long>(prec_, absolute_precision - val_);
  if (keep == prec_) return *this;
  return make_nonzero(ctx_, val_, static_cast<int>(keep), unit_);
}

Padic Padic::padded() const {
  if (kind_ == Kind::kInexactZero) return zero(ctx_);
  if (kind_ == Kind::kExactZero) return *this;
  Padic r = *this;
  r.prec_ = ctx_.precision();
  return r;
}

Padic Padic::in_context(const PrimeContext& ctx) const {
  if (ctx.prime() != ctx_.prime()) throw PreconditionError(kModule, "cannot change the prime");
  Padic r = *this;
  r.ctx_ = ctx;
  if (kind_ == Kind::kNonzero && prec_ > ctx.precision()) {
    return make_nonzero(ctx, val_, ctx.precision(), unit_);
  }
  return r;
}

bool operator==(const Padic& x, const Padic& y) {
  if (x.prime() != y.prime()) return false;
  return (x - y).is_zero();
}

Padic pow_int(const Padic& x, unsigned long long e) { return x.pow(static_cast<long long>(e)); }

bool eq_mod(const Padic& x, const Padic& y, long long m) {
  if (m > x.absolute_precision() || m > y.absolute_precision()) {
    throw PrecisionError(kModule, "congruence mod p^" + std::to_string(m) + " exceeds the known precision",
                         m);
  }
  return (x - y).valuation_lower_bound() >= m;
}

Norm norm(const Padic& x) { return x.norm(); }
long long valuation(const Padic& x) { return x.valuation(); }

// ---------------------------------------------------------------------------
// Text and JSON forms

std::string Padic::to_string() const {
  const std::string p = std::to_string(ctx_.prime());
  if (kind_ == Kind::kExactZero) return "0";
  if (kind_ == Kind::kInexactZero) return "O(" + p + "^" + std::to_string(val_) + ")";
  std::ostringstream os;
  os << p << '^' << val_ << " * [";
  const auto ds = digits();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (i) os << ',';
    os << ds[i];
  }
  os << "] (prec " << prec_ << ')';
  return os.str();
}

namespace {

struct Cursor {
  std::string_view s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw PreconditionError(kModule, "cannot parse p-adic literal '" + std::string(s) + "': " + why);
  }
  void skip_ws() {
    while (pos < s.size() && s[pos] == ' ') ++pos;
  }
  void expect(std::string_view tok) {
    skip_ws();
    if (s.substr(pos, tok.size()) != tok) fail("expected '" + std::string(tok) + "'");
    pos += tok.size();
  }
  long long integer() {
    skip_ws();
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
    if (ec != std::errc()) fail("expected integer");
    pos = static_cast<std::size_t>(ptr - s.data());
    return v;
  }
  bool done() {
    skip_ws();
    return pos == s.size();
  }
};

}  // namespace

Padic Padic::parse(std::string_view text, const PrimeContext& ctx) {
  Cursor c{text};
  c.skip_ws();
  if (c.s.substr(c.pos) == "0") return zero(ctx);
  if (c.s.substr(c.pos, 2) == "O(") {
    c.pos += 2;
    if (c.integer() != ctx.prime()) c.fail("prime mismatch");
    c.expect("^");
    const long long m = c.integer();
    c.expect(")");
    if (!c.done()) c.fail("trailing characters");
    return approximate_zero(ctx, m);
  }
  if (c.integer() != ctx.prime()) c.fail("prime mismatch");
  c.expect("^");
  const long long v = c.integer();
  c.expect("*");
  c.expect("[");
  std::vector<int> ds;
  c.skip_ws();
  if (c.pos < c.s.size() && c.s[c.pos] != ']') {
    ds.push_back(static_cast<int>(c.integer()));
    while (true) {
      c.skip_ws();
      if (c.pos < c.s.size() && c.s[c.pos] == ',') {
        ++c.pos;
        ds.push_back(static_cast<int>(c.integer()));
      } else {
        break;
      }
    }
  }
  c.expect("]");
  c.expect("(prec");
  const long long m = c.integer();
  c.expect(")");
  if (!c.done()) c.fail("trailing characters");
  if (m != static_cast<long long>(ds.size())) c.fail("precision does not match digit count");
  return from_digits(ctx, v, ds);
}

nlohmann::json Padic::to_json() const {
  nlohmann::json j;
  j["p"] = ctx_.prime();
  if (kind_ == Kind::kExactZero) {
    j["zero"] = "exact";
  } else if (kind_ == Kind::kInexactZero) {
    j["zero"] = "inexact";
    j["absolute_precision"] = val_;
  } else {
    j["valuation"] = val_;
    j["digits"] = digits();
    j["effective_precision"] = prec_;
  }
  return j;
}

Padic Padic::from_json(const nlohmann::json& j, const PrimeContext& ctx) {
  if (j.at("p").get<long>() != ctx.prime()) {
    throw PreconditionError(kModule, "JSON p-adic value has a different prime");
  }
  if (j.contains("zero")) {
    const auto kind = j.at("zero").get<std::string>();
    if (kind == "exact") return zero(ctx);
    if (kind == "inexact") return approximate_zero(ctx, j.at("absolute_precision").get<long long>());
    throw PreconditionError(kModule, "unknown zero kind '" + kind + "'");
  }
  const auto ds = j.at("digits").get<std::vector<int>>();
  if (j.at("effective_precision").get<long long>() != static_cast<long long>(ds.size())) {
    throw PreconditionError(kModule, "effective_precision does not match digit count");
  }
  return from_digits(ctx, j.at("valuation").get<long long>(), ds);
}

}  // namespace pivm
