#include "pivm/analysis.hpp"

#include <algorithm>
#include <numeric>

#include "pivm/hensel.hpp"

namespace pivm {

namespace {

constexpr const char* kModule = "padic-analysis";

long powmod(long base, long long e, long m) {
  __int128 r = 1;
  __int128 b = ((base % m) + m) % m;
  while (e > 0) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return static_cast<long>(r);
}

void require_odd_prime(long p) {
  if (p < 3 || !is_prime(p)) {
    throw PreconditionError(kModule, std::to_string(p) + " is not an odd prime");
  }
}

long long floor_log(unsigned long long n, long p) {
  long long e = 0;
  while (n >= static_cast<unsigned long long>(p)) {
    n /= static_cast<unsigned long long>(p);
    ++e;
  }
  return e;
}

}  // namespace

EpMembership ep_membership(const Padic& x) {
  const PrimeContext& ctx = x.context();
  const Padic one = Padic::one(ctx);
  EpMembership m;
  const Padic dm = x - one;
  const Padic dp = x + one;
  const bool unit = !x.is_zero() && x.valuation() == 0;
  m.in_Ep = unit && dm.valuation_lower_bound() >= 1;
  m.in_minus_Ep = unit && dp.valuation_lower_bound() >= 1;
  m.witness_norm = m.in_minus_Ep ? dp.norm_bound() : dm.norm_bound();
  return m;
}

bool in_Ep(const Padic& x) { return ep_membership(x).in_Ep; }
bool in_minus_Ep(const Padic& x) { return ep_membership(x).in_minus_Ep; }

long long factorial_valuation(unsigned long long n, long p) {
  long long v = 0;
  const auto up = static_cast<unsigned long long>(p);
  while (n > 0) {
    n /= up;
    v += static_cast<long long>(n);
  }
  return v;
}

Padic exp_p(const Padic& x) {
  const PrimeContext& ctx = x.context();
  const long p = ctx.prime();
  if (x.is_exact_zero()) return Padic::one(ctx);
  const long long target = std::min<long long>(ctx.precision(), x.absolute_precision());
  if (x.is_zero()) {
    if (x.absolute_precision() < 1) throw PreconditionError(kModule, "exp_p argument outside |x| < 1");
    return Padic::one(ctx).truncated(target);
  }
  const long long v = x.valuation();
  if (v < 1) throw PreconditionError(kModule, "exp_p needs |x| < p^(-1/(p-1)), i.e. v(x) >= 1");

  Padic sum = Padic::one(ctx);
  Padic term = Padic::one(ctx);
  for (long long n = 1;; ++n) {
    // Every term from n on has valuation at least n v - floor((n-1)/(p-1)).
    if (n * v - (n - 1) / (p - 1) >= target) break;
    term = term * x / Padic::from_int(n, ctx);
    sum += term;
  }
  return sum.truncated(target);
}

Padic log_p(const Padic& x) {
  const PrimeContext& ctx = x.context();
  const long p = ctx.prime();
  const Padic t = x - Padic::one(ctx);
  if (t.is_exact_zero()) return Padic::zero(ctx);
  if (t.is_zero()) {
    if (t.absolute_precision() < 1) throw PreconditionError(kModule, "log_p argument outside |x-1| < 1");
    return Padic::approximate_zero(ctx, t.absolute_precision());
  }
  const long long v = t.valuation();
  if (v < 1) throw PreconditionError(kModule, "log_p needs |x - 1| < 1");
  const long long target = std::min<long long>(t.absolute_precision(), v + ctx.precision());

  Padic sum = Padic::zero(ctx);
  Padic power = Padic::one(ctx);
  for (long long n = 1;; ++n) {
    if (n * v - floor_log(static_cast<unsigned long long>(n), p) >= target) break;
    power *= t;
    const Padic term = power / Padic::from_int(n, ctx);
    if (n % 2 == 1) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  return sum.truncated(target);
}

long kth_residue_count(long k, long p) {
  require_odd_prime(p);
  if (k < 1) throw PreconditionError(kModule, "k must be positive");
  const long d = std::gcd(k, p - 1);
  return ((p - 1) / d) % 2 == 0 ? d : 0;
}

bool minus_one_kth_root_exists_Qp(long k, long p) {
  require_odd_prime(p);
  if (k < 1) throw PreconditionError(kModule, "k must be positive");
  long q = k;
  while (q % p == 0) q /= p;
  return ((p - 1) / std::gcd(q, p - 1)) % 2 == 0;
}

std::vector<long> kth_roots_of_minus_one(long k, long p) {
  require_odd_prime(p);
  if (k < 1) throw PreconditionError(kModule, "k must be positive");
  std::vector<long> out;
  for (long a = 1; a < p; ++a) {
    if (powmod(a, k, p) == p - 1) out.push_back(a);
  }
  return out;
}

std::vector<Padic> roots_of_unity(long k, const PrimeContext& ctx) {
  if (k < 1) throw PreconditionError(kModule, "k must be positive");
  const long p = ctx.prime();
  const long d = std::gcd(k, p - 1);
  const Padic one = Padic::one(ctx);
  std::vector<Padic> coeffs(static_cast<std::size_t>(d) + 1, Padic::zero(ctx));
  coeffs.front() = -one;
  coeffs.back() = one;
  const IntPolySystem F({Polynomial::univariate(coeffs)});
  std::vector<Padic> out;
  for (long r = 1; r < p; ++r) {
    if (powmod(r, d, p) != 1) continue;
    const long seed[1] = {r};
    out.push_back(lift(F, seed).front());
  }
  return out;
}

long sqrt_mod_prime(long a, long p) {
  a %= p;
  if (a < 0) a += p;
  if (a == 0 || powmod(a, (p - 1) / 2, p) != 1) {
    throw PreconditionError(kModule, std::to_string(a) + " is not a nonzero square mod " + std::to_string(p));
  }
  // Tonelli-Shanks.
  long q = p - 1;
  long s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  long z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  long m = s;
  long c = powmod(z, q, p);
  long t = powmod(a, q, p);
  long r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    long i = 0;
    long t2 = t;
    while (t2 != 1) {
      t2 = static_cast<long>(static_cast<__int128>(t2) * t2 % p);
      ++i;
    }
    long b = c;
    for (long j = 0; j < m - i - 1; ++j) b = static_cast<long>(static_cast<__int128>(b) * b % p);
    m = i;
    c = static_cast<long>(static_cast<__int128>(b) * b % p);
    t = static_cast<long>(static_cast<__int128>(t) * c % p);
    r = static_cast<long>(static_cast<__int128>(r) * b % p);
  }
  return std::min(r, p - r);
}

std::optional<Padic> sqrt(const Padic& x) {
  const PrimeContext& ctx = x.context();
  if (x.is_exact_zero()) return x;
  const long long v = x.valuation();
  if (v % 2 != 0) throw PreconditionError(kModule, "odd valuation: no square root in Q_p");
  const long p = ctx.prime();
  const long u0 = x.unit_residue();
  if (powmod(u0, (p - 1) / 2, p) != 1) return std::nullopt;

  const int prec = x.relative_precision();
  const mpz_class& unit = x.unit();
  mpz_class r = sqrt_mod_prime(u0, p);
  mpz_class inv;
  mpz_class num;
  for (int t = 1; t < prec;) {
    t = std::min(2 * t, prec);
    const mpz_class modulus = ctx.power(t);
    num = r * r - unit;
    mpz_class two_r = 2 * r;
    mpz_invert(inv.get_mpz_t(), two_r.get_mpz_t(), modulus.get_mpz_t());
    r -= num * inv;
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), modulus.get_mpz_t());
  }
  const Padic root = Padic::from_residue(r, prec, ctx);
  const Padic scale = Padic::from_integer(ctx.power(v / 2 >= 0 ? v / 2 : -v / 2), ctx);
  return v >= 0 ? root * scale : root / scale;
}

}  // namespace pivm
