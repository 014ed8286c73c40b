#pragma once

#include <optional>
#include <vector>

#include "pivm/padic.hpp"

namespace pivm {

struct EpMembership {
  bool in_Ep = false;
  bool in_minus_Ep = false;
  /// Norm of x+1 when x lies in -E_p, otherwise of x-1. An upper bound when
  /// that difference cancels to an inexact zero.
  Norm witness_norm;
};

/// For p >= 3, x is in E_p iff |x| = 1 and |x - 1| <= 1/p.
EpMembership ep_membership(const Padic& x);
bool in_Ep(const Padic& x);
bool in_minus_Ep(const Padic& x);

/// Series for exp on |x| < 1 (v(x) >= 1). The result is known modulo
/// p^min(N, abs(x)).
Padic exp_p(const Padic& x);

/// Series for log(1 + (x - 1)) on |x - 1| < 1.
Padic log_p(const Padic& x);

/// v_p(n!) by Legendre's formula.
long long factorial_valuation(unsigned long long n, long p);

/// Number of x in F_p with x^k = -1.
long kth_residue_count(long k, long p);
/// Whether -1 has a k-th root in Q_p, writing k = q p^s with (q, p) = 1.
bool minus_one_kth_root_exists_Qp(long k, long p);
/// Residues alpha in [1, p) with alpha^k = -1 (mod p), ascending.
std::vector<long> kth_roots_of_minus_one(long k, long p);

/// The gcd(k, p-1) roots of unity of order dividing k, sorted by residue.
std::vector<Padic> roots_of_unity(long k, const PrimeContext& ctx);

/// Square root whose leading digit is at most (p-1)/2; nullopt when the unit
/// part is a nonresidue. Odd valuation raises PreconditionError.
std::optional<Padic> sqrt(const Padic& x);

/// Square root of a mod p for prime p, a a nonzero quadratic residue.
long sqrt_mod_prime(long a, long p);

}  // namespace pivm
