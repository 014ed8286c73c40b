#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pivm/padic.hpp"
#include "pivm/tree.hpp"

namespace pivm {

/// Model parameters. J and J1 are kept as exact rationals so that the
/// derived a = exp_p(J), b = exp_p(J1) can be recomputed at any precision.
struct CouplingParams {
  PrimeContext ctx;
  int k;
  mpq_class J_exact;
  mpq_class J1_exact;
  Padic J;
  Padic J1;
  Padic a;
  Padic b;
  Padic a2;
  Padic b2;

  /// Requires |J| <= 1/p and 0 < |J1| <= 1/p.
  static CouplingParams make(const PrimeContext& ctx, int k, const mpq_class& J, const mpq_class& J1);
  CouplingParams with_precision(int precision) const;
  long prime() const noexcept { return ctx.prime(); }
  nlohmann::json to_json() const;
};

/// (h_{++}, h_{+-}, h_{-+}, h_{--}); the first sign belongs to the parent.
struct HQuadruple {
  Padic pp;
  Padic pm;
  Padic mp;
  Padic mm;
};

struct UTriple {
  Padic u1;
  Padic u2;
  Padic u3;

  UTriple in_context(const PrimeContext& ctx) const;
  UTriple truncated(long long absolute_precision) const;
  nlohmann::json to_json() const;
  static UTriple from_json(const nlohmann::json& j, const PrimeContext& ctx);
};

/// Spin assignment on the vertices {x0} u V_n in breadth-first order. Bit i
/// set means sigma(i) = -1.
struct Configuration {
  std::uint64_t minus_mask = 0;
  std::size_t size = 0;

  int spin(std::size_t v) const { return ((minus_mask >> v) & 1U) ? -1 : 1; }
  void set(std::size_t v, int spin);
  /// One character per vertex, '1' for +1 and '0' for -1.
  std::string to_bits() const;
  static Configuration from_bits(std::string_view bits);
  static Configuration all_plus(const TreeIndex& t) { return Configuration{0, t.vertex_count()}; }
};

struct PairSums {
  long long edges;      ///< sum of sigma(x) sigma(y) over L_n
  long long prolonged;  ///< sum over prolonged pairs
};

PairSums pair_sums(const Configuration& sigma, const TreeIndex& t);
Padic hamiltonian(const Configuration& sigma, const TreeIndex& t, const CouplingParams& cp);

/// exp_p(H_n(sigma)) = a^{edges} b^{prolonged}.
Padic boltzmann_factor(const Configuration& sigma, const TreeIndex& t, const CouplingParams& cp);

struct MeasureOptions {
  unsigned threads = 1;
  /// Keep per-configuration values; forced on up to 2^16 configurations.
  bool materialize = false;
};

class MeasureTable {
 public:
  static constexpr std::uint64_t kAutoMaterializeLimit = std::uint64_t{1} << 16;
  static constexpr const char* kSchema = "pivm/measure-table/1";

  long p = 0;
  int k = 0;
  int n = 0;
  std::size_t vertices = 0;
  Padic Z = Padic::zero(PrimeContext(3, PrimeContext::kMinPrecision));
  /// Normalized values, indexed by minus_mask, when materialized.
  std::vector<Padic> values;

  bool materialized() const noexcept { return !values.empty(); }
  Norm Z_norm() const { return Z.norm(); }
  nlohmann::json to_json() const;
  static MeasureTable from_json(const nlohmann::json& j, const PrimeContext& ctx);
};

using HField = std::vector<HQuadruple>;
using UField = std::vector<UTriple>;

template <class T>
std::vector<T> constant_field(const TreeIndex& t, const T& value) {
  return std::vector<T>(t.edge_count(), value);
}

/// Measures from an edge-indexed boundary field; only the edges of the last
/// generation enter the weights.
MeasureTable measure_table_from_h(const HField& h, const TreeIndex& t, const CouplingParams& cp,
                                  MeasureOptions options = {});
MeasureTable measure_table_from_u(const UField& u, const TreeIndex& t, const CouplingParams& cp,
                                  MeasureOptions options = {});

/// Partition function from the u-form, streamed.
Padic partition_function_from_u(const UField& u, const TreeIndex& t, const CouplingParams& cp,
                                unsigned threads = 1);

struct CompatibilityReport {
  int n = 0;
  std::uint64_t configurations = 0;  ///< depth-n configurations enumerated
  /// Smallest guaranteed valuation of mu_n-marginal minus mu_{n-1}.
  long long min_residual_valuation = 0;
  Norm max_residual_norm;
  int precision = 0;

  bool passes(int slack = 2) const { return min_residual_valuation >= precision - slack; }
  nlohmann::json to_json() const;
};

/// Brute-force check of the compatibility condition between depths n-1 and n.
CompatibilityReport compatibility_check(const HField& h, const TreeIndex& t, const CouplingParams& cp,
                                        unsigned threads = 1);

UTriple u_from_h(const HQuadruple& h, const CouplingParams& cp);
/// Inverse of u_from_h with h_{++} = f.
HQuadruple h_from_u(const UTriple& u, const Padic& f, const CouplingParams& cp);

/// Triple on <x,y> from the triples on <y,z>, z in S(y).
UTriple recurrence_edge(std::span<const UTriple> children, const CouplingParams& cp);
/// Fills generation m of the field from generation m + 1.
void recurrence_step(UField& field, const TreeIndex& t, int m, const CouplingParams& cp);
/// The translation-invariant map u -> F(u).
UTriple ti_map(const UTriple& u, const CouplingParams& cp);

/// mpq parsing of "m/n", "m", "p^e*u" or "p^e".
mpq_class parse_coupling(std::string_view text, long p);

}  // namespace pivm
