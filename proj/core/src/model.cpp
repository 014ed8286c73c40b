#include "pivm/model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <thread>

#include "pivm/analysis.hpp"

namespace pivm {

namespace {

constexpr const char* kModule = "ivm-model";

Padic checked_div(const Padic& num, const Padic& den, const std::string& label) {
  if (den.is_exact_zero()) throw PreconditionError(kModule, "vanishing denominator: " + label);
  if (den.is_zero()) {
    throw PrecisionError(kModule, "denominator indistinguishable from zero: " + label,
                         den.absolute_precision() + den.context().precision());
  }
  return num / den;
}

std::string rational_string(const mpq_class& q) { return q.get_str(); }

// Splits [0, count) into contiguous chunks, reduces each in its own
// accumulator and merges them in chunk order.
template <class Acc, class Body, class Merge>
Acc parallel_reduce(std::uint64_t count, unsigned threads, const Acc& init, Body body, Merge merge) {
  threads = std::max(1U, threads);
  if (threads == 1 || count < 1024) {
    Acc acc = init;
    body(acc, std::uint64_t{0}, count);
    return acc;
  }
  std::vector<Acc> partial(threads, init);
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (count + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t begin = std::min<std::uint64_t>(count, w * chunk);
    const std::uint64_t end = std::min<std::uint64_t>(count, begin + chunk);
    pool.emplace_back([&, w, begin, end] { body(partial[w], begin, end); });
  }
  for (auto& th : pool) th.join();
  Acc acc = std::move(partial.front());
  for (unsigned w = 1; w < threads; ++w) merge(acc, partial[w]);
  return acc;
}

// Unnormalized weight exp_p(H_n(sigma)) * prod over the last generation of
// the boundary factor selected by the spins at both ends of the edge.
class WeightKernel {
 public:
  using Factors = std::array<Padic, 4>;  // ++, +-, -+, --

  WeightKernel(const TreeIndex& t, const CouplingParams& cp, std::vector<Factors> boundary)
      : vertices_(t.vertex_count()), edges_(static_cast<long long>(t.edge_count())),
        pairs_(static_cast<long long>(t.prolonged_pairs().size())), boundary_(std::move(boundary)) {
    for (std::size_t v = 1; v < vertices_; ++v) parent_.push_back(t.parent(v));
    for (const auto& pr : t.prolonged_pairs()) pair_list_.push_back(pr);
    const auto [first, last] = t.generation(t.depth());
    first_boundary_ = first;
    if (boundary_.size() != last - first) throw PreconditionError(kModule, "boundary size mismatch");
    a_pow_ = power_table(cp.a, edges_);
    b_pow_ = power_table(cp.b, pairs_);
  }

  std::uint64_t configurations() const { return std::uint64_t{1} << vertices_; }

  Padic weight(std::uint64_t mask) const {
    long long differ = 0;
    for (std::size_t v = 1; v < vertices_; ++v) differ += static_cast<long long>(((mask >> v) ^ (mask >> parent_[v - 1])) & 1U);
    long long pdiffer = 0;
    for (const auto& pr : pair_list_) {
      pdiffer += static_cast<long long>(((mask >> pr.ancestor) ^ (mask >> pr.descendant)) & 1U);
    }
    const long long s1 = edges_ - 2 * differ;
    const long long s2 = pairs_ - 2 * pdiffer;
    Padic w = a_pow_[static_cast<std::size_t>(s1 + edges_)] * b_pow_[static_cast<std::size_t>(s2 + pairs_)];
    for (std::size_t i = 0; i < boundary_.size(); ++i) {
      const std::size_t child = first_boundary_ + i + 1;
      const unsigned sx = (mask >> parent_[child - 1]) & 1U;
      const unsigned sy = (mask >> child) & 1U;
      const Padic& f = boundary_[i][2 * sx + sy];
      w *= f;
    }
    return w;
  }

 private:
  static std::vector<Padic> power_table(const Padic& x, long long range) {
    std::vector<Padic> table;
    const Padic inv = x.inverse();
    for (long long s = -range; s <= range; ++s) table.push_back(s >= 0 ? x.pow(s) : inv.pow(-s));
    return table;
  }

  std::size_t vertices_;
  long long edges_;
  long long pairs_;
  std::vector<std::size_t> parent_;
  std::vector<ProlongedPair> pair_list_;
  std::vector<Factors> boundary_;
  std::size_t first_boundary_ = 0;
  std::vector<Padic> a_pow_;
  std::vector<Padic> b_pow_;
};

std::vector<WeightKernel::Factors> h_factors(const HField& h, const TreeIndex& t) {
  if (h.size() < t.edge_count()) throw PreconditionError(kModule, "h field does not cover the tree");
  const auto [first, last] = t.generation(t.depth());
  std::vector<WeightKernel::Factors> out;
  for (std::size_t id = first; id < last; ++id) {
    const HQuadruple& q = h[id];
    const std::string at = "edge " + std::to_string(id);
    for (const Padic* c : {&q.pp, &q.pm, &q.mp, &q.mm}) {
      if (c->is_zero()) throw PreconditionError(kModule, "h component vanishes at " + at);
    }
    out.push_back({q.pp, q.pm.inverse(), q.mp.inverse(), q.mm});
  }
  return out;
}

std::vector<WeightKernel::Factors> u_factors(const UField& u, const TreeIndex& t, const CouplingParams& cp) {
  if (u.size() < t.edge_count()) throw PreconditionError(kModule, "u field does not cover the tree");
  const auto [first, last] = t.generation(t.depth());
  std::vector<WeightKernel::Factors> out;
  const Padic one = Padic::one(cp.ctx);
  for (std::size_t id = first; id < last; ++id) {
    const UTriple& x = u[id];
    const std::string at = "edge " + std::to_string(id);
    out.push_back({one, checked_div(cp.a2, x.u3, "u3 at " + at), checked_div(cp.a2, x.u1, "u1 at " + at),
                   checked_div(x.u2, x.u1, "u1 at " + at)});
  }
  return out;
}

MeasureTable enumerate_table(const WeightKernel& kernel, const TreeIndex& t, const CouplingParams& cp,
                             MeasureOptions options) {
  const std::uint64_t count = kernel.configurations();
  const bool keep = options.materialize || count <= MeasureTable::kAutoMaterializeLimit;
  std::vector<Padic> weights;
  if (keep) weights.assign(count, Padic::zero(cp.ctx));
  const Padic Z = parallel_reduce(
      count, options.threads, Padic::zero(cp.ctx),
      [&](Padic& acc, std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t m = begin; m < end; ++m) {
          Padic w = kernel.weight(m);
          acc += w;
          if (keep) weights[m] = std::move(w);
        }
      },
      [](Padic& acc, const Padic& other) { acc += other; });

  MeasureTable table;
  table.p = cp.prime();
  table.k = t.order();
  table.n = t.depth();
  table.vertices = t.vertex_count();
  table.Z = Z;
  if (Z.is_zero()) {
    throw PrecisionError(kModule, "partition function indistinguishable from zero at precision " +
                                      std::to_string(cp.ctx.precision()),
                         Z.absolute_precision() + cp.ctx.precision());
  }
  if (keep) {
    const Padic zinv = Z.inverse();
    for (auto& w : weights) w *= zinv;
    table.values = std::move(weights);
  }
  return table;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameters

CouplingParams CouplingParams::make(const PrimeContext& ctx, int k, const mpq_class& J, const mpq_class& J1) {
  if (k < 2) throw PreconditionError(kModule, "tree order k must be at least 2");
  const long p = ctx.prime();
  auto valuation_q = [p](const mpq_class& q) {
    return valuation_of(q.get_num(), p) - valuation_of(q.get_den(), p);
  };
  if (J != 0 && valuation_q(J) < 1) {
    throw PreconditionError(kModule, "need |J|_p <= 1/p, got J = " + rational_string(J));
  }
  if (J1 == 0) throw PreconditionError(kModule, "need J1 != 0 (b = 1 is excluded)");
  if (valuation_q(J1) < 1) {
    throw PreconditionError(kModule, "need |J1|_p <= 1/p, got J1 = " + rational_string(J1));
  }
  const Padic j = Padic::from_rational(J, ctx);
  const Padic j1 = Padic::from_rational(J1, ctx);
  const Padic a = exp_p(j);
  const Padic b = exp_p(j1);
  return CouplingParams{ctx, k, J, J1, j, j1, a, b, a * a, b * b};
}

CouplingParams CouplingParams::with_precision(int precision) const {
  return make(PrimeContext(ctx.prime(), precision), k, J_exact, J1_exact);
}

nlohmann::json CouplingParams::to_json() const {
  return {{"p", ctx.prime()},     {"k", k},        {"precision", ctx.precision()},
          {"J", J_exact.get_str()}, {"J1", J1_exact.get_str()}, {"a", a.to_json()},
          {"b", b.to_json()}};
}

// ---------------------------------------------------------------------------
// Triples and configurations

UTriple UTriple::in_context(const PrimeContext& ctx) const {
  return UTriple{u1.in_context(ctx), u2.in_context(ctx), u3.in_context(ctx)};
}

UTriple UTriple::truncated(long long absolute_precision) const {
  return UTriple{u1.truncated(absolute_precision), u2.truncated(absolute_precision),
                 u3.truncated(absolute_precision)};
}

nlohmann::json UTriple::to_json() const {
  return nlohmann::json::array({u1.to_json(), u2.to_json(), u3.to_json()});
}

UTriple UTriple::from_json(const nlohmann::json& j, const PrimeContext& ctx) {
  if (!j.is_array() || j.size() != 3) throw PreconditionError(kModule, "u triple must be a JSON array of 3");
  return UTriple{Padic::from_json(j[0], ctx), Padic::from_json(j[1], ctx), Padic::from_json(j[2], ctx)};
}

void Configuration::set(std::size_t v, int s) {
  if (v >= size) throw PreconditionError(kModule, "vertex outside the configuration");
  if (s == -1) {
    minus_mask |= std::uint64_t{1} << v;
  } else if (s == 1) {
    minus_mask &= ~(std::uint64_t{1} << v);
  } else {
    throw PreconditionError(kModule, "spins are +1 or -1");
  }
}

std::string Configuration::to_bits() const {
  std::string s(size, '1');
  for (std::size_t v = 0; v < size; ++v) {
    if (spin(v) == -1) s[v] = '0';
  }
  return s;
}

Configuration Configuration::from_bits(std::string_view bits) {
  if (bits.size() > 63) throw PreconditionError(kModule, "configuration too long");
  Configuration c{0, bits.size()};
  for (std::size_t v = 0; v < bits.size(); ++v) {
    if (bits[v] == '0') {
      c.minus_mask |= std::uint64_t{1} << v;
    } else if (bits[v] != '1') {
      throw PreconditionError(kModule, "configuration bits must be '0' or '1'");
    }
  }
  return c;
}

PairSums pair_sums(const Configuration& sigma, const TreeIndex& t) {
  if (sigma.size != t.vertex_count()) throw PreconditionError(kModule, "configuration does not match the tree");
  PairSums s{0, 0};
  for (std::size_t id = 0; id < t.edge_count(); ++id) {
    const Edge e = t.edge(id);
    s.edges += sigma.spin(e.parent) * sigma.spin(e.child);
  }
  for (const auto& pr : t.prolonged_pairs()) s.prolonged += sigma.spin(pr.ancestor) * sigma.spin(pr.descendant);
  return s;
}

Padic hamiltonian(const Configuration& sigma, const TreeIndex& t, const CouplingParams& cp) {
  const PairSums s = pair_sums(sigma, t);
  return cp.J * Padic::from_int(s.edges, cp.ctx) + cp.J1 * Padic::from_int(s.prolonged, cp.ctx);
}

Padic boltzmann_factor(const Configuration& sigma, const TreeIndex& t, const CouplingParams& cp) {
  const PairSums s = pair_sums(sigma, t);
  return cp.a.pow(s.edges) * cp.b.pow(s.prolonged);
}

// ---------------------------------------------------------------------------
// Measures

nlohmann::json MeasureTable::to_json() const {
  nlohmann::json j;
  j["schema"] = kSchema;
  j["p"] = p;
  j["k"] = k;
  j["n"] = n;
  j["Z"] = Z.to_json();
  j["Z_norm"] = Z_norm().to_string();
  auto& entries = j["entries"] = nlohmann::json::array();
  for (std::size_t m = 0; m < values.size(); ++m) {
    const Configuration c{static_cast<std::uint64_t>(m), vertices};
    entries.push_back({{"config_bits", c.to_bits()}, {"value", values[m].to_json()}});
  }
  return j;
}

MeasureTable MeasureTable::from_json(const nlohmann::json& j, const PrimeContext& ctx) {
  if (j.at("schema").get<std::string>() != kSchema) throw PreconditionError(kModule, "unknown measure-table schema");
  MeasureTable t;
  t.p = j.at("p").get<long>();
  if (t.p != ctx.prime()) throw PreconditionError(kModule, "measure table prime mismatch");
  t.k = j.at("k").get<int>();
  t.n = j.at("n").get<int>();
  t.Z = Padic::from_json(j.at("Z"), ctx);
  const auto& entries = j.at("entries");
  if (!entries.empty()) {
    t.vertices = entries[0].at("config_bits").get<std::string>().size();
    t.values.assign(entries.size(), Padic::zero(ctx));
    for (const auto& e : entries) {
      const auto c = Configuration::from_bits(e.at("config_bits").get<std::string>());
      if (c.minus_mask >= t.values.size()) throw PreconditionError(kModule, "configuration out of range");
      t.values[c.minus_mask] = Padic::from_json(e.at("value"), ctx);
    }
  }
  return t;
}

MeasureTable measure_table_from_h(const HField& h, const TreeIndex& t, const CouplingParams& cp,
                                  MeasureOptions options) {
  const WeightKernel kernel(t, cp, h_factors(h, t));
  return enumerate_table(kernel, t, cp, options);
}

MeasureTable measure_table_from_u(const UField& u, const TreeIndex& t, const CouplingParams& cp,
                                  MeasureOptions options) {
  const WeightKernel kernel(t, cp, u_factors(u, t, cp));
  return enumerate_table(kernel, t, cp, options);
}

Padic partition_function_from_u(const UField& u, const TreeIndex& t, const CouplingParams& cp, unsigned threads) {
  const WeightKernel kernel(t, cp, u_factors(u, t, cp));
  return parallel_reduce(
      kernel.configurations(), threads, Padic::zero(cp.ctx),
      [&](Padic& acc, std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t m = begin; m < end; ++m) acc += kernel.weight(m);
      },
      [](Padic& acc, const Padic& other) { acc += other; });
}

nlohmann::json CompatibilityReport::to_json() const {
  return {{"n", n},
          {"configurations", configurations},
          {"precision", precision},
          {"min_residual_valuation", min_residual_valuation},
          {"max_residual_norm", max_residual_norm.to_string()},
          {"passes", passes()}};
}

CompatibilityReport compatibility_check(const HField& h, const TreeIndex& t, const CouplingParams& cp,
                                        unsigned threads) {
  const int n = t.depth();
  if (n < 2) throw PreconditionError(kModule, "compatibility needs depth n >= 2");
  const TreeIndex inner = TreeIndex::geometry(t.order(), n - 1);
  const WeightKernel outer_kernel(t, cp, h_factors(h, t));
  const WeightKernel inner_kernel(inner, cp, h_factors(h, inner));

  const std::uint64_t inner_count = inner_kernel.configurations();
  const std::uint64_t low_mask = inner_count - 1;
  struct Acc {
    Padic total;
    std::vector<Padic> marginal;
  };
  const Acc init{Padic::zero(cp.ctx), std::vector<Padic>(inner_count, Padic::zero(cp.ctx))};
  const Acc outer = parallel_reduce(
      outer_kernel.configurations(), threads, init,
      [&](Acc& acc, std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t m = begin; m < end; ++m) {
          const Padic w = outer_kernel.weight(m);
          acc.total += w;
          acc.marginal[m & low_mask] += w;
        }
      },
      [](Acc& acc, const Acc& other) {
        acc.total += other.total;
        for (std::size_t i = 0; i < acc.marginal.size(); ++i) acc.marginal[i] += other.marginal[i];
      });

  std::vector<Padic> inner_weights;
  Padic inner_total = Padic::zero(cp.ctx);
  for (std::uint64_t m = 0; m < inner_count; ++m) {
    inner_weights.push_back(inner_kernel.weight(m));
    inner_total += inner_weights.back();
  }
  const Padic zn = checked_div(Padic::one(cp.ctx), outer.total, "Z_n");
  const Padic zn1 = checked_div(Padic::one(cp.ctx), inner_total, "Z_{n-1}");

  CompatibilityReport report;
  report.n = n;
  report.configurations = outer_kernel.configurations();
  report.precision = cp.ctx.precision();
  report.min_residual_valuation = Padic::kInfinitePrecision;
  for (std::uint64_t m = 0; m < inner_count; ++m) {
    const Padic r = outer.marginal[m] * zn - inner_weights[m] * zn1;
    report.min_residual_valuation = std::min(report.min_residual_valuation, r.valuation_lower_bound());
  }
  report.max_residual_norm = report.min_residual_valuation >= Padic::kInfinitePrecision
                                 ? Norm::zero_norm(cp.prime())
                                 : Norm::of_valuation(cp.prime(), report.min_residual_valuation);
  return report;
}

// ---------------------------------------------------------------------------
// u <-> h and the recurrence

UTriple u_from_h(const HQuadruple& h, const CouplingParams& cp) {
  for (const Padic* c : {&h.pp, &h.pm, &h.mp, &h.mm}) {
    if (c->is_zero()) throw PreconditionError(kModule, "h component vanishes");
  }
  return UTriple{cp.a2 * h.pp * h.mp, cp.a2 * h.mm * h.mp, cp.a2 * h.pp * h.pm};
}

HQuadruple h_from_u(const UTriple& u, const Padic& f, const CouplingParams& cp) {
  if (f.is_zero()) throw PreconditionError(kModule, "gauge h_{++} must be nonzero");
  for (const Padic* c : {&u.u1, &u.u2, &u.u3}) {
    if (c->is_zero()) throw PreconditionError(kModule, "u component vanishes");
  }
  const Padic a2f = cp.a2 * f;
  return HQuadruple{f, u.u3 / a2f, u.u1 / a2f, u.u2 * f / u.u1};
}

UTriple recurrence_edge(std::span<const UTriple> children, const CouplingParams& cp) {
  if (children.empty()) throw PreconditionError(kModule, "an interior edge needs successors");
  const Padic one = Padic::one(cp.ctx);
  Padic p1 = cp.a2;
  Padic p2 = cp.a2;
  Padic p3 = cp.a2;
  for (std::size_t i = 0; i < children.size(); ++i) {
    const UTriple& c = children[i];
    const std::string at = " (successor " + std::to_string(i) + ")";
    const Padic n3 = cp.b2 * c.u3 + one;
    const Padic d3 = c.u3 + cp.b2;
    p1 *= checked_div(n3, d3, "u3 + b^2" + at);
    p2 *= checked_div((cp.b2 * c.u2 + one) * c.u3, d3 * c.u1, "(u3 + b^2) u1" + at);
    p3 *= checked_div(n3 * c.u1, (c.u2 + cp.b2) * c.u3, "(u2 + b^2) u3" + at);
  }
  return UTriple{p1, p2, p3};
}

void recurrence_step(UField& field, const TreeIndex& t, int m, const CouplingParams& cp) {
  if (m < 1 || m >= t.depth()) throw PreconditionError(kModule, "generation must lie in [1, n-1]");
  if (field.size() != t.edge_count()) throw PreconditionError(kModule, "field is not edge-indexed");
  const auto [first, last] = t.generation(m);
  std::vector<UTriple> children;
  for (std::size_t id = first; id < last; ++id) {
    children.clear();
    for (std::size_t c : t.child_edges(id + 1)) children.push_back(field[c]);
    try {
      field[id] = recurrence_edge(children, cp);
    } catch (const PreconditionError& e) {
      throw PreconditionError(kModule, std::string(e.what()) + " at edge " + std::to_string(id));
    }
  }
}

UTriple ti_map(const UTriple& u, const CouplingParams& cp) {
  std::vector<UTriple> children(static_cast<std::size_t>(cp.k), u);
  return recurrence_edge(children, cp);
}

mpq_class parse_coupling(std::string_view text, long p) {
  auto fail = [&](const std::string& why) -> mpq_class {
    throw PreconditionError("cli", "bad coupling '" + std::string(text) + "': " + why);
  };
  std::string s;
  for (char c : text) {
    if (c != ' ') s += c;
  }
  if (s.empty()) return fail("empty");
  const auto caret = s.find('^');
  if (caret != std::string::npos) {
    const std::string base = s.substr(0, caret);
    if (base != "p" && base != std::to_string(p)) return fail("base must be p or " + std::to_string(p));
    const auto star = s.find('*', caret);
    const std::string exp_text = s.substr(caret + 1, star == std::string::npos ? std::string::npos : star - caret - 1);
    long e = 0;
    auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), e);
    if (ec != std::errc() || ptr != exp_text.data() + exp_text.size() || e < 0) return fail("bad exponent");
    mpz_class unit = 1;
    if (star != std::string::npos) {
      if (unit.set_str(s.substr(star + 1), 10) != 0) return fail("unit must be an integer");
      if (unit == 0 || mpz_divisible_ui_p(unit.get_mpz_t(), static_cast<unsigned long>(p))) {
        return fail("u must be a p-adic unit");
      }
    }
    mpz_class pe;
    mpz_ui_pow_ui(pe.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e));
    return mpq_class(pe * unit);
  }
  mpq_class q;
  if (q.set_str(s, 10) != 0) return fail("expected m/n, an integer or p^e*u");
  if (q.get_den() == 0) return fail("zero denominator");
  q.canonicalize();
  return q;
}

}  // namespace pivm
