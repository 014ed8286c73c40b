#include "pivm/tree.hpp"

#include <algorithm>

namespace pivm {

namespace {

constexpr const char* kModule = "cayley-tree";
constexpr std::size_t kMaxVertices = std::size_t{1} << 26;

}  // namespace

std::string Vertex::to_string() const {
  if (word.empty()) return "x0";
  std::string s = "(";
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(word[i]);
  }
  return s + ")";
}

Vertex translate(const Vertex& g, const Vertex& x) {
  Vertex r = g;
  r.word.insert(r.word.end(), x.word.begin(), x.word.end());
  return r;
}

std::uint64_t nonroot_vertex_count(int k, int n) {
  std::uint64_t total = 0;
  std::uint64_t level = 1;
  for (int m = 1; m <= n; ++m) {
    level *= static_cast<std::uint64_t>(k);
    total += level;
  }
  return total;
}

TreeIndex::TreeIndex(int k, int n) : k_(k), n_(n) {
  if (k < 2) throw PreconditionError(kModule, "tree order k must be at least 2");
  if (n < 1) throw PreconditionError(kModule, "depth n must be at least 1");
  std::size_t size = 1;
  level_start_.push_back(0);
  for (int m = 0; m <= n; ++m) {
    level_start_.push_back(level_start_.back() + size);
    if (level_start_.back() > kMaxVertices) throw PreconditionError(kModule, "tree too large to index");
    size *= static_cast<std::size_t>(k);
  }
  for (std::size_t v = level_start(2); v < vertex_count(); ++v) {
    pairs_.push_back(ProlongedPair{parent(parent(v)), v});
  }
}

TreeIndex TreeIndex::geometry(int k, int n) { return TreeIndex(k, n); }

TreeIndex TreeIndex::build(int k, int n, std::uint64_t budget) {
  TreeIndex t(k, n);
  const std::size_t bits = t.vertex_count();
  if (bits >= 63 || (std::uint64_t{1} << bits) > budget) {
    throw PreconditionError(kModule, "2^" + std::to_string(bits) +
                                         " configurations exceed the enumeration budget of " +
                                         std::to_string(budget));
  }
  return t;
}

int TreeIndex::level_of(std::size_t v) const {
  if (v >= vertex_count()) throw PreconditionError(kModule, "vertex index out of range");
  const auto it = std::upper_bound(level_start_.begin(), level_start_.end(), v);
  return static_cast<int>(it - level_start_.begin()) - 1;
}

std::size_t TreeIndex::parent(std::size_t v) const {
  if (v == 0) throw PreconditionError(kModule, "the root has no parent");
  if (v >= vertex_count()) throw PreconditionError(kModule, "vertex index out of range");
  return (v - 1) / static_cast<std::size_t>(k_);
}

std::vector<std::size_t> TreeIndex::successors(std::size_t v) const {
  std::vector<std::size_t> out;
  if (level_of(v) == n_) return out;
  const auto k = static_cast<std::size_t>(k_);
  for (std::size_t i = 1; i <= k; ++i) out.push_back(k * v + i);
  return out;
}

std::pair<std::size_t, std::size_t> TreeIndex::generation(int m) const {
  if (m < 1 || m > n_) throw PreconditionError(kModule, "generation out of range");
  return {level_start(m) - 1, level_start(m + 1) - 1};
}

std::vector<std::size_t> TreeIndex::child_edges(std::size_t y) const {
  std::vector<std::size_t> out;
  for (std::size_t z : successors(y)) out.push_back(z - 1);
  return out;
}

Vertex TreeIndex::vertex(std::size_t v) const {
  Vertex x;
  const auto k = static_cast<std::size_t>(k_);
  while (v > 0) {
    x.word.push_back(static_cast<int>((v - 1) % k) + 1);
    v = (v - 1) / k;
  }
  std::reverse(x.word.begin(), x.word.end());
  return x;
}

std::size_t TreeIndex::index_of(const Vertex& x) const {
  if (x.level() > static_cast<std::size_t>(n_)) throw PreconditionError(kModule, "vertex beyond the built depth");
  std::size_t v = 0;
  const auto k = static_cast<std::size_t>(k_);
  for (int i : x.word) {
    if (i < 1 || i > k_) throw PreconditionError(kModule, "letter outside {1..k}");
    v = k * v + static_cast<std::size_t>(i);
  }
  return v;
}

std::size_t TreeIndex::shift(std::size_t g, std::size_t x) const {
  const int lx = level_of(x);
  if (level_of(g) + lx > n_) throw PreconditionError(kModule, "translation leaves the built depth");
  // The digits of x below the root are appended to g.
  std::size_t r = g;
  const Vertex w = vertex(x);
  const auto k = static_cast<std::size_t>(k_);
  for (int i : w.word) r = k * r + static_cast<std::size_t>(i);
  return r;
}

nlohmann::json TreeIndex::to_json() const {
  nlohmann::json j;
  j["k"] = k_;
  j["depth"] = n_;
  auto& vs = j["vertices"] = nlohmann::json::array();
  for (std::size_t v = 0; v < vertex_count(); ++v) {
    vs.push_back({{"index", v}, {"word", vertex(v).word}, {"level", level_of(v)}});
  }
  auto& es = j["edges"] = nlohmann::json::array();
  for (std::size_t id = 0; id < edge_count(); ++id) {
    const Edge e = edge(id);
    es.push_back({{"id", id}, {"parent", e.parent}, {"child", e.child}});
  }
  auto& ps = j["prolonged_pairs"] = nlohmann::json::array();
  for (const auto& pr : pairs_) ps.push_back({pr.ancestor, pr.descendant});
  return j;
}

}  // namespace pivm
