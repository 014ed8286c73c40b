#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "pivm/error.hpp"

namespace pivm {

/// A vertex of the semi-infinite Cayley tree as a word over {1, ..., k}; the
/// empty word is the root.
struct Vertex {
  std::vector<int> word;

  std::size_t level() const noexcept { return word.size(); }
  std::string to_string() const;

  friend bool operator==(const Vertex&, const Vertex&) = default;
  friend auto operator<=>(const Vertex& a, const Vertex& b) {
    if (a.word.size() != b.word.size()) return a.word.size() <=> b.word.size();
    return a.word <=> b.word;
  }
};

/// Word concatenation g o x.
Vertex translate(const Vertex& g, const Vertex& x);

struct Edge {
  std::size_t parent;
  std::size_t child;
};

struct ProlongedPair {
  std::size_t ancestor;    ///< level m - 2
  std::size_t descendant;  ///< level m
};

/// Geometry of the Cayley tree of order k down to depth n. Vertices are
/// numbered in breadth-first order, children of i being k i + 1, ..., k i + k,
/// so the vertices of depth n - 1 form a prefix of those of depth n. The edge
/// into vertex i >= 1 has id i - 1.
class TreeIndex {
 public:
  static constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 22;

  /// Tree whose configuration space (root included) fits the enumeration budget.
  static TreeIndex build(int k, int n, std::uint64_t budget = kDefaultBudget);
  /// Geometry only, no configuration guard.
  static TreeIndex geometry(int k, int n);

  int order() const noexcept { return k_; }
  int depth() const noexcept { return n_; }

  /// |W_0| + ... + |W_n|: all vertices including the root.
  std::size_t vertex_count() const noexcept { return level_start_.back(); }
  /// |V_n|: vertices excluding the root.
  std::size_t nonroot_count() const noexcept { return vertex_count() - 1; }
  std::size_t level_start(int m) const { return level_start_.at(static_cast<std::size_t>(m)); }
  std::size_t level_size(int m) const { return level_start(m + 1) - level_start(m); }
  int level_of(std::size_t v) const;

  std::size_t parent(std::size_t v) const;
  /// S(x): the k direct successors, empty on the last level.
  std::vector<std::size_t> successors(std::size_t v) const;

  std::size_t edge_count() const noexcept { return nonroot_count(); }
  Edge edge(std::size_t id) const { return Edge{parent(id + 1), id + 1}; }
  /// Edges whose child lies on level m (the set L_m minus L_{m-1}).
  std::pair<std::size_t, std::size_t> generation(int m) const;
  /// Edges from child y to its successors.
  std::vector<std::size_t> child_edges(std::size_t y) const;

  const std::vector<ProlongedPair>& prolonged_pairs() const noexcept { return pairs_; }

  Vertex vertex(std::size_t v) const;
  std::size_t index_of(const Vertex& x) const;

  /// Checks value(tau_g(l)) == value(l) for every generator g of G_m (words of
  /// length m) and every edge l whose image stays within depth.
  template <class T, class Eq = std::equal_to<>>
  bool is_Gm_periodic(const std::vector<T>& field, int m, Eq eq = {}) const {
    if (m < 1) throw PreconditionError("cayley-tree", "period must be positive");
    if (field.size() != edge_count()) throw PreconditionError("cayley-tree", "field is not edge-indexed");
    if (m > n_) throw PreconditionError("cayley-tree", "period exceeds the built depth");
    for (std::size_t g = level_start(m); g < level_start(m + 1); ++g) {
      for (std::size_t id = 0; id < edge_count(); ++id) {
        const Edge e = edge(id);
        if (level_of(e.child) + m > n_) continue;
        const std::size_t image = shift(g, e.child);
        if (!eq(field[image - 1], field[id])) return false;
      }
    }
    return true;
  }

  nlohmann::json to_json() const;

 private:
  TreeIndex(int k, int n);
  /// Index of g o x.
  std::size_t shift(std::size_t g, std::size_t x) const;

  int k_;
  int n_;
  std::vector<std::size_t> level_start_;
  std::vector<ProlongedPair> pairs_;
};

/// |V_n| = k (k^n - 1) / (k - 1).
std::uint64_t nonroot_vertex_count(int k, int n);

}  // namespace pivm
