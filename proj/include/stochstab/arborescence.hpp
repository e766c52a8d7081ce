#pragma once

#include "stochstab/errors.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace stochstab {

/// Dense directed graph with optional edge weights, templated on the weight
/// scalar (an exact integer or rational type).
template <class Weight>
class DenseDigraph {
 public:
  DenseDigraph() = default;
  explicit DenseDigraph(std::size_t n) : n_(n), weight_(n * n), present_(n * n, 0) {}

  std::size_t size() const { return n_; }
  bool has(std::size_t from, std::size_t to) const { return present_[from * n_ + to] != 0; }
  const Weight& at(std::size_t from, std::size_t to) const { return weight_[from * n_ + to]; }
  void set(std::size_t from, std::size_t to, Weight w) {
    weight_[from * n_ + to] = std::move(w);
    present_[from * n_ + to] = 1;
  }
  void erase(std::size_t from, std::size_t to) { present_[from * n_ + to] = 0; }

 private:
  std::size_t n_ = 0;
  std::vector<Weight> weight_;
  std::vector<char> present_;
};

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

/// A spanning tree directed towards `root`: every other node has exactly one
/// out-edge (to `parent[v]`) and a unique path to the root.
template <class Weight>
struct InArborescence {
  std::size_t root = 0;
  std::vector<std::size_t> parent;  // parent[root] == kNoParent
  Weight total{};
};

namespace detail {

// Chu-Liu/Edmonds for in-trees on a dense graph. Each non-root node picks its
// cheapest out-edge; every cycle among the picks is contracted (all cycles of
// a round at once) with out-edges of a cycle member u re-weighted by
// w(u,x) - w(u,pick(u)); the contracted problem is solved recursively and
// expanded. Returns parent pointers.
template <class Weight>
std::vector<std::size_t> chu_liu_edmonds(const DenseDigraph<Weight>& g, std::size_t root) {
  const std::size_t n = g.size();
  std::vector<std::size_t> pick(n, kNoParent);
  for (std::size_t v = 0; v < n; ++v) {
    if (v == root) continue;
    for (std::size_t u = 0; u < n; ++u) {
      if (u == v || !g.has(v, u)) continue;
      if (pick[v] == kNoParent || g.at(v, u) < g.at(v, pick[v])) pick[v] = u;
    }
    if (pick[v] == kNoParent) throw Unreachable(v);
  }

  // Cycles of the pick function.
  std::vector<std::size_t> cycle_of(n, kNoParent);
  std::vector<std::size_t> mark(n, kNoParent);
  std::size_t cycles = 0;
  for (std::size_t start = 0; start < n; ++start) {
    std::size_t v = start;
    while (v != root && mark[v] == kNoParent && cycle_of[v] == kNoParent) {
      mark[v] = start;
      v = pick[v];
    }
    if (v != root && mark[v] == start && cycle_of[v] == kNoParent) {
      for (std::size_t w = v; cycle_of[w] == kNoParent; w = pick[w]) cycle_of[w] = cycles;
      ++cycles;
    }
  }
  if (cycles == 0) return pick;

  // Component ids: cycles first, then every node outside a cycle.
  std::vector<std::size_t> comp(n);
  std::size_t next = cycles;
  for (std::size_t v = 0; v < n; ++v) comp[v] = cycle_of[v] != kNoParent ? cycle_of[v] : next++;
  const std::size_t m = next;

  DenseDigraph<Weight> h(m);
  std::vector<std::size_t> origin_from(m * m, kNoParent);
  std::vector<std::size_t> origin_to(m * m, kNoParent);
  for (std::size_t u = 0; u < n; ++u) {
    if (u == root) continue;
    const std::size_t cu = comp[u];
    for (std::size_t x = 0; x < n; ++x) {
      if (x == u || !g.has(u, x)) continue;
      const std::size_t cx = comp[x];
      if (cu == cx) continue;
      Weight w = g.at(u, x);
      if (cycle_of[u] != kNoParent) w -= g.at(u, pick[u]);
      if (!h.has(cu, cx) || w < h.at(cu, cx)) {
        h.set(cu, cx, std::move(w));
        origin_from[cu * m + cx] = u;
        origin_to[cu * m + cx] = x;
      }
    }
  }

  const std::size_t contracted_root = comp[root];
  const auto sub = chu_liu_edmonds(h, contracted_root);

  std::vector<std::size_t> parent(n, kNoParent);
  for (std::size_t v = 0; v < n; ++v) {
    if (cycle_of[v] != kNoParent) parent[v] = pick[v];
  }
  for (std::size_t c = 0; c < m; ++c) {
    if (c == contracted_root) continue;
    const std::size_t u = origin_from[c * m + sub[c]];
    parent[u] = origin_to[c * m + sub[c]];
  }
  parent[root] = kNoParent;
  return parent;
}

}  // namespace detail

/// First node with no path to `root` along present edges, or kNoParent.
template <class Weight>
std::size_t first_unreachable(const DenseDigraph<Weight>& g, std::size_t root) {
  const std::size_t n = g.size();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{root};
  seen[root] = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (std::size_t u = 0; u < n; ++u) {
      if (!seen[u] && u != v && g.has(u, v)) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!seen[v]) return v;
  }
  return kNoParent;
}

/// Minimum-weight spanning in-arborescence rooted at `root`.
/// Throws Unreachable when some node has no path to the root.
template <class Weight>
InArborescence<Weight> min_in_arborescence(const DenseDigraph<Weight>& g, std::size_t root) {
  if (root >= g.size()) throw InvalidParams("arborescence root out of range");
  if (const auto v = first_unreachable(g, root); v != kNoParent) throw Unreachable(v);
  InArborescence<Weight> tree;
  tree.root = root;
  tree.parent = detail::chu_liu_edmonds(g, root);
  tree.total = Weight{};
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (v != root) tree.total += g.at(v, tree.parent[v]);
  }
  return tree;
}

/// Total weight of the minimum in-arborescence without the tree itself, in
/// O(n^2): a path is grown along cheapest out-edges; a cycle on the path is
/// merged into one node whose row is min over members of w(u,x) - pick(u);
/// the path is frozen once it reaches the root's component. Rows stay indexed
/// by original target, so merging never touches columns.
template <class Weight>
Weight min_in_arborescence_weight(const DenseDigraph<Weight>& g, std::size_t root) {
  const std::size_t n = g.size();
  if (root >= n) throw InvalidParams("arborescence root out of range");
  if (const auto v = first_unreachable(g, root); v != kNoParent) throw Unreachable(v);

  std::vector<std::size_t> up(n);
  for (std::size_t v = 0; v < n; ++v) up[v] = v;
  auto find = [&](std::size_t v) {
    while (up[v] != v) v = up[v] = up[up[v]];
    return v;
  };
  std::vector<std::vector<Weight>> row(n);
  std::vector<std::vector<char>> has(n);
  for (std::size_t u = 0; u < n; ++u) {
    if (u == root) continue;
    row[u].resize(n);
    has[u].assign(n, 0);
    for (std::size_t x = 0; x < n; ++x) {
      if (x != u && g.has(u, x)) {
        row[u][x] = g.at(u, x);
        has[u][x] = 1;
      }
    }
  }

  std::vector<char> done(n, 0);
  std::vector<char> on_path(n, 0);
  std::vector<Weight> picked(n);
  std::vector<std::size_t> path;
  done[root] = 1;
  Weight total{};
  for (std::size_t start = 0; start < n; ++start) {
    std::size_t c = find(start);
    while (!done[c]) {
      on_path[c] = 1;
      path.push_back(c);
      std::size_t best = kNoParent;
      for (std::size_t x = 0; x < n; ++x) {
        if (has[c][x] && find(x) != c && (best == kNoParent || row[c][x] < row[c][best])) best = x;
      }
      if (best == kNoParent) throw Unreachable(c);
      picked[c] = row[c][best];
      total += picked[c];
      const std::size_t next = find(best);
      if (done[next]) {
        for (auto p : path) {
          done[p] = 1;
          on_path[p] = 0;
        }
        path.clear();
        break;
      }
      if (!on_path[next]) {
        c = next;
        continue;
      }
      // Cycle next -> ... -> c: merge it into `next`.
      std::vector<Weight> merged(n);
      std::vector<char> merged_has(n, 0);
      std::size_t member;
      do {
        member = path.back();
        path.pop_back();
        on_path[member] = 0;
        for (std::size_t x = 0; x < n; ++x) {
          if (!has[member][x]) continue;
          Weight w = row[member][x] - picked[member];
          if (!merged_has[x] || w < merged[x]) {
            merged[x] = std::move(w);
            merged_has[x] = 1;
          }
        }
        up[member] = next;
        if (member != next) {
          row[member].clear();
          has[member].clear();
        }
      } while (member != next);
      up[next] = next;
      row[next] = std::move(merged);
      has[next] = std::move(merged_has);
      c = next;
    }
  }
  return total;
}

inline constexpr std::size_t kBruteForceLimit = 8;

/// Exhaustive minimum over all parent-pointer maps that form an in-tree.
/// Only for tiny graphs (at most 8 nodes); used as an oracle.
template <class Weight>
Weight brute_force_arborescence(const DenseDigraph<Weight>& g, std::size_t root) {
  const std::size_t n = g.size();
  if (n > kBruteForceLimit) throw InvalidParams("brute-force arborescence is limited to 8 nodes");
  if (root >= n) throw InvalidParams("arborescence root out of range");
  std::vector<std::size_t> others;
  for (std::size_t v = 0; v < n; ++v) {
    if (v != root) others.push_back(v);
  }
  if (others.empty()) return Weight{};

  std::vector<std::size_t> parent(n, kNoParent);
  std::vector<std::size_t> digit(others.size(), 0);
  bool found = false;
  Weight best{};
  while (true) {
    bool valid = true;
    for (std::size_t k = 0; k < others.size() && valid; ++k) {
      parent[others[k]] = digit[k];
      valid = digit[k] != others[k] && g.has(others[k], digit[k]);
    }
    if (valid) {
      for (auto v : others) {
        std::size_t at = v;
        std::size_t hops = 0;
        while (at != root && hops <= n) {
          at = parent[at];
          ++hops;
        }
        if (at != root) {
          valid = false;
          break;
        }
      }
    }
    if (valid) {
      Weight total{};
      for (auto v : others) total += g.at(v, parent[v]);
      if (!found || total < best) {
        best = total;
        found = true;
      }
    }
    std::size_t k = 0;
    while (k < digit.size() && ++digit[k] == n) digit[k++] = 0;
    if (k == digit.size()) break;
  }
  if (!found) throw Unreachable(others.front());
  return best;
}

}  // namespace stochstab
