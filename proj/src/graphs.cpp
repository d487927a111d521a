#include "dlab/graphs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>

#include "dlab/duals.hpp"
#include "dlab/rng.hpp"

namespace dlab {

bool strongly_distinct(const RTuple& t) {
  for (std::size_t a = 0; a < t.size(); ++a)
    for (std::size_t b = a + 1; b < t.size(); ++b) {
      if (t[a].dim() != t[b].dim()) throw UsageError("tuple mixes dimensions");
      for (int j = 0; j < t[a].dim(); ++j)
        if (t[a][j] == t[b][j]) return false;
    }
  return true;
}

CoincidenceGraph::CoincidenceGraph(std::vector<int> v) : vertices(std::move(v)) {
  std::sort(vertices.begin(), vertices.end());
  if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end())
    throw UsageError("repeated vertex label");
  for (int x : vertices)
    if (x < 1) throw UsageError("vertex labels start at 1");
}

const std::set<std::pair<int, int>>& CoincidenceGraph::edges(int color) const {
  if (color == 2) return edges2;
  if (color == 3) return edges3;
  throw UsageError("edge color must be 2 or 3");
}

void CoincidenceGraph::add_edge(int color, int a, int b) {
  if (a == b) throw UsageError("self loops are not edges");
  if (!std::binary_search(vertices.begin(), vertices.end(), a) ||
      !std::binary_search(vertices.begin(), vertices.end(), b))
    throw UsageError("edge endpoint is not a vertex");
  auto e = std::minmax(a, b);
  (color == 2 ? edges2 : color == 3 ? edges3 : throw UsageError("edge color must be 2 or 3")).insert(e);
}

bool CoincidenceGraph::has_edge(int color, int a, int b) const { return edges(color).count(std::minmax(a, b)) > 0; }

bool CoincidenceGraph::contains(const CoincidenceGraph& other) const {
  return vertices == other.vertices && std::includes(edges2.begin(), edges2.end(), other.edges2.begin(), other.edges2.end()) &&
         std::includes(edges3.begin(), edges3.end(), other.edges3.begin(), other.edges3.end());
}

namespace {

std::size_t vertex_index(const CoincidenceGraph& G, int label) {
  auto it = std::lower_bound(G.vertices.begin(), G.vertices.end(), label);
  return static_cast<std::size_t>(it - G.vertices.begin());
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

std::vector<std::vector<int>> components(const CoincidenceGraph& G, std::initializer_list<int> colors) {
  UnionFind uf(G.vertices.size());
  for (int c : colors)
    for (const auto& [a, b] : G.edges(c)) uf.unite(vertex_index(G, a), vertex_index(G, b));
  std::map<std::size_t, std::vector<int>> groups;
  for (std::size_t i = 0; i < G.vertices.size(); ++i) groups[uf.find(i)].push_back(G.vertices[i]);
  std::vector<std::vector<int>> out;
  for (auto& [root, g] : groups) out.push_back(std::move(g));
  std::sort(out.begin(), out.end());
  return out;
}

bool overlap_ok(const CoincidenceGraph& G) {
  for (const auto& q2 : cliques(G, 2))
    for (const auto& q3 : cliques(G, 3)) {
      int common = 0;
      for (int v : q2) common += std::binary_search(q3.begin(), q3.end(), v);
      if (common > 1) return false;
    }
  return true;
}

// Replace each color's edges by the complete graph on its components.
void close_cliques(CoincidenceGraph& G) {
  for (int c : {2, 3}) {
    for (const auto& q : cliques(G, c))
      for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = i + 1; j < q.size(); ++j) G.add_edge(c, q[i], q[j]);
  }
}

// Set partitions of {0..k-1} as restricted growth strings.
std::vector<std::vector<int>> set_partitions(int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(static_cast<std::size_t>(k), 0);
  std::function<void(int, int)> rec = [&](int i, int mx) {
    if (i == k) {
      out.push_back(a);
      return;
    }
    for (int b = 0; b <= mx + 1; ++b) {
      a[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(mx, b));
    }
  };
  if (k == 0)
    out.push_back({});
  else
    rec(1, 0);
  return out;
}

}  // namespace

std::vector<std::vector<int>> cliques(const CoincidenceGraph& G, int color) {
  auto comps = components(G, {color});
  std::erase_if(comps, [](const auto& c) { return c.size() < 2; });
  return comps;
}

bool is_admissible(const CoincidenceGraph& G) {
  if (G.vertices.empty()) return false;
  std::set<int> covered;
  for (int c : {2, 3})
    for (const auto& q : cliques(G, c)) {
      for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = i + 1; j < q.size(); ++j)
          if (!G.has_edge(c, q[i], q[j])) return false;
      covered.insert(q.begin(), q.end());
    }
  return covered.size() == G.vertices.size() && overlap_ok(G);
}

bool is_connected(const CoincidenceGraph& G) { return !G.vertices.empty() && components(G, {2, 3}).size() == 1; }

CoincidenceGraph graph_from_tuple(const RTuple& t, std::vector<int> labels) {
  if (labels.empty()) {
    labels.resize(t.size());
    std::iota(labels.begin(), labels.end(), 1);
  }
  if (labels.size() != t.size()) throw UsageError("one label per tuple entry");
  if (!std::is_sorted(labels.begin(), labels.end())) throw UsageError("labels must be increasing");
  CoincidenceGraph G(labels);
  for (std::size_t a = 0; a < t.size(); ++a) {
    if (t[a].dim() != 3) throw UsageError("coincidence graphs are built from three-dimensional shapes");
    for (std::size_t b = a + 1; b < t.size(); ++b) {
      if (t[a] == t[b]) throw UsageError("tuple contains two equal vectors");
      if (t[a][1] == t[b][1]) G.add_edge(2, labels[a], labels[b]);
      if (t[a][2] == t[b][2]) G.add_edge(3, labels[a], labels[b]);
    }
  }
  return G;
}

bool membership(const RTuple& t, const CoincidenceGraph& G) {
  if (t.size() != G.vertices.size()) throw UsageError("tuple length does not match the vertex set");
  for (int c : {2, 3})
    for (const auto& [a, b] : G.edges(c))
      if (t[vertex_index(G, a)][c - 1] != t[vertex_index(G, b)][c - 1]) return false;
  return true;
}

std::optional<CoincidenceGraph> wedge(const CoincidenceGraph& a, const CoincidenceGraph& b) {
  if (a.vertices != b.vertices) throw UsageError("wedge needs a common vertex set");
  CoincidenceGraph G = a;
  G.edges2.insert(b.edges2.begin(), b.edges2.end());
  G.edges3.insert(b.edges3.begin(), b.edges3.end());
  close_cliques(G);
  if (!is_admissible(G)) return std::nullopt;
  return G;
}

CoincidenceGraph disjoint_union(const CoincidenceGraph& a, const CoincidenceGraph& b) {
  std::vector<int> v = a.vertices;
  v.insert(v.end(), b.vertices.begin(), b.vertices.end());
  CoincidenceGraph G(v);
  for (const auto* part : {&a, &b}) {
    G.edges2.insert(part->edges2.begin(), part->edges2.end());
    G.edges3.insert(part->edges3.begin(), part->edges3.end());
  }
  return G;
}

std::vector<CoincidenceGraph> admissible_graphs(const std::vector<int>& V) {
  const CoincidenceGraph base(V);
  const int k = static_cast<int>(base.vertices.size());
  const auto parts = set_partitions(k);
  std::vector<CoincidenceGraph> out;
  for (const auto& p2 : parts)
    for (const auto& p3 : parts) {
      CoincidenceGraph G = base;
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
          if (p2[ui] == p2[uj]) G.add_edge(2, base.vertices[ui], base.vertices[uj]);
          if (p3[ui] == p3[uj]) G.add_edge(3, base.vertices[ui], base.vertices[uj]);
        }
      if (is_admissible(G)) out.push_back(std::move(G));
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CoincidenceGraph> connected_admissible_graphs(const std::vector<int>& V) {
  auto all = admissible_graphs(V);
  std::erase_if(all, [](const CoincidenceGraph& G) { return !is_connected(G); });
  return all;
}

std::vector<CoincidenceGraph> primes(const std::vector<int>& V) {
  const auto all = admissible_graphs(V);
  std::vector<CoincidenceGraph> out;
  for (const auto& G : all) {
    std::vector<const CoincidenceGraph*> below;
    for (const auto& H : all)
      if (H != G && G.contains(H)) below.push_back(&H);
    bool prime = true;
    for (std::size_t i = 0; i < below.size() && prime; ++i)
      for (std::size_t j = i + 1; j < below.size() && prime; ++j) {
        auto w = wedge(*below[i], *below[j]);
        if (w && *w == G) prime = false;
      }
    if (prime) out.push_back(G);
  }
  return out;
}

std::map<CoincidenceGraph, int> prime_grading(const std::vector<int>& V) {
  const auto P = primes(V);
  std::map<CoincidenceGraph, int> grade;
  std::set<CoincidenceGraph> frontier(P.begin(), P.end());
  for (const auto& G : P) grade[G] = 0;
  for (int level = 1; !frontier.empty(); ++level) {
    std::set<CoincidenceGraph> next;
    for (const auto& W : frontier)
      for (const auto& p : P) {
        auto w = wedge(W, p);
        if (w && !grade.count(*w)) {
          grade[*w] = level;
          next.insert(*w);
        }
      }
    frontier = std::move(next);
  }
  return grade;
}

std::map<CoincidenceGraph, long long> mobius_coefficients(const std::vector<int>& V) {
  auto all = admissible_graphs(V);
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.edge_count() < b.edge_count(); });
  std::map<CoincidenceGraph, long long> mu;
  for (const auto& G : all) {
    long long below = 0;
    for (const auto& [H, c] : mu)
      if (H != G && G.contains(H)) below += c;
    mu[G] = 1 - below;
  }
  return mu;
}

BeckExponent beck_exponent(const CoincidenceGraph& G) {
  if (!is_admissible(G)) throw UsageError("graph is not admissible");
  if (!is_connected(G)) throw UsageError("graph is not connected");
  const auto nv = static_cast<long long>(G.vertices.size());
  BeckExponent out;
  if (nv <= 3) {
    out.exponent = Rational(-1, 4);
    out.tabulated = true;
    return out;
  }
  // clique id of each vertex per color, -1 if none
  std::map<int, std::array<int, 2>> clique_of;
  for (int v : G.vertices) clique_of[v] = {-1, -1};
  std::vector<std::vector<int>> all;
  for (int c : {2, 3})
    for (const auto& q : cliques(G, c)) {
      for (int v : q) clique_of[v][static_cast<std::size_t>(c - 2)] = static_cast<int>(all.size());
      all.push_back(q);
    }
  std::set<int> fixed, first_known;
  auto known_coords = [&](int v) {
    int k = first_known.count(v) ? 1 : 0;
    for (int id : clique_of[v]) k += id >= 0 && fixed.count(id);
    return k;
  };
  for (;;) {
    int pick = -1;
    for (auto it = G.vertices.rbegin(); it != G.vertices.rend(); ++it)
      if (known_coords(*it) < 2) {
        pick = *it;
        break;
      }
    if (pick < 0) break;
    const bool touched = known_coords(pick) > 0;
    (touched ? out.v12 : out.v32).push_back(pick);
    first_known.insert(pick);
    for (int id : clique_of[pick])
      if (id >= 0) fixed.insert(id);
  }
  const auto a = static_cast<long long>(out.v32.size()), b = static_cast<long long>(out.v12.size());
  out.exponent = Rational(3 * a + b - 2 * nv, 2 * nv);
  return out;
}

std::vector<ShapeVector> block_shapes(int n, int q, int label) {
  const auto blocks = beck_blocks(n, q);
  if (label < 1 || label > q) throw UsageError("block label must lie in 1..q");
  const auto [lo, hi] = blocks[static_cast<std::size_t>(label - 1)];
  std::vector<ShapeVector> out;
  for (const auto& r : hyperbolic_index(n, 3))
    if (r[0] >= lo && r[0] <= hi) out.push_back(r);
  return out;
}

CollectionKind parse_collection(const std::string& name) {
  static const std::map<std::string, CollectionKind> names{
      {"C2", CollectionKind::C2},     {"C2b", CollectionKind::C2b}, {"X1", CollectionKind::X1},
      {"B4", CollectionKind::B4},     {"B4a", CollectionKind::B4a}, {"Bmax", CollectionKind::Bmax},
      {"B1", CollectionKind::B1},     {"B3", CollectionKind::B3},   {"NSD", CollectionKind::NSD}};
  auto it = names.find(name);
  if (it == names.end()) throw UsageError("unknown collection kind: " + name);
  return it->second;
}

std::string collection_name(CollectionKind k) {
  switch (k) {
    case CollectionKind::C2: return "C2";
    case CollectionKind::C2b: return "C2b";
    case CollectionKind::X1: return "X1";
    case CollectionKind::B4: return "B4";
    case CollectionKind::B4a: return "B4a";
    case CollectionKind::Bmax: return "Bmax";
    case CollectionKind::B1: return "B1";
    case CollectionKind::B3: return "B3";
    case CollectionKind::NSD: return "NSD";
  }
  return "?";
}

namespace {

// Vectors attaining the maximum of coordinate j.
std::vector<std::size_t> argmax_set(const RTuple& t, int j) {
  int best = -1;
  for (const auto& r : t) best = std::max(best, r[j]);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i][j] == best) out.push_back(i);
  return out;
}

bool some_pair_agrees(const RTuple& t, int j) {
  for (std::size_t a = 0; a < t.size(); ++a)
    for (std::size_t b = a + 1; b < t.size(); ++b)
      if (t[a][j] == t[b][j]) return true;
  return false;
}

bool all_distinct(const RTuple& t) {
  for (std::size_t a = 0; a < t.size(); ++a)
    for (std::size_t b = a + 1; b < t.size(); ++b)
      if (t[a] == t[b]) return false;
  return true;
}

bool four_tuple_filter(const CollectionSpec& spec, const RTuple& t) {
  if (!all_distinct(t)) return false;
  if (spec.kind == CollectionKind::B4a)
    return t[0][1] == spec.fixed && t[2][1] == spec.fixed && some_pair_agrees(t, 2);
  if (!some_pair_agrees(t, 1) || !some_pair_agrees(t, 2)) return false;
  if (spec.kind == CollectionKind::B4) return true;
  const auto m2 = argmax_set(t, 1), m3 = argmax_set(t, 2);
  if (spec.kind == CollectionKind::Bmax) return m2.size() == 2 && m3.size() == 2;
  if (m2.size() < 2 || m3.size() < 2) return false;
  std::set<std::size_t> u(m2.begin(), m2.end());
  u.insert(m3.begin(), m3.end());
  return u.size() == (spec.kind == CollectionKind::B1 ? 2u : 3u);
}

}  // namespace

std::vector<RTuple> enumerate_collection(const CollectionSpec& spec) {
  if (spec.n < 1 || spec.n > 12) throw UsageError("collections are enumerated for 1 <= n <= 12");
  const auto all = hyperbolic_index(spec.n, 3);
  const bool blocked = spec.q > 0;
  const auto S = blocked ? block_shapes(spec.n, spec.q, spec.s) : all;
  const auto T = blocked ? block_shapes(spec.n, spec.q, spec.t) : all;
  std::vector<RTuple> out;
  switch (spec.kind) {
    case CollectionKind::C2:
    case CollectionKind::C2b:
      for (const auto& r : S) {
        if (spec.kind == CollectionKind::C2b && r[0] != spec.fixed) continue;
        for (const auto& s : T)
          if (r != s && r[1] == s[1]) out.push_back({r, s});
      }
      break;
    case CollectionKind::X1:
      for (const auto& r : S)
        for (const auto& s : S)
          if (r != s && r[0] == s[0]) out.push_back({r, s});
      break;
    case CollectionKind::B4:
    case CollectionKind::B4a:
    case CollectionKind::Bmax:
    case CollectionKind::B1:
    case CollectionKind::B3:
      for (const auto& r : S)
        for (const auto& s : S) {
          if (s[0] != r[0]) continue;
          for (const auto& t : T)
            for (const auto& u : T) {
              if (u[0] != t[0]) continue;
              RTuple tup{r, s, t, u};
              if (four_tuple_filter(spec, tup)) out.push_back(std::move(tup));
            }
        }
      break;
    case CollectionKind::NSD: {
      if (!blocked) throw UsageError("NSD needs a block count q");
      CoincidenceGraph base(spec.V);
      std::vector<std::vector<ShapeVector>> choices;
      for (int v : base.vertices) choices.push_back(block_shapes(spec.n, spec.q, v));
      RTuple cur(choices.size());
      std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == choices.size()) {
          for (std::size_t a = 0; a < cur.size(); ++a) {
            bool partner = false;
            for (std::size_t b = 0; b < cur.size() && !partner; ++b)
              partner = b != a && (cur[a][1] == cur[b][1] || cur[a][2] == cur[b][2]);
            if (!partner) return;
          }
          out.push_back(cur);
          return;
        }
        for (const auto& r : choices[i]) {
          cur[i] = r;
          rec(i + 1);
        }
      };
      if (!choices.empty()) rec(0);
      break;
    }
  }
  return out;
}

CountReport count_strongly_distinct(const ShapeVector& s, int k, int n, std::int64_t budget) {
  const int d = s.dim();
  if (k < 2) throw UsageError("count needs k >= 2");
  if (s.weight() < n) throw UsageError("count needs |s| >= n");
  std::vector<ShapeVector> cand;
  for (const auto& r : hyperbolic_index(n, d)) {
    bool ok = true;
    for (int j = 0; j < d; ++j) ok = ok && r[j] <= s[j];
    if (ok) cand.push_back(r);
  }
  CountReport rep;
  std::int64_t visited = 0;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (++visited > budget) throw ResourceError("strongly distinct count exceeds the enumeration budget");
    if (static_cast<int>(pick.size()) == k) {
      for (int j = 0; j < d; ++j) {
        int mx = -1;
        for (auto i : pick) mx = std::max(mx, cand[i][j]);
        if (mx != s[j]) return;
      }
      ++rep.count;
      return;
    }
    for (std::size_t i = from; i < cand.size(); ++i) {
      bool ok = true;
      for (auto p : pick)
        for (int j = 0; j < d && ok; ++j) ok = cand[p][j] != cand[i][j];
      if (!ok) continue;
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  const int excess = s.weight() - n;
  auto binom = [](double a, int b) {
    if (b < 0 || a < b) return 0.0;
    double r = 1;
    for (int i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
    return r;
  };
  rep.bound = k == 2 ? excess : excess * excess * std::pow(k, 3.0) * binom(std::pow(excess, d - 1), k - 3);
  rep.ratio = rep.bound > 0 ? static_cast<double>(rep.count) / rep.bound : 0.0;
  if (d == 2) rep.pattern = static_cast<long long>(std::llround(binom(excess - 1, k - 2)));
  return rep;
}

RFamily random_rfamily(int n, int d, std::uint64_t seed, std::uint64_t stream, const std::set<ShapeVector>& only,
                       std::int64_t cap) {
  RFamily F;
  F.n = n;
  F.d = d;
  F.m = n + 1;
  CounterRng rng(seed, stream);
  for (const auto& r : hyperbolic_index(n, d)) {
    auto f = random_rfunction(r, rng);
    if (only.empty() || only.count(r)) F.cells.emplace(r, rfunction_cells(f, F.m, cap));
  }
  return F;
}

GridFunction prod(const RFamily& F, const std::vector<RTuple>& tuples, std::int64_t budget) {
  GridFunction out = GridFunction::zeros(F.d, F.m, std::int64_t{1} << (F.d * F.m));
  const std::size_t cells = out.size();
  if (static_cast<double>(tuples.size()) * static_cast<double>(cells) > static_cast<double>(budget))
    throw ResourceError("product sum exceeds the work budget");
  std::vector<std::int32_t> acc(cells, 0);
  std::vector<const std::int8_t*> rows;
  for (const auto& t : tuples) {
    rows.clear();
    for (const auto& r : t) {
      auto it = F.cells.find(r);
      if (it == F.cells.end()) throw UsageError("shape " + to_string(r) + " is not tabulated");
      rows.push_back(it->second.data());
    }
    if (rows.empty()) continue;
    if (rows.size() == 2) {
      const auto *a = rows[0], *b = rows[1];
      for (std::size_t c = 0; c < cells; ++c) acc[c] += a[c] * b[c];
      continue;
    }
    for (std::size_t c = 0; c < cells; ++c) {
      int v = 1;
      for (const auto* row : rows) v *= row[c];
      acc[c] += v;
    }
  }
  for (std::size_t c = 0; c < cells; ++c) out.values[c] = acc[c];
  return out;
}

namespace {

template <class Fn>
void for_each_block_tuple(int n, int q, const std::vector<int>& V, Fn&& fn) {
  std::vector<std::vector<ShapeVector>> choices;
  for (int v : V) choices.push_back(block_shapes(n, q, v));
  RTuple cur(choices.size());
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == choices.size()) {
      fn(cur);
      return;
    }
    for (const auto& r : choices[i]) {
      cur[i] = r;
      rec(i + 1);
    }
  };
  if (!choices.empty()) rec(0);
}

}  // namespace

GridFunction prod_graph(const RFamily& F, const CoincidenceGraph& G, int q) {
  if (F.d != 3) throw UsageError("graph products are three-dimensional");
  std::vector<RTuple> tuples;
  for_each_block_tuple(F.n, q, G.vertices, [&](const RTuple& t) {
    if (membership(t, G)) tuples.push_back(t);
  });
  return prod(F, tuples);
}

InclusionExclusionReport inclusion_exclusion_check(const std::vector<int>& V, int n, int q, std::uint64_t seed,
                                                   std::int64_t cap) {
  const CoincidenceGraph base(V);
  if (base.vertices.size() > 5) throw ResourceError("inclusion-exclusion check is limited to |V| <= 5");
  const auto F = random_rfamily(n, 3, seed, 0, {}, cap);
  const auto mu = mobius_coefficients(base.vertices);
  const auto grade = prime_grading(base.vertices);
  InclusionExclusionReport rep;
  rep.graphs = mu.size();
  const std::size_t cells = static_cast<std::size_t>(checked_cell_count(3, F.m, cap));
  std::vector<double> lhs(cells, 0.0), rhs(cells, 0.0), graded(cells, 0.0), term(cells);
  for_each_block_tuple(n, q, base.vertices, [&](const RTuple& t) {
    ++rep.tuples;
    bool nsd = true;
    for (std::size_t a = 0; a < t.size() && nsd; ++a) {
      bool partner = false;
      for (std::size_t b = 0; b < t.size() && !partner; ++b)
        partner = b != a && (t[a][1] == t[b][1] || t[a][2] == t[b][2]);
      nsd = partner;
    }
    long long c = 0, g = 0;
    for (const auto& [G, m] : mu)
      if (membership(t, G)) {
        c += m;
        g += grade.at(G) % 2 == 0 ? 1 : -1;
      }
    if (!nsd && c == 0 && g == 0) return;
    std::fill(term.begin(), term.end(), 1.0);
    for (const auto& r : t) {
      const auto& row = F.cells.at(r);
      for (std::size_t i = 0; i < cells; ++i) term[i] *= row[i];
    }
    rep.nsd_tuples += nsd;
    for (std::size_t i = 0; i < cells; ++i) {
      if (nsd) lhs[i] += term[i];
      rhs[i] += static_cast<double>(c) * term[i];
      graded[i] += static_cast<double>(g) * term[i];
    }
  });
  for (std::size_t i = 0; i < cells; ++i) {
    rep.residual = std::max(rep.residual, std::abs(lhs[i] - rhs[i]));
    rep.graded_residual = std::max(rep.graded_residual, std::abs(lhs[i] - graded[i]));
    rep.lhs_sup = std::max(rep.lhs_sup, std::abs(lhs[i]));
  }
  return rep;
}

double predicted_norm_exponent(const CollectionSpec& spec) {
  const bool blocked = spec.q > 0;
  switch (spec.kind) {
    case CollectionKind::C2: return blocked ? 1.5 : 1.75;
    case CollectionKind::C2b: return 1.25;
    case CollectionKind::X1: return 1.5;
    case CollectionKind::B4: return 3.0;
    case CollectionKind::B4a: return 2.5;
    case CollectionKind::Bmax: return 3.0;
    case CollectionKind::B1:
    case CollectionKind::B3: return 0.0;
    case CollectionKind::NSD: return static_cast<double>(spec.V.size());
  }
  return 0.0;
}

ProdNormReport prod_norm_experiment(CollectionSpec spec, double p, const std::vector<int>& ns, std::size_t trials,
                                    std::uint64_t seed, std::int64_t cap) {
  if (trials == 0) throw UsageError("trials must be positive");
  if (p < 1) throw UsageError("p must be at least 1");
  ProdNormReport rep;
  rep.spec = spec;
  rep.p = p;
  rep.predicted_exponent = predicted_norm_exponent(spec);
  std::vector<double> xs, ys;
  for (int n : ns) {
    spec.n = n;
    checked_cell_count(3, n + 1, cap);
    const auto tuples = enumerate_collection(spec);
    std::set<ShapeVector> used;
    for (const auto& t : tuples) used.insert(t.begin(), t.end());
    ProdNormRow row;
    row.n = n;
    row.tuples = tuples.size();
    std::vector<double> vals;
    for (std::size_t tr = 0; tr < trials; ++tr) {
      if (tuples.empty()) {
        vals.push_back(0.0);
        continue;
      }
      const auto F = random_rfamily(n, 3, seed, (static_cast<std::uint64_t>(n) << 32) | tr, used, cap);
      vals.push_back(lp_norm(prod(F, tuples), p));
    }
    row.mean = pairwise_sum(vals) / static_cast<double>(trials);
    double var = 0;
    for (double v : vals) var += (v - row.mean) * (v - row.mean);
    const double sd = trials > 1 ? std::sqrt(var / static_cast<double>(trials - 1)) : 0.0;
    const double half = 1.959963984540054 * sd / std::sqrt(static_cast<double>(trials));
    row.ci_low = row.mean - half;
    row.ci_high = row.mean + half;
    if (row.mean > 0) {
      xs.push_back(n);
      ys.push_back(row.mean);
    }
    rep.rows.push_back(row);
  }
  if (xs.size() >= 2) rep.fit = loglog_fit(xs, ys);
  return rep;
}

}  // namespace dlab
