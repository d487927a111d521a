#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "dlab/dyadic.hpp"
#include "dlab/haar_field.hpp"
#include "dlab/stats.hpp"

namespace dlab {

using RTuple = std::vector<ShapeVector>;
using Rational = boost::rational<long long>;

// Pairwise distinct in every coordinate.
bool strongly_distinct(const RTuple& t);

// Labeled graph with two edge colors; color 2 and 3 refer to the shape coordinate
// (indices 1 and 2) in which the endpoints agree.
struct CoincidenceGraph {
  std::vector<int> vertices;  // sorted labels in 1..q
  std::set<std::pair<int, int>> edges2, edges3;

  CoincidenceGraph() = default;
  explicit CoincidenceGraph(std::vector<int> v);

  const std::set<std::pair<int, int>>& edges(int color) const;
  void add_edge(int color, int a, int b);
  bool has_edge(int color, int a, int b) const;
  std::size_t edge_count() const { return edges2.size() + edges3.size(); }
  // edges of other are a subset of ours
  bool contains(const CoincidenceGraph& other) const;

  auto operator<=>(const CoincidenceGraph&) const = default;
};

// Connected components of one color with at least two vertices.
std::vector<std::vector<int>> cliques(const CoincidenceGraph& G, int color);
bool is_admissible(const CoincidenceGraph& G);
bool is_connected(const CoincidenceGraph& G);

// Vertex labels default to 1..|t|.
CoincidenceGraph graph_from_tuple(const RTuple& t, std::vector<int> labels = {});
// t[i] sits at vertex G.vertices[i]; edges are constraints, absent edges impose nothing.
bool membership(const RTuple& t, const CoincidenceGraph& G);

// Smallest admissible graph holding both edge sets, if any.
std::optional<CoincidenceGraph> wedge(const CoincidenceGraph& a, const CoincidenceGraph& b);
// Graph on the union of two disjoint vertex sets.
CoincidenceGraph disjoint_union(const CoincidenceGraph& a, const CoincidenceGraph& b);

std::vector<CoincidenceGraph> admissible_graphs(const std::vector<int>& V);
std::vector<CoincidenceGraph> connected_admissible_graphs(const std::vector<int>& V);
std::vector<CoincidenceGraph> primes(const std::vector<int>& V);
// 0 for primes, k - 1 for graphs needing k prime factors.
std::map<CoincidenceGraph, int> prime_grading(const std::vector<int>& V);
// Coefficients c(G) with sum_{G <= H} c(G) = 1 for every admissible H.
std::map<CoincidenceGraph, long long> mobius_coefficients(const std::vector<int>& V);

struct BeckExponent {
  Rational exponent;
  std::vector<int> v32, v12;  // in order of selection
  bool tabulated = false;     // two or three vertices
};

BeckExponent beck_exponent(const CoincidenceGraph& G);

// Shapes of H_n (d = 3) whose first coordinate lies in block label (1..q) of beck_blocks(n, q).
std::vector<ShapeVector> block_shapes(int n, int q, int label);

enum class CollectionKind { C2, C2b, X1, B4, B4a, Bmax, B1, B3, NSD };

struct CollectionSpec {
  CollectionKind kind = CollectionKind::C2;
  int n = 4;
  int q = 0;               // 0: no block restriction
  int s = 1, t = 2;        // block labels for the restriction
  int fixed = 0;           // b for C2b, a for B4a
  std::vector<int> V;      // vertex labels for NSD
};

CollectionKind parse_collection(const std::string& name);
std::string collection_name(CollectionKind k);
std::vector<RTuple> enumerate_collection(const CollectionSpec& spec);

struct CountReport {
  long long count = 0;
  double bound = 0;  // (|s|-n)^2 k^3 C((|s|-n)^(d-1), k-3), or |s|-n for k = 2
  double ratio = 0;
  long long pattern = -1;  // d = 2: C(|s|-n-1, k-2)
};

CountReport count_strongly_distinct(const ShapeVector& s, int k, int n, std::int64_t budget = 50'000'000);

// r-functions with random signs for every shape of H_n, tabulated on the resolution n+1 grid.
struct RFamily {
  int n = 0;
  int d = 3;
  int m = 1;
  std::map<ShapeVector, std::vector<std::int8_t>> cells;
};

// Signs are drawn for every shape in hyperbolic_index order; only shapes in `only`
// (all when empty) are tabulated.
RFamily random_rfamily(int n, int d, std::uint64_t seed, std::uint64_t stream = 0,
                       const std::set<ShapeVector>& only = {}, std::int64_t cap = kDefaultCellCap);
GridFunction prod(const RFamily& F, const std::vector<RTuple>& tuples, std::int64_t budget = std::int64_t{1} << 36);
// Sum over tuples (one shape per vertex block) lying in X(G).
GridFunction prod_graph(const RFamily& F, const CoincidenceGraph& G, int q);

struct InclusionExclusionReport {
  double residual = 0;         // Prod(NSD) against the Mobius-weighted graph sum
  double graded_residual = 0;  // against sum_k (-1)^k over prime-graded graphs
  double lhs_sup = 0;
  std::size_t tuples = 0;
  std::size_t nsd_tuples = 0;
  std::size_t graphs = 0;
};

InclusionExclusionReport inclusion_exclusion_check(const std::vector<int>& V, int n, int q, std::uint64_t seed,
                                                   std::int64_t cap = kDefaultCellCap);

struct ProdNormRow {
  int n = 0;
  std::size_t tuples = 0;
  double mean = 0;
  double ci_low = 0, ci_high = 0;
};

struct ProdNormReport {
  CollectionSpec spec;
  double p = 2;
  std::vector<ProdNormRow> rows;
  LinearFit fit;
  double predicted_exponent = 0;
};

// Exponent of n claimed for the collection at fixed p and q.
double predicted_norm_exponent(const CollectionSpec& spec);
ProdNormReport prod_norm_experiment(CollectionSpec spec, double p, const std::vector<int>& ns, std::size_t trials,
                                    std::uint64_t seed, std::int64_t cap = kDefaultCellCap);

}  // namespace dlab
