#pragma once

#include <cstdint>
#include <vector>

#include "dlab/haar_field.hpp"

namespace dlab {

inline constexpr int kMaxCodeLength = 24;

// Binary linear code of length m; bit i of a word is coordinate i + 1.
struct BinaryCode {
  int m = 0;
  int k = 0;
  int dmin = 1;          // requested distance
  int min_distance = 0;  // verified minimum nonzero weight (m + 1 for the trivial code)
  std::vector<std::uint64_t> generators;

  // All 2^k codewords, index bits selecting generators.
  std::vector<std::uint64_t> codewords() const;
};

// Largest k with sum_{i=0}^{dmin-2} C(m-1, i) < 2^(m-k); 0 when none.
int vg_dimension(int m, int dmin);

// Greedy parity-check construction; the distance is verified by a full weight scan.
BinaryCode vg_code(int m, int dmin);

// Minimum weight over nonzero codewords, m + 1 if there are none.
int min_weight(const BinaryCode& c);

struct SeparatedFamily {
  int m = 0;
  int distance = 0;   // code distance, each pairwise symmetric difference is at least this
  int dimension = 0;  // log2 of the family size
  double alpha = 0;   // dimension / m
  double c = 0;       // min(alpha, ln(size) / m)
  int min_sym_diff = 0;
  std::vector<std::uint64_t> words;

  // Subsets of {1..m}.
  std::vector<std::vector<int>> subsets() const;
};

// Family from a VG code with d = k = ceil(alpha m), alpha as large as the bound allows.
SeparatedFamily separated_family(int m);

// Primitive of h_I from 0: a tent of depth |I|/2 at the midpoint, zero off I.
double tent_primitive(const DyadicInterval& I, double x);
// u_R(x) = prod_j tent_primitive(R_j, x_j).
double integrated_haar_eval(const DyadicRectangle& R, const std::vector<double>& x);

// Values of the integral of g over [0, x] at the (2^m + 1)^d grid vertices,
// axis 0 slowest. The integral is multilinear on each cell.
std::vector<double> integrated_vertices(const GridFunction& g, std::int64_t cap = kDefaultCellCap);

struct SmoothSmallBallReport {
  int n = 0;
  int d = 0;
  double lhs = 0;    // 2^-2n sum |alpha(R)|
  double rhs = 0;    // || sum alpha u_R ||_inf
  double ratio = 0;  // lhs / (n^((d-2)/2) rhs)
};

// Exact sup of |sum alpha u_R|, taken over cell vertices.
double smooth_sup(const HaarExpansion& H, int n, std::int64_t cap = kDefaultCellCap);
SmoothSmallBallReport smooth_smallball_check(const HaarExpansion& H, int n, std::int64_t cap = kDefaultCellCap);

struct EntropyReport {
  int n = 0;
  int d = 0;
  std::int64_t rectangles = 0;  // m = #{R : |R| = 2^-n}
  int code_length = 0;
  int group = 1;  // most rectangles sharing one code coordinate
  int code_distance = 0;
  int dimension = 0;
  double log_family = 0;  // ln |A|, the implied lower bound on ln N(eps)
  std::int64_t min_sym_diff = 0;  // over checked pairs, counted in rectangles
  double ze_big_ratio = 0;        // min sum |sigma - sigma'| / (n^(d-1) 2^n)
  double min_separation = 0;      // min || Int_d(F_sigma - F_sigma') ||_inf
  double eps_ref = 0;             // n^(1/2) 2^-n
  double kappa = 0;               // min_separation / eps_ref
  std::size_t pairs_checked = 0;
  std::size_t total_pairs = 0;
  bool sampled = false;  // when true the minima are upper bounds on the true minima
};

EntropyReport entropy_experiment(int n, int d, int m_cap = 20, std::size_t pair_budget = 4096,
                                 std::uint64_t seed = 0, std::int64_t cap = kDefaultCellCap);

}  // namespace dlab
