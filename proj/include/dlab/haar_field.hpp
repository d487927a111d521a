#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "dlab/dyadic.hpp"

namespace dlab {

inline constexpr std::int64_t kDefaultCellCap = std::int64_t{1} << 26;

// Throws ResourceError if 2^(d*m) exceeds cap.
std::int64_t checked_cell_count(int d, int m, std::int64_t cap);

// Piecewise-constant function on the uniform grid of 2^(d*m) cells.
// Cell (c_0,...,c_{d-1}) lives at index sum c_j * 2^(m*(d-1-j)).
struct GridFunction {
  int dim = 1;
  int resolution = 0;
  std::vector<double> values;

  static GridFunction zeros(int d, int m, std::int64_t cap = kDefaultCellCap);
  static GridFunction constant(int d, int m, double c, std::int64_t cap = kDefaultCellCap);

  std::int64_t side() const { return std::int64_t{1} << resolution; }
  std::size_t size() const { return values.size(); }
  double cell_volume() const;
  std::int64_t index(std::span<const std::int64_t> cell) const;
  std::vector<std::int64_t> cell_of(std::int64_t index) const;
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  // Value at a point of [0,1]^d (1.0 maps to the last cell).
  double at(const std::vector<double>& x) const;

  GridFunction& operator*=(const GridFunction& o);
  GridFunction& operator+=(const GridFunction& o);
};

double mean(const GridFunction& g);
double inner(const GridFunction& f, const GridFunction& g);
double lp_norm(const GridFunction& g, double p);
double sup_norm(const GridFunction& g);

// Refines g to a finer resolution without changing the function.
GridFunction refine(const GridFunction& g, int resolution, std::int64_t cap = kDefaultCellCap);

struct HaarExpansion {
  int dim = 1;
  double mean = 0;
  std::map<DyadicRectangle, double> coef;

  explicit HaarExpansion(int d = 1) : dim(d) {}
  void add(const DyadicRectangle& R, double a);
  // Largest side scale among the terms, -1 when there are none.
  int depth() const;
  int grid_resolution() const { return depth() + 1; }
};

// Tensor coefficient layout used by the fast transforms: along each axis
// slot 0 is the constant and slot 2^k + j is the Haar function of [j2^-k,(j+1)2^-k).
std::size_t haar_slot(const DyadicInterval& I);
std::vector<double> coefficient_tensor(const HaarExpansion& e, int m);

// In-place tensor transforms on an array of 2^(d*m) entries.
void haar_synthesis(std::vector<double>& a, int d, int m);
void haar_analysis(std::vector<double>& a, int d, int m);  // returns <g, tensor basis>
void indicator_synthesis(std::vector<double>& a, int d, int m);

// Exact grid of the expansion; resolution defaults to depth + 1.
GridFunction grid_evaluate(const HaarExpansion& e, int resolution = -1, std::int64_t cap = kDefaultCellCap);

// Reference evaluation term by term (slow; used as an oracle).
GridFunction grid_evaluate_direct(const HaarExpansion& e, int resolution, std::int64_t cap = kDefaultCellCap);

// Haar coefficients a_R = <g,h_R>/|R| over full rectangles; entries below tol are dropped.
HaarExpansion haar_coefficients(const GridFunction& g, double tol = 0.0);

// Product of L-infinity normalised Haar functions. Per axis the product is
// either an indicator or a Haar function of the smallest interval.
struct HaarProduct {
  enum class Kind { Zero, Indicator, SignedHaar, Mixed };
  bool zero = false;
  int sign = 1;
  DyadicRectangle support;
  std::vector<bool> haar_axis;

  Kind kind() const;
  double eval(const std::vector<double>& x) const;
};

HaarProduct haar_product(std::span<const DyadicRectangle> terms);
GridFunction grid_evaluate(const HaarProduct& p, int resolution, std::int64_t cap = kDefaultCellCap);

// S(f)^2 = (E f)^2 + sum_R (<f,h_R>/|R|)^2 1_R, evaluated exactly on the grid.
GridFunction square_function(const HaarExpansion& e, int resolution = -1, std::int64_t cap = kDefaultCellCap);

struct ParsevalReport {
  double norm_squared = 0;    // ||f||_2^2 from the grid
  double coefficient_sum = 0; // (E f)^2 + sum a_R^2 |R|
  double square_function_l2 = 0;
};
ParsevalReport parseval_check(const HaarExpansion& e, std::int64_t cap = kDefaultCellCap);

struct OrliczReport {
  double value = 0;
  int argmax_p = 1;
  std::vector<double> profile;  // p^(-1/alpha) ||g||_p for p = 1..p_max
};
OrliczReport orlicz_surrogate(const GridFunction& g, double alpha, int p_max);

// Strong dyadic maximal function: sup of averages over dyadic rectangles
// containing the cell. With absolute=true the averages are of |g|.
GridFunction dyadic_maximal(const GridFunction& g, bool absolute);

struct CZDecomposition {
  std::vector<DyadicInterval> intervals;
  GridFunction good;  // g1
  GridFunction bad;   // g2
};

// One-dimensional Calderon-Zygmund decomposition at height lambda. An interval
// stops when the average of |g| over it reaches lambda.
CZDecomposition cz_decompose(const GridFunction& g, double lambda);

struct TailRow {
  double t = 0;
  double p_hat = 0;
  double wilson_lo = 0;
  double wilson_hi = 0;
  double bound = 0;  // exp(-t^2/4)
  bool violation = false;
};

// Monte Carlo tail P(sum a_k eps_k > t) with sum a_k^2 = 1 assumed by the bound.
std::vector<TailRow> rademacher_tail(std::span<const double> weights, std::span<const double> ts,
                                     std::size_t trials, std::uint64_t seed, std::uint64_t stream = 0);

// f_r = sum over R of shape r of eps_R h_R with eps_R in {-1,+1}; signs in rank order.
struct RFunction {
  ShapeVector shape;
  std::vector<std::int8_t> sign;
};

class CounterRng;
RFunction random_rfunction(const ShapeVector& r, CounterRng& rng);
HaarExpansion to_expansion(const RFunction& f);
// Value of f_r on every cell of a resolution-m grid (m > max r_j).
std::vector<std::int8_t> rfunction_cells(const RFunction& f, int m, std::int64_t cap = kDefaultCellCap);
GridFunction rfunction_grid(const RFunction& f, int m, std::int64_t cap = kDefaultCellCap);

}  // namespace dlab
