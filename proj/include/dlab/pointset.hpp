#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dlab/haar_field.hpp"

namespace dlab {

struct PointSet {
  int dim = 2;
  std::vector<std::vector<double>> points;

  std::size_t size() const { return points.size(); }
  void validate() const;
};

double radical_inverse(std::uint64_t i, unsigned base);

// (i/N, phi_2(i)) for i < N; exact dyadic when N is a power of two.
PointSet van_der_corput(std::size_t N);
// (phi_2(i), phi_3(i), ...) for i < N.
PointSet halton(std::size_t N, int d);
// Uniform points snapped to multiples of 2^-bits.
PointSet random_points(std::size_t N, int d, std::uint64_t seed, std::uint64_t stream = 0, int bits = 30);

// The n with 2N <= 2^n < 4N.
int scale_for(std::size_t N);

// D_N(x) = #{p : p < x componentwise} - N prod x_j.
double discrepancy_at(const PointSet& A, const std::vector<double>& x);

// Exact sup_x |D_N(x)| including boundary limits. Returns nullopt when the
// brute-force path would exceed `budget` point-box tests.
std::optional<double> star_discrepancy_sup(const PointSet& A, double budget = 4e9);

// ||D_N||_2 via the closed-form double sum.
double l2_discrepancy(const PointSet& A);

// c(p, I) = integral over x > p of h_I(x) dx.
double tent_integral(double p, const DyadicInterval& I);

// Exact <D_N, h_R>.
double haar_coefficient(const PointSet& A, const DyadicRectangle& R);
// <D_N, h_R> for every R of shape r, in rank order.
std::vector<double> shape_coefficients(const PointSet& A, const ShapeVector& r);

// good[i] is true when rectangle i of shape r holds no point.
std::vector<bool> classify_rectangles(const PointSet& A, const ShapeVector& r);

// f_r with eps_R = sgn <D_N, h_R> (zero coefficients take +1); on good
// rectangles this is the sign of the linear part.
RFunction build_r_function(const PointSet& A, const ShapeVector& r);

// Exact <D_N, f> computed from the coefficients.
double pairing(const PointSet& A, const RFunction& f);

struct RothCertificate {
  std::size_t N = 0;
  int n = 0;
  int d = 0;
  double pairing = 0;
  double l2_lower = 0;
  std::optional<double> sup_disc;
  std::vector<double> per_shape;  // <D_N, f_r> in hyperbolic_index order
};

RothCertificate roth_certificate(const PointSet& A, int n = -1, bool with_sup = true);

struct FarScaleReport {
  double pairing = 0;
  double bound = 0;  // C0 N 2^-|s| with C0 = 4
  double ratio = 0;
};

FarScaleReport far_scale_pairing(const PointSet& A, const RFunction& f);

// Exact <D_N, g> for a grid function g.
double pair_with_grid(const PointSet& A, const GridFunction& g);

}  // namespace dlab
