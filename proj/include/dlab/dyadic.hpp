#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlab {

// Thrown for malformed input (bad shapes, out-of-range parameters).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when a request would exceed a configured resource cap.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxScale = 30;

// [j 2^-k, (j+1) 2^-k), closed on the left.
struct DyadicInterval {
  int scale = 0;
  std::int64_t offset = 0;

  DyadicInterval() = default;
  DyadicInterval(int k, std::int64_t j);

  double left() const;
  double length() const;
  double mid() const { return left() + 0.5 * length(); }
  DyadicInterval left_half() const { return {scale + 1, 2 * offset}; }
  DyadicInterval right_half() const { return {scale + 1, 2 * offset + 1}; }

  // 1.0 is treated as lying in the last cell of every scale.
  bool contains(double x) const;
  bool contains(const DyadicInterval& other) const;
  bool disjoint(const DyadicInterval& other) const;

  auto operator<=>(const DyadicInterval&) const = default;
};

// Index of the scale-k cell containing x in [0,1]; 1.0 maps to the last cell.
std::int64_t cell_index(double x, int k);

// L-infinity normalised Haar function: -1 on the left half, +1 on the right.
double haar_eval(const DyadicInterval& I, double x);

struct ShapeVector {
  std::vector<int> r;

  ShapeVector() = default;
  explicit ShapeVector(std::vector<int> v);

  int dim() const { return static_cast<int>(r.size()); }
  int weight() const;
  int operator[](int j) const { return r[static_cast<std::size_t>(j)]; }

  auto operator<=>(const ShapeVector&) const = default;
};

struct DyadicRectangle {
  std::vector<DyadicInterval> sides;

  DyadicRectangle() = default;
  explicit DyadicRectangle(std::vector<DyadicInterval> s) : sides(std::move(s)) {}
  DyadicRectangle(const ShapeVector& shape, const std::vector<std::int64_t>& offsets);

  int dim() const { return static_cast<int>(sides.size()); }
  ShapeVector shape() const;
  double volume() const;
  bool contains(const std::vector<double>& x) const;
  bool contains(const DyadicRectangle& other) const;

  auto operator<=>(const DyadicRectangle&) const = default;
};

double haar_eval(const DyadicRectangle& R, const std::vector<double>& x);

// Shapes r with |r| = n in lexicographic order.
std::vector<ShapeVector> hyperbolic_index(int n, int d);
std::int64_t hyperbolic_count(int n, int d);

// All rectangles of a shape, offsets in row-major order (last coordinate fastest).
std::vector<DyadicRectangle> enumerate_rectangles(const ShapeVector& r, int max_weight = kMaxScale);

// Row-major position of a rectangle among enumerate_rectangles(R.shape()).
std::int64_t rectangle_rank(const DyadicRectangle& R);

std::string to_string(const DyadicInterval& I);
std::string to_string(const ShapeVector& r);
std::string to_string(const DyadicRectangle& R);

}  // namespace dlab
