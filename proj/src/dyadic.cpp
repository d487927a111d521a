#include "dlab/dyadic.hpp"

#include <cmath>
#include <numeric>

namespace dlab {

DyadicInterval::DyadicInterval(int k, std::int64_t j) : scale(k), offset(j) {
  if (k < 0 || k > kMaxScale) throw UsageError("interval scale out of range: " + std::to_string(k));
  if (j < 0 || j >= (std::int64_t{1} << k)) throw UsageError("interval offset out of range");
}

double DyadicInterval::left() const { return std::ldexp(static_cast<double>(offset), -scale); }
double DyadicInterval::length() const { return std::ldexp(1.0, -scale); }

std::int64_t cell_index(double x, int k) {
  const std::int64_t cells = std::int64_t{1} << k;
  auto j = static_cast<std::int64_t>(std::floor(std::ldexp(x, k)));
  if (j >= cells) j = cells - 1;
  if (j < 0) j = 0;
  return j;
}

bool DyadicInterval::contains(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) return false;
  return cell_index(x, scale) == offset;
}

bool DyadicInterval::contains(const DyadicInterval& o) const {
  return o.scale >= scale && (o.offset >> (o.scale - scale)) == offset;
}

bool DyadicInterval::disjoint(const DyadicInterval& o) const { return !contains(o) && !o.contains(*this); }

double haar_eval(const DyadicInterval& I, double x) {
  if (!(x >= 0.0 && x <= 1.0)) return 0.0;
  const std::int64_t j = cell_index(x, I.scale + 1);
  if ((j >> 1) != I.offset) return 0.0;
  return (j & 1) ? 1.0 : -1.0;
}

ShapeVector::ShapeVector(std::vector<int> v) : r(std::move(v)) {
  for (int x : r)
    if (x < 0 || x > kMaxScale) throw UsageError("shape entry out of range");
}

int ShapeVector::weight() const { return std::accumulate(r.begin(), r.end(), 0); }

DyadicRectangle::DyadicRectangle(const ShapeVector& shape, const std::vector<std::int64_t>& offsets) {
  if (offsets.size() != shape.r.size()) throw UsageError("offset count does not match shape dimension");
  sides.reserve(offsets.size());
  for (std::size_t j = 0; j < offsets.size(); ++j) sides.emplace_back(shape.r[j], offsets[j]);
}

ShapeVector DyadicRectangle::shape() const {
  std::vector<int> r;
  r.reserve(sides.size());
  for (const auto& I : sides) r.push_back(I.scale);
  return ShapeVector(std::move(r));
}

double DyadicRectangle::volume() const {
  int w = 0;
  for (const auto& I : sides) w += I.scale;
  return std::ldexp(1.0, -w);
}

bool DyadicRectangle::contains(const std::vector<double>& x) const {
  if (x.size() != sides.size()) throw UsageError("point dimension mismatch");
  for (std::size_t j = 0; j < sides.size(); ++j)
    if (!sides[j].contains(x[j])) return false;
  return true;
}

bool DyadicRectangle::contains(const DyadicRectangle& o) const {
  if (o.sides.size() != sides.size()) throw UsageError("rectangle dimension mismatch");
  for (std::size_t j = 0; j < sides.size(); ++j)
    if (!sides[j].contains(o.sides[j])) return false;
  return true;
}

double haar_eval(const DyadicRectangle& R, const std::vector<double>& x) {
  if (x.size() != R.sides.size()) throw UsageError("point dimension mismatch");
  double v = 1.0;
  for (std::size_t j = 0; j < x.size() && v != 0.0; ++j) v *= haar_eval(R.sides[j], x[j]);
  return v;
}

namespace {
void shapes_rec(int remaining, int d, std::vector<int>& cur, std::vector<ShapeVector>& out) {
  if (static_cast<int>(cur.size()) == d - 1) {
    cur.push_back(remaining);
    out.emplace_back(cur);
    cur.pop_back();
    return;
  }
  for (int x = 0; x <= remaining; ++x) {
    cur.push_back(x);
    shapes_rec(remaining - x, d, cur, out);
    cur.pop_back();
  }
}
}  // namespace

std::vector<ShapeVector> hyperbolic_index(int n, int d) {
  if (d < 1) throw UsageError("dimension must be positive");
  if (n < 0 || n > kMaxScale) throw UsageError("scale out of range");
  std::vector<ShapeVector> out;
  std::vector<int> cur;
  shapes_rec(n, d, cur, out);
  return out;
}

std::int64_t hyperbolic_count(int n, int d) {
  // C(n+d-1, d-1)
  std::int64_t c = 1;
  for (int i = 1; i <= d - 1; ++i) c = c * (n + i) / i;
  return c;
}

std::vector<DyadicRectangle> enumerate_rectangles(const ShapeVector& r, int max_weight) {
  if (r.weight() > max_weight) throw ResourceError("shape weight exceeds enumeration limit");
  const int d = r.dim();
  std::vector<DyadicRectangle> out;
  out.reserve(std::size_t{1} << r.weight());
  std::vector<std::int64_t> off(static_cast<std::size_t>(d), 0);
  while (true) {
    out.emplace_back(r, off);
    int j = d - 1;
    while (j >= 0) {
      if (++off[static_cast<std::size_t>(j)] < (std::int64_t{1} << r[j])) break;
      off[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return out;
}

std::int64_t rectangle_rank(const DyadicRectangle& R) {
  std::int64_t idx = 0;
  for (const auto& I : R.sides) idx = (idx << I.scale) | I.offset;
  return idx;
}

std::string to_string(const DyadicInterval& I) {
  return "[" + std::to_string(I.offset) + "/2^" + std::to_string(I.scale) + ")";
}

std::string to_string(const ShapeVector& r) {
  std::string s = "(";
  for (std::size_t j = 0; j < r.r.size(); ++j) s += (j ? "," : "") + std::to_string(r.r[j]);
  return s + ")";
}

std::string to_string(const DyadicRectangle& R) {
  std::string s;
  for (std::size_t j = 0; j < R.sides.size(); ++j) s += (j ? "x" : "") + to_string(R.sides[j]);
  return s;
}

}  // namespace dlab
