#include "dlab/pointset.hpp"

#include <algorithm>
#include <cmath>

#include "dlab/rng.hpp"
#include "dlab/stats.hpp"

namespace dlab {

void PointSet::validate() const {
  if (dim < 1) throw UsageError("point set dimension must be positive");
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != dim) throw UsageError("point has wrong dimension");
    for (double x : p)
      if (!(x >= 0.0 && x < 1.0)) throw UsageError("point coordinate outside [0,1)");
  }
}

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0;
  while (i) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

PointSet van_der_corput(std::size_t N) {
  if (N == 0) throw UsageError("N must be positive");
  PointSet A{2, {}};
  for (std::size_t i = 0; i < N; ++i)
    A.points.push_back({static_cast<double>(i) / static_cast<double>(N), radical_inverse(i, 2)});
  return A;
}

PointSet halton(std::size_t N, int d) {
  static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  if (N == 0) throw UsageError("N must be positive");
  if (d < 1 || d > 10) throw UsageError("Halton dimension must be in 1..10");
  PointSet A{d, {}};
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<double> p;
    for (int j = 0; j < d; ++j) p.push_back(radical_inverse(i, primes[j]));
    A.points.push_back(std::move(p));
  }
  return A;
}

PointSet random_points(std::size_t N, int d, std::uint64_t seed, std::uint64_t stream, int bits) {
  if (N == 0) throw UsageError("N must be positive");
  if (bits < 1 || bits > 52) throw UsageError("bits must be in 1..52");
  CounterRng rng(seed, stream);
  PointSet A{d, {}};
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<double> p;
    for (int j = 0; j < d; ++j) p.push_back(std::ldexp(static_cast<double>(rng() >> (64 - bits)), -bits));
    A.points.push_back(std::move(p));
  }
  return A;
}

int scale_for(std::size_t N) {
  if (N == 0) throw UsageError("N must be positive");
  int n = 0;
  while ((std::size_t{1} << n) < 2 * N) ++n;
  return n;
}

double discrepancy_at(const PointSet& A, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != A.dim) throw UsageError("point dimension mismatch");
  std::size_t count = 0;
  for (const auto& p : A.points) {
    bool inside = true;
    for (int j = 0; j < A.dim && inside; ++j) inside = p[static_cast<std::size_t>(j)] < x[static_cast<std::size_t>(j)];
    count += inside;
  }
  double vol = 1;
  for (double xi : x) vol *= xi;
  return static_cast<double>(count) - static_cast<double>(A.size()) * vol;
}

namespace {

std::vector<double> candidates(const PointSet& A, int j) {
  std::vector<double> g{1.0};
  for (const auto& p : A.points) g.push_back(p[static_cast<std::size_t>(j)]);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

struct Fenwick {
  std::vector<long> t;
  explicit Fenwick(std::size_t n) : t(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < t.size(); i += i & (~i + 1)) ++t[i];
  }
  long prefix(std::size_t i) const {  // entries 0..i-1
    long s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += t[i];
    return s;
  }
};

double star_2d(const PointSet& A) {
  const auto g1 = candidates(A, 0), g2 = candidates(A, 1);
  const double N = static_cast<double>(A.size());
  std::vector<std::pair<double, std::size_t>> pts;
  for (const auto& p : A.points)
    pts.emplace_back(p[0], static_cast<std::size_t>(std::lower_bound(g2.begin(), g2.end(), p[1]) - g2.begin()));
  std::sort(pts.begin(), pts.end());
  Fenwick closed(g2.size()), open(g2.size());
  std::size_t ic = 0, io = 0;
  double best = 0;
  for (double x1 : g1) {
    while (ic < pts.size() && pts[ic].first <= x1) closed.add(pts[ic++].second);
    while (io < pts.size() && pts[io].first < x1) open.add(pts[io++].second);
    for (std::size_t k = 0; k < g2.size(); ++k) {
      const double vol = N * x1 * g2[k];
      best = std::max(best, static_cast<double>(closed.prefix(k + 1)) - vol);
      best = std::max(best, vol - static_cast<double>(open.prefix(k)));
    }
  }
  return best;
}

}  // namespace

std::optional<double> star_discrepancy_sup(const PointSet& A, double budget) {
  A.validate();
  if (A.size() == 0) return 0.0;
  if (A.dim == 2) return star_2d(A);
  std::vector<std::vector<double>> g;
  double work = static_cast<double>(A.size());
  for (int j = 0; j < A.dim; ++j) {
    g.push_back(candidates(A, j));
    work *= static_cast<double>(g.back().size());
  }
  if (work > budget) return std::nullopt;
  const double N = static_cast<double>(A.size());
  const std::size_t d = static_cast<std::size_t>(A.dim);
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  double best = 0;
  while (true) {
    double vol = N;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = g[j][idx[j]];
      vol *= x[j];
    }
    long closed = 0, open = 0;
    for (const auto& p : A.points) {
      bool c = true, o = true;
      for (std::size_t j = 0; j < d; ++j) {
        c = c && p[j] <= x[j];
        o = o && p[j] < x[j];
      }
      closed += c;
      open += o;
    }
    best = std::max({best, static_cast<double>(closed) - vol, vol - static_cast<double>(open)});
    std::size_t j = d;
    while (j > 0) {
      --j;
      if (++idx[j] < g[j].size()) break;
      idx[j] = 0;
      if (j == 0) return best;
    }
  }
}

double l2_discrepancy(const PointSet& A) {
  A.validate();
  const double N = static_cast<double>(A.size());
  std::vector<double> terms;
  terms.reserve(A.size() * A.size() + A.size() + 1);
  for (const auto& p : A.points)
    for (const auto& q : A.points) {
      double t = 1;
      for (int j = 0; j < A.dim; ++j)
        t *= 1 - std::max(p[static_cast<std::size_t>(j)], q[static_cast<std::size_t>(j)]);
      terms.push_back(t);
    }
  for (const auto& p : A.points) {
    double t = 1;
    for (double x : p) t *= (1 - x * x) / 2;
    terms.push_back(-2 * N * t);
  }
  terms.push_back(N * N * std::pow(3.0, -A.dim));
  return std::sqrt(std::max(0.0, pairwise_sum(terms)));
}

double tent_integral(double p, const DyadicInterval& I) {
  const double a = I.left(), l = I.length();
  if (p <= a || p >= a + l) return 0.0;
  return p <= a + l / 2 ? p - a : a + l - p;
}

double haar_coefficient(const PointSet& A, const DyadicRectangle& R) {
  if (R.dim() != A.dim) throw UsageError("rectangle dimension mismatch");
  double s = 0;
  for (const auto& p : A.points) {
    double t = 1;
    for (int j = 0; j < A.dim && t != 0; ++j) t *= tent_integral(p[static_cast<std::size_t>(j)], R.sides[static_cast<std::size_t>(j)]);
    s += t;
  }
  const double v = R.volume();
  return s - static_cast<double>(A.size()) * std::pow(4.0, -A.dim) * v * v;
}

namespace {
std::size_t rank_of_point(const std::vector<double>& p, const ShapeVector& r) {
  std::size_t rank = 0;
  for (int j = 0; j < r.dim(); ++j)
    rank = (rank << r[j]) | static_cast<std::size_t>(cell_index(p[static_cast<std::size_t>(j)], r[j]));
  return rank;
}
}  // namespace

std::vector<double> shape_coefficients(const PointSet& A, const ShapeVector& r) {
  if (r.dim() != A.dim) throw UsageError("shape dimension mismatch");
  if (r.weight() > 26) throw ResourceError("shape weight too large for coefficient table");
  const double v = std::ldexp(1.0, -r.weight());
  std::vector<double> c(std::size_t{1} << r.weight(), -static_cast<double>(A.size()) * std::pow(4.0, -A.dim) * v * v);
  for (const auto& p : A.points) {
    const std::size_t rank = rank_of_point(p, r);
    double t = 1;
    std::size_t rest = rank;
    for (int j = A.dim - 1; j >= 0; --j) {
      const auto off = static_cast<std::int64_t>(rest & ((std::size_t{1} << r[j]) - 1));
      rest >>= r[j];
      t *= tent_integral(p[static_cast<std::size_t>(j)], DyadicInterval(r[j], off));
    }
    c[rank] += t;
  }
  return c;
}

std::vector<bool> classify_rectangles(const PointSet& A, const ShapeVector& r) {
  if (r.dim() != A.dim) throw UsageError("shape dimension mismatch");
  std::vector<bool> good(std::size_t{1} << r.weight(), true);
  for (const auto& p : A.points) good[rank_of_point(p, r)] = false;
  return good;
}

RFunction build_r_function(const PointSet& A, const ShapeVector& r) {
  const auto c = shape_coefficients(A, r);
  RFunction f{r, std::vector<std::int8_t>(c.size())};
  for (std::size_t i = 0; i < c.size(); ++i) f.sign[i] = c[i] < 0 ? -1 : 1;
  return f;
}

double pairing(const PointSet& A, const RFunction& f) {
  const auto c = shape_coefficients(A, f.shape);
  if (c.size() != f.sign.size()) throw UsageError("r-function sign count mismatch");
  std::vector<double> t(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) t[i] = f.sign[i] * c[i];
  return pairwise_sum(t);
}

RothCertificate roth_certificate(const PointSet& A, int n, bool with_sup) {
  A.validate();
  RothCertificate cert;
  cert.N = A.size();
  cert.d = A.dim;
  cert.n = n < 0 ? scale_for(A.size()) : n;
  const auto shapes = hyperbolic_index(cert.n, A.dim);
  for (const auto& r : shapes) cert.per_shape.push_back(pairing(A, build_r_function(A, r)));
  cert.pairing = pairwise_sum(cert.per_shape);
  cert.l2_lower = cert.pairing / std::sqrt(static_cast<double>(shapes.size()));
  if (with_sup) cert.sup_disc = star_discrepancy_sup(A);
  return cert;
}

FarScaleReport far_scale_pairing(const PointSet& A, const RFunction& f) {
  FarScaleReport rep;
  rep.pairing = pairing(A, f);
  rep.bound = 4.0 * static_cast<double>(A.size()) * std::ldexp(1.0, -f.shape.weight());
  rep.ratio = std::abs(rep.pairing) / rep.bound;
  return rep;
}

double pair_with_grid(const PointSet& A, const GridFunction& g) {
  if (g.dim != A.dim) throw UsageError("grid dimension mismatch");
  A.validate();
  const int d = g.dim, m = g.resolution;
  const std::size_t L = std::size_t{1} << m;
  const double h = std::ldexp(1.0, -m);

  // Suffix sums T(i) = sum_{c >= i} g_c (componentwise); index L reads as zero.
  std::vector<double> T = g.values;
  for (int axis = 0; axis < d; ++axis) {
    const std::size_t stride = std::size_t{1} << (m * (d - 1 - axis));
    for (std::size_t outer = 0; outer < T.size(); outer += stride * L)
      for (std::size_t inner = 0; inner < stride; ++inner)
        for (std::size_t c = L - 1; c-- > 0;) T[outer + inner + c * stride] += T[outer + inner + (c + 1) * stride];
  }

  std::vector<double> above;
  above.reserve(A.size());
  std::vector<std::size_t> k(static_cast<std::size_t>(d));
  std::vector<double> theta(static_cast<std::size_t>(d));
  for (const auto& p : A.points) {
    for (int j = 0; j < d; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      k[jj] = static_cast<std::size_t>(cell_index(p[jj], m));
      theta[jj] = static_cast<double>(k[jj] + 1) * h - p[jj];
    }
    double s = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      double w = 1;
      std::size_t idx = 0;
      bool outside = false;
      for (int j = 0; j < d; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const bool up = (mask >> j) & 1;
        const std::size_t i = k[jj] + (up ? 1 : 0);
        if (i >= L) outside = true;
        idx = (idx << m) | (i & (L - 1));
        w *= up ? h - theta[jj] : theta[jj];
      }
      if (!outside && w != 0) s += w * T[idx];
    }
    above.push_back(s);
  }

  // N * integral of prod x_j g(x): contract one axis at a time.
  std::vector<double> cur = g.values;
  for (int axis = d - 1; axis >= 0; --axis) {
    std::vector<double> next(cur.size() / L, 0.0);
    for (std::size_t o = 0; o < next.size(); ++o)
      for (std::size_t c = 0; c < L; ++c) next[o] += cur[o * L + c] * (static_cast<double>(c) + 0.5) * h * h;
    cur.swap(next);
  }
  return pairwise_sum(above) - static_cast<double>(A.size()) * cur[0];
}

}  // namespace dlab
