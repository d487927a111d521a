#include "dlab/haar_field.hpp"

#include <algorithm>
#include <cmath>

#include "dlab/rng.hpp"
#include "dlab/stats.hpp"

namespace dlab {

std::int64_t checked_cell_count(int d, int m, std::int64_t cap) {
  if (d < 1) throw UsageError("grid dimension must be positive");
  if (m < 0) throw UsageError("grid resolution must be non-negative");
  if (static_cast<long long>(d) * m > 62) throw ResourceError("grid size overflows");
  const std::int64_t cells = std::int64_t{1} << (d * m);
  if (cells > cap)
    throw ResourceError("grid of 2^" + std::to_string(d * m) + " cells exceeds cap of " + std::to_string(cap));
  return cells;
}

GridFunction GridFunction::zeros(int d, int m, std::int64_t cap) { return constant(d, m, 0.0, cap); }

GridFunction GridFunction::constant(int d, int m, double c, std::int64_t cap) {
  GridFunction g;
  g.dim = d;
  g.resolution = m;
  g.values.assign(static_cast<std::size_t>(checked_cell_count(d, m, cap)), c);
  return g;
}

double GridFunction::cell_volume() const { return std::ldexp(1.0, -dim * resolution); }

std::int64_t GridFunction::index(std::span<const std::int64_t> cell) const {
  std::int64_t idx = 0;
  for (auto c : cell) idx = (idx << resolution) | c;
  return idx;
}

std::vector<std::int64_t> GridFunction::cell_of(std::int64_t idx) const {
  std::vector<std::int64_t> c(static_cast<std::size_t>(dim));
  const std::int64_t mask = side() - 1;
  for (int j = dim - 1; j >= 0; --j) {
    c[static_cast<std::size_t>(j)] = idx & mask;
    idx >>= resolution;
  }
  return c;
}

double GridFunction::at(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != dim) throw UsageError("point dimension mismatch");
  std::int64_t idx = 0;
  for (double xi : x) idx = (idx << resolution) | cell_index(xi, resolution);
  return values[static_cast<std::size_t>(idx)];
}

GridFunction& GridFunction::operator*=(const GridFunction& o) {
  if (o.dim != dim || o.resolution != resolution) throw UsageError("grid shape mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] *= o.values[i];
  return *this;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  if (o.dim != dim || o.resolution != resolution) throw UsageError("grid shape mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

double mean(const GridFunction& g) { return pairwise_sum(g.values) * g.cell_volume(); }

double inner(const GridFunction& f, const GridFunction& g) {
  if (f.dim != g.dim || f.resolution != g.resolution) throw UsageError("grid shape mismatch");
  std::vector<double> prod(f.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = f.values[i] * g.values[i];
  return pairwise_sum(prod) * f.cell_volume();
}

double lp_norm(const GridFunction& g, double p) {
  if (!(p >= 1.0)) throw UsageError("p must be at least 1");
  if (std::isinf(p)) return sup_norm(g);
  std::vector<double> a(g.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(std::abs(g.values[i]), p);
  return std::pow(pairwise_sum(a) * g.cell_volume(), 1.0 / p);
}

double sup_norm(const GridFunction& g) {
  double s = 0;
  for (double v : g.values) s = std::max(s, std::abs(v));
  return s;
}

GridFunction refine(const GridFunction& g, int m, std::int64_t cap) {
  if (m < g.resolution) throw UsageError("refine cannot coarsen");
  GridFunction out = GridFunction::zeros(g.dim, m, cap);
  const int shift = m - g.resolution;
  const std::int64_t fine_mask = (std::int64_t{1} << m) - 1;
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::int64_t idx = static_cast<std::int64_t>(i), coarse = 0;
    for (int j = 0; j < g.dim; ++j) {
      const std::int64_t c = (idx >> (m * (g.dim - 1 - j))) & fine_mask;
      coarse = (coarse << g.resolution) | (c >> shift);
    }
    out.values[i] = g.values[static_cast<std::size_t>(coarse)];
  }
  return out;
}

void HaarExpansion::add(const DyadicRectangle& R, double a) {
  if (R.dim() != dim) throw UsageError("rectangle dimension does not match expansion");
  coef[R] += a;
}

int HaarExpansion::depth() const {
  int k = -1;
  for (const auto& [R, a] : coef)
    for (const auto& I : R.sides) k = std::max(k, I.scale);
  return k;
}

std::size_t haar_slot(const DyadicInterval& I) {
  return (std::size_t{1} << I.scale) + static_cast<std::size_t>(I.offset);
}

std::vector<double> coefficient_tensor(const HaarExpansion& e, int m) {
  if (e.depth() >= m) throw UsageError("resolution too small for expansion depth");
  std::vector<double> a(std::size_t{1} << (e.dim * m), 0.0);
  a[0] = e.mean;
  for (const auto& [R, c] : e.coef) {
    std::size_t idx = 0;
    for (const auto& I : R.sides) idx = (idx << m) | haar_slot(I);
    a[idx] += c;
  }
  return a;
}

namespace {

// Calls fn(base, stride, step, B) for blocks of B lines along an axis;
// element i of line b sits at base + i * stride + b * step.
template <class Fn>
void for_each_line_block(std::size_t total, int d, int m, int axis, Fn&& fn) {
  const std::size_t L = std::size_t{1} << m;
  const std::size_t stride = std::size_t{1} << (m * (d - 1 - axis));
  if (stride == 1) {
    const std::size_t lines = total / L, B = std::min<std::size_t>(lines, 64);
    for (std::size_t l = 0; l < lines; l += B) fn(l * L, 1, L, B);
    return;
  }
  const std::size_t B = std::min<std::size_t>(stride, 64);
  for (std::size_t outer = 0; outer < total; outer += stride * L)
    for (std::size_t inner = 0; inner < stride; inner += B) fn(outer + inner, stride, 1, B);
}

template <bool Indicator>
void synth_block(double* a, std::size_t stride, std::size_t step, std::size_t B, int m, double* coef, double* cur,
                 double* nxt) {
  const std::size_t L = std::size_t{1} << m;
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t b = 0; b < B; ++b) coef[i * B + b] = a[i * stride + b * step];
  for (std::size_t b = 0; b < B; ++b) cur[b] = coef[b];
  for (int k = 0; k < m; ++k) {
    const std::size_t n = std::size_t{1} << k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* c = coef + (n + j) * B;
      const double* x = cur + j * B;
      double* lo = nxt + 2 * j * B;
      double* hi = lo + B;
      for (std::size_t b = 0; b < B; ++b) {
        lo[b] = Indicator ? x[b] + c[b] : x[b] - c[b];
        hi[b] = x[b] + c[b];
      }
    }
    std::swap(cur, nxt);
  }
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t b = 0; b < B; ++b) a[i * stride + b * step] = cur[i * B + b];
}

void analysis_block(double* a, std::size_t stride, std::size_t step, std::size_t B, int m,
                    std::vector<double>& sums, std::vector<double>& out) {
  const std::size_t L = std::size_t{1} << m;
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t b = 0; b < B; ++b) sums[i * B + b] = a[i * stride + b * step];
  for (int k = m - 1; k >= 0; --k) {
    const std::size_t n = std::size_t{1} << k;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t b = 0; b < B; ++b) {
        const double l = sums[2 * j * B + b], r = sums[(2 * j + 1) * B + b];
        out[(n + j) * B + b] = r - l;
        sums[j * B + b] = l + r;
      }
  }
  for (std::size_t b = 0; b < B; ++b) out[b] = sums[b];
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t b = 0; b < B; ++b) a[i * stride + b * step] = out[i * B + b];
}

void check_tensor(const std::vector<double>& a, int d, int m) {
  if (a.size() != (std::size_t{1} << (d * m))) throw UsageError("tensor size does not match 2^(d*m)");
}

void run_synthesis(std::vector<double>& a, int d, int m, bool indicator) {
  check_tensor(a, d, m);
  std::vector<double> coef(std::size_t{64} << m), cur(std::size_t{64} << m), nxt(std::size_t{64} << m);
  for (int axis = 0; axis < d; ++axis)
    for_each_line_block(a.size(), d, m, axis, [&](std::size_t base, std::size_t stride, std::size_t step, std::size_t B) {
      if (indicator)
        synth_block<true>(a.data() + base, stride, step, B, m, coef.data(), cur.data(), nxt.data());
      else
        synth_block<false>(a.data() + base, stride, step, B, m, coef.data(), cur.data(), nxt.data());
    });
}
}  // namespace

void haar_synthesis(std::vector<double>& a, int d, int m) { run_synthesis(a, d, m, false); }

void indicator_synthesis(std::vector<double>& a, int d, int m) { run_synthesis(a, d, m, true); }

void haar_analysis(std::vector<double>& a, int d, int m) {
  check_tensor(a, d, m);
  std::vector<double> sums(std::size_t{64} << m), out(std::size_t{64} << m);
  for (int axis = 0; axis < d; ++axis)
    for_each_line_block(a.size(), d, m, axis, [&](std::size_t base, std::size_t stride, std::size_t step, std::size_t B) {
      analysis_block(a.data() + base, stride, step, B, m, sums, out);
    });
  const double vol = std::ldexp(1.0, -d * m);
  for (double& x : a) x *= vol;
}

GridFunction grid_evaluate(const HaarExpansion& e, int resolution, std::int64_t cap) {
  const int m = resolution < 0 ? std::max(0, e.grid_resolution()) : resolution;
  checked_cell_count(e.dim, m, cap);
  GridFunction g;
  g.dim = e.dim;
  g.resolution = m;
  g.values = coefficient_tensor(e, m);
  haar_synthesis(g.values, e.dim, m);
  return g;
}

GridFunction grid_evaluate_direct(const HaarExpansion& e, int m, std::int64_t cap) {
  if (e.depth() >= m) throw UsageError("resolution too small for expansion depth");
  GridFunction g = GridFunction::constant(e.dim, m, e.mean, cap);
  const double h = std::ldexp(1.0, -m);
  std::vector<double> x(static_cast<std::size_t>(e.dim));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.cell_of(static_cast<std::int64_t>(i));
    for (int j = 0; j < e.dim; ++j) x[static_cast<std::size_t>(j)] = (static_cast<double>(c[static_cast<std::size_t>(j)]) + 0.5) * h;
    for (const auto& [R, a] : e.coef) g.values[i] += a * haar_eval(R, x);
  }
  return g;
}

HaarExpansion haar_coefficients(const GridFunction& g, double tol) {
  std::vector<double> a = g.values;
  const int d = g.dim, m = g.resolution;
  haar_analysis(a, d, m);
  HaarExpansion e(d);
  e.mean = a[0];
  const std::size_t L = std::size_t{1} << m;
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    std::vector<DyadicInterval> sides;
    std::size_t rest = idx;
    bool full = true;
    std::vector<std::size_t> slots(static_cast<std::size_t>(d));
    for (int j = d - 1; j >= 0; --j) {
      slots[static_cast<std::size_t>(j)] = rest & (L - 1);
      rest >>= m;
    }
    for (auto s : slots) {
      if (s == 0) {
        full = false;
        break;
      }
      int k = 0;
      while ((std::size_t{2} << k) <= s) ++k;
      sides.emplace_back(k, static_cast<std::int64_t>(s - (std::size_t{1} << k)));
    }
    if (!full) continue;
    DyadicRectangle R(std::move(sides));
    const double coefficient = a[idx] / R.volume();
    if (std::abs(coefficient) > tol) e.coef.emplace(std::move(R), coefficient);
  }
  return e;
}

HaarProduct::Kind HaarProduct::kind() const {
  if (zero) return Kind::Zero;
  const auto haar = std::count(haar_axis.begin(), haar_axis.end(), true);
  if (haar == 0) return Kind::Indicator;
  if (haar == static_cast<long>(haar_axis.size())) return Kind::SignedHaar;
  return Kind::Mixed;
}

double HaarProduct::eval(const std::vector<double>& x) const {
  if (zero) return 0.0;
  double v = sign;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& I = support.sides[j];
    v *= haar_axis[j] ? haar_eval(I, x[j]) : (I.contains(x[j]) ? 1.0 : 0.0);
  }
  return v;
}

HaarProduct haar_product(std::span<const DyadicRectangle> terms) {
  if (terms.empty()) throw UsageError("empty product");
  const int d = terms[0].dim();
  HaarProduct p;
  p.haar_axis.assign(static_cast<std::size_t>(d), false);
  std::vector<DyadicInterval> support;
  for (int j = 0; j < d; ++j) {
    // smallest interval on this axis; all others must contain it
    const DyadicInterval* small = &terms[0].sides[static_cast<std::size_t>(j)];
    for (const auto& R : terms) {
      if (R.dim() != d) throw UsageError("mixed dimensions in product");
      const auto& I = R.sides[static_cast<std::size_t>(j)];
      if (I.scale > small->scale) small = &I;
    }
    int multiplicity = 0;
    for (const auto& R : terms) {
      const auto& I = R.sides[static_cast<std::size_t>(j)];
      if (!I.contains(*small)) {
        p.zero = true;
        return p;
      }
      if (I == *small) {
        ++multiplicity;
      } else {
        // h_I is constant on the smaller interval
        const bool right = small->offset >> (small->scale - I.scale - 1) & 1;
        if (!right) p.sign = -p.sign;
      }
    }
    p.haar_axis[static_cast<std::size_t>(j)] = multiplicity % 2 == 1;
    support.push_back(*small);
  }
  p.support = DyadicRectangle(std::move(support));
  return p;
}

GridFunction grid_evaluate(const HaarProduct& p, int m, std::int64_t cap) {
  GridFunction g = GridFunction::zeros(static_cast<int>(p.haar_axis.size()), m, cap);
  if (p.zero) return g;
  for (const auto& I : p.support.sides)
    if (I.scale + 1 > m) throw UsageError("resolution too small for product");
  const double h = std::ldexp(1.0, -m);
  std::vector<double> x(p.haar_axis.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.cell_of(static_cast<std::int64_t>(i));
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = (static_cast<double>(c[j]) + 0.5) * h;
    g.values[i] = p.eval(x);
  }
  return g;
}

GridFunction square_function(const HaarExpansion& e, int resolution, std::int64_t cap) {
  const int m = resolution < 0 ? std::max(0, e.grid_resolution()) : resolution;
  checked_cell_count(e.dim, m, cap);
  HaarExpansion sq(e.dim);
  sq.mean = e.mean * e.mean;
  for (const auto& [R, a] : e.coef) sq.coef.emplace(R, a * a);
  GridFunction g;
  g.dim = e.dim;
  g.resolution = m;
  g.values = coefficient_tensor(sq, m);
  indicator_synthesis(g.values, e.dim, m);
  for (double& v : g.values) v = std::sqrt(std::max(0.0, v));
  return g;
}

ParsevalReport parseval_check(const HaarExpansion& e, std::int64_t cap) {
  ParsevalReport r;
  const GridFunction f = grid_evaluate(e, -1, cap);
  const double l2 = lp_norm(f, 2.0);
  r.norm_squared = l2 * l2;
  std::vector<double> terms{e.mean * e.mean};
  for (const auto& [R, a] : e.coef) terms.push_back(a * a * R.volume());
  r.coefficient_sum = pairwise_sum(terms);
  const double s = lp_norm(square_function(e, f.resolution, cap), 2.0);
  r.square_function_l2 = s * s;
  return r;
}

OrliczReport orlicz_surrogate(const GridFunction& g, double alpha, int p_max) {
  if (!(alpha > 0)) throw UsageError("alpha must be positive");
  if (p_max < 1) throw UsageError("p_max must be at least 1");
  OrliczReport r;
  r.value = -1;
  for (int p = 1; p <= p_max; ++p) {
    const double v = std::pow(static_cast<double>(p), -1.0 / alpha) * lp_norm(g, p);
    r.profile.push_back(v);
    if (v > r.value) {
      r.value = v;
      r.argmax_p = p;
    }
  }
  return r;
}

GridFunction dyadic_maximal(const GridFunction& g, bool absolute) {
  const int d = g.dim, m = g.resolution;
  GridFunction out = g;
  std::fill(out.values.begin(), out.values.end(), -INFINITY);
  std::vector<double> src = g.values;
  if (absolute)
    for (double& v : src) v = std::abs(v);
  std::vector<int> lv(static_cast<std::size_t>(d), 0);
  std::vector<double> pooled;
  while (true) {
    int total = 0;
    for (int k : lv) total += k;
    pooled.assign(std::size_t{1} << total, 0.0);
    // cell index -> pooled index by dropping low bits per axis
    auto pooled_index = [&](std::size_t idx) {
      std::size_t p = 0;
      for (int j = 0; j < d; ++j) {
        const std::size_t c = (idx >> (m * (d - 1 - j))) & ((std::size_t{1} << m) - 1);
        p = (p << lv[static_cast<std::size_t>(j)]) | (c >> (m - lv[static_cast<std::size_t>(j)]));
      }
      return p;
    };
    for (std::size_t i = 0; i < src.size(); ++i) pooled[pooled_index(i)] += src[i];
    const double scale = std::ldexp(1.0, total - d * m);
    for (double& v : pooled) v *= scale;
    for (std::size_t i = 0; i < src.size(); ++i) out.values[i] = std::max(out.values[i], pooled[pooled_index(i)]);
    int j = d - 1;
    while (j >= 0 && ++lv[static_cast<std::size_t>(j)] > m) lv[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
  }
  return out;
}

CZDecomposition cz_decompose(const GridFunction& g, double lambda) {
  if (g.dim != 1) throw UsageError("Calderon-Zygmund decomposition is one-dimensional");
  if (!(lambda > 0)) throw UsageError("lambda must be positive");
  const int m = g.resolution;
  // abs_sums[k][j]: sum of |g| over the cells of interval (k, j)
  std::vector<std::vector<double>> abs_sums(static_cast<std::size_t>(m + 1));
  abs_sums[static_cast<std::size_t>(m)].resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) abs_sums[static_cast<std::size_t>(m)][i] = std::abs(g.values[i]);
  for (int k = m - 1; k >= 0; --k) {
    auto& up = abs_sums[static_cast<std::size_t>(k)];
    const auto& lo = abs_sums[static_cast<std::size_t>(k + 1)];
    up.resize(std::size_t{1} << k);
    for (std::size_t j = 0; j < up.size(); ++j) up[j] = lo[2 * j] + lo[2 * j + 1];
  }
  CZDecomposition out;
  out.good = g;
  out.bad = GridFunction::zeros(1, m);
  std::vector<char> covered(g.size(), 0);
  for (int k = 0; k <= m; ++k) {
    const std::size_t cells_per = std::size_t{1} << (m - k);
    for (std::size_t j = 0; j < (std::size_t{1} << k); ++j) {
      if (covered[j * cells_per]) continue;
      const double avg = abs_sums[static_cast<std::size_t>(k)][j] / static_cast<double>(cells_per);
      if (avg < lambda) continue;
      out.intervals.emplace_back(k, static_cast<std::int64_t>(j));
      double s = 0;
      for (std::size_t i = j * cells_per; i < (j + 1) * cells_per; ++i) s += g.values[i];
      const double mu = s / static_cast<double>(cells_per);
      for (std::size_t i = j * cells_per; i < (j + 1) * cells_per; ++i) {
        covered[i] = 1;
        out.good.values[i] = mu;
        out.bad.values[i] = g.values[i] - mu;
      }
    }
  }
  return out;
}

std::vector<TailRow> rademacher_tail(std::span<const double> weights, std::span<const double> ts,
                                     std::size_t trials, std::uint64_t seed, std::uint64_t stream) {
  if (weights.empty()) throw UsageError("no weights");
  if (trials == 0) throw UsageError("trials must be positive");
  std::vector<std::size_t> hits(ts.size(), 0);
  CounterRng rng(seed, stream);
  const bool equal = std::all_of(weights.begin(), weights.end(), [&](double w) { return w == weights[0]; });
  for (std::size_t t = 0; t < trials; ++t) {
    double s = 0;
    if (equal) {
      long long plus = 0;
      std::size_t k = 0;
      for (; k + 64 <= weights.size(); k += 64) plus += __builtin_popcountll(rng());
      if (k < weights.size()) plus += __builtin_popcountll(rng() >> (64 - (weights.size() - k)));
      s = weights[0] * static_cast<double>(2 * plus - static_cast<long long>(weights.size()));
    } else {
      std::uint64_t bits = 0;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        if (k % 64 == 0) bits = rng();
        s += (bits & 1) ? weights[k] : -weights[k];
        bits >>= 1;
      }
    }
    for (std::size_t i = 0; i < ts.size(); ++i)
      if (s > ts[i]) ++hits[i];
  }
  std::vector<TailRow> rows;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    TailRow r;
    r.t = ts[i];
    r.p_hat = static_cast<double>(hits[i]) / static_cast<double>(trials);
    std::tie(r.wilson_lo, r.wilson_hi) = wilson_interval(hits[i], trials);
    r.bound = std::exp(-r.t * r.t / 4);
    const double sigma = std::sqrt(r.bound * (1 - r.bound) / static_cast<double>(trials));
    r.violation = r.p_hat > r.bound + 3 * sigma;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace dlab

namespace dlab {

RFunction random_rfunction(const ShapeVector& r, CounterRng& rng) {
  RFunction f{r, {}};
  const std::size_t count = std::size_t{1} << r.weight();
  f.sign.resize(count);
  for (auto& s : f.sign) s = static_cast<std::int8_t>(rng.sign());
  return f;
}

HaarExpansion to_expansion(const RFunction& f) {
  HaarExpansion e(f.shape.dim());
  const auto rects = enumerate_rectangles(f.shape);
  for (std::size_t i = 0; i < rects.size(); ++i) e.coef.emplace(rects[i], f.sign[i]);
  return e;
}

std::vector<std::int8_t> rfunction_cells(const RFunction& f, int m, std::int64_t cap) {
  const int d = f.shape.dim();
  for (int r : f.shape.r)
    if (r + 1 > m) throw UsageError("resolution too small for r-function");
  const std::size_t cells = static_cast<std::size_t>(checked_cell_count(d, m, cap));
  if (f.sign.size() != (std::size_t{1} << f.shape.weight())) throw UsageError("r-function sign count mismatch");
  std::vector<std::int8_t> out(cells);
  const std::size_t mask = (std::size_t{1} << m) - 1;
  for (std::size_t i = 0; i < cells; ++i) {
    std::size_t rank = 0;
    int s = 1;
    for (int j = 0; j < d; ++j) {
      const std::size_t c = (i >> (m * (d - 1 - j))) & mask;
      const int r = f.shape[j];
      rank = (rank << r) | (c >> (m - r));
      if (!((c >> (m - r - 1)) & 1)) s = -s;
    }
    out[i] = static_cast<std::int8_t>(s * f.sign[rank]);
  }
  return out;
}

GridFunction rfunction_grid(const RFunction& f, int m, std::int64_t cap) {
  const auto cells = rfunction_cells(f, m, cap);
  GridFunction g;
  g.dim = f.shape.dim();
  g.resolution = m;
  g.values.assign(cells.begin(), cells.end());
  return g;
}

}  // namespace dlab
