#include "dlab/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dlab/rng.hpp"

namespace dlab {

namespace {

void check_length(int m) {
  if (m < 1) throw UsageError("code length must be positive");
  if (m > kMaxCodeLength) throw ResourceError("code length above " + std::to_string(kMaxCodeLength));
}

// Kernel vectors of the map x -> sum x_j col_j over GF(2).
std::vector<std::uint64_t> kernel(const std::vector<std::uint64_t>& cols) {
  struct Pivot {
    std::uint64_t vec = 0, mask = 0;
  };
  std::vector<Pivot> pivot(64);
  std::vector<std::uint64_t> out;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    std::uint64_t v = cols[j], mask = std::uint64_t{1} << j;
    while (v) {
      const int b = 63 - std::countl_zero(v);
      if (!pivot[static_cast<std::size_t>(b)].vec) {
        pivot[static_cast<std::size_t>(b)] = {v, mask};
        break;
      }
      v ^= pivot[static_cast<std::size_t>(b)].vec;
      mask ^= pivot[static_cast<std::size_t>(b)].mask;
    }
    if (!v) out.push_back(mask);
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> BinaryCode::codewords() const {
  std::vector<std::uint64_t> out(std::size_t{1} << k, 0);
  for (std::size_t i = 1; i < out.size(); ++i)
    out[i] = out[i & (i - 1)] ^ generators[static_cast<std::size_t>(std::countr_zero(i))];
  return out;
}

int vg_dimension(int m, int dmin) {
  if (m < 1 || dmin < 1 || dmin > m) throw UsageError("vg bound needs m >= dmin >= 1");
  if (m > 62) throw ResourceError("code length too large for exact arithmetic");
  std::uint64_t sum = 0, binom = 1;
  for (int i = 0; i <= dmin - 2; ++i) {
    sum += binom;
    binom = binom * static_cast<std::uint64_t>(m - 1 - i) / static_cast<std::uint64_t>(i + 1);
  }
  int r = 0;
  while (r <= m && (std::uint64_t{1} << r) <= sum) ++r;
  return r > m ? 0 : m - r;
}

int min_weight(const BinaryCode& c) {
  int best = c.m + 1;
  std::uint64_t w = 0;
  for (std::uint64_t i = 1; i < (std::uint64_t{1} << c.k); ++i) {
    w ^= c.generators[static_cast<std::size_t>(std::countr_zero(i))];
    best = std::min(best, std::popcount(w));
  }
  return best;
}

BinaryCode vg_code(int m, int dmin) {
  check_length(m);
  BinaryCode c;
  c.m = m;
  c.dmin = dmin;
  c.k = vg_dimension(m, dmin);
  if (c.k == m) {
    for (int j = 0; j < m; ++j) c.generators.push_back(std::uint64_t{1} << j);
  } else if (c.k > 0) {
    const int r = m - c.k;
    const std::size_t space = std::size_t{1} << r;
    // layer[t]: sums of at most t chosen columns
    std::vector<std::vector<std::uint8_t>> layer(static_cast<std::size_t>(dmin - 1),
                                                 std::vector<std::uint8_t>(space, 0));
    for (auto& l : layer) l[0] = 1;
    std::vector<std::uint64_t> cols;
    for (int j = 0; j < m; ++j) {
      const auto& forbidden = layer.back();
      std::size_t v = 1;
      while (v < space && forbidden[v]) ++v;
      if (v == space) throw std::logic_error("vg construction ran out of columns");
      cols.push_back(v);
      for (std::size_t t = layer.size(); t-- > 1;)
        for (std::size_t x = 0; x < space; ++x)
          if (layer[t - 1][x]) layer[t][x ^ v] = 1;
    }
    auto ker = kernel(cols);
    ker.resize(static_cast<std::size_t>(c.k));
    c.generators = std::move(ker);
  }
  c.min_distance = min_weight(c);
  if (c.min_distance < dmin) throw std::logic_error("vg code failed its distance check");
  return c;
}

std::vector<std::vector<int>> SeparatedFamily::subsets() const {
  std::vector<std::vector<int>> out;
  for (auto w : words) {
    std::vector<int> s;
    for (int i = 0; i < m; ++i)
      if ((w >> i) & 1) s.push_back(i + 1);
    out.push_back(std::move(s));
  }
  return out;
}

SeparatedFamily separated_family(int m) {
  check_length(m);
  auto feasible = [m](int t) { return vg_dimension(m, t) >= t; };
  int lo = 1, hi = m;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (feasible(mid)) lo = mid;
    else hi = mid - 1;
  }
  const int t = lo;
  int dlo = t, dhi = m;
  while (dlo < dhi) {
    const int mid = (dlo + dhi + 1) / 2;
    if (vg_dimension(m, mid) >= t) dlo = mid;
    else dhi = mid - 1;
  }
  BinaryCode code = vg_code(m, dlo);
  code.generators.resize(static_cast<std::size_t>(t));
  code.k = t;

  SeparatedFamily f;
  f.m = m;
  f.distance = dlo;
  f.dimension = t;
  f.alpha = static_cast<double>(t) / m;
  f.c = std::min(f.alpha, t * std::log(2.0) / m);
  f.words = code.codewords();
  f.min_sym_diff = m + 1;
  for (std::size_t i = 0; i < f.words.size(); ++i)
    for (std::size_t j = i + 1; j < f.words.size(); ++j)
      f.min_sym_diff = std::min(f.min_sym_diff, std::popcount(f.words[i] ^ f.words[j]));
  if (f.words.size() > 1 && f.min_sym_diff < f.distance)
    throw std::logic_error("separated family failed its distance check");
  return f;
}

double tent_primitive(const DyadicInterval& I, double x) {
  const double a = I.left(), l = I.length();
  if (x <= a || x >= a + l) return 0.0;
  return x < a + 0.5 * l ? -(x - a) : -(a + l - x);
}

double integrated_haar_eval(const DyadicRectangle& R, const std::vector<double>& x) {
  if (x.size() != R.sides.size()) throw UsageError("point dimension does not match the rectangle");
  double v = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) v *= tent_primitive(R.sides[j], x[j]);
  return v;
}

std::vector<double> integrated_vertices(const GridFunction& g, std::int64_t cap) {
  const int d = g.dim;
  const std::int64_t S = g.side(), W = S + 1;
  double total = std::pow(static_cast<double>(W), d);
  if (total > static_cast<double>(cap)) throw ResourceError("vertex grid exceeds the cell cap");
  std::vector<double> v(static_cast<std::size_t>(total), 0.0);
  const double vol = g.cell_volume();
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::size_t rest = i, idx = 0, mul = 1;
    for (int j = d - 1; j >= 0; --j) {
      idx += (rest % static_cast<std::size_t>(S) + 1) * mul;
      rest /= static_cast<std::size_t>(S);
      mul *= static_cast<std::size_t>(W);
    }
    v[idx] = g.values[i] * vol;
  }
  std::size_t stride = 1;
  for (int axis = d - 1; axis >= 0; --axis) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if ((i / stride) % static_cast<std::size_t>(W) != 0) v[i] += v[i - stride];
    stride *= static_cast<std::size_t>(W);
  }
  return v;
}

double smooth_sup(const HaarExpansion& H, int n, std::int64_t cap) {
  if (H.depth() > n) throw UsageError("expansion is deeper than n");
  const auto v = integrated_vertices(grid_evaluate(H, n + 1, cap), cap);
  double best = 0;
  for (double x : v) best = std::max(best, std::abs(x));
  return best;
}

SmoothSmallBallReport smooth_smallball_check(const HaarExpansion& H, int n, std::int64_t cap) {
  if (n < 1) throw UsageError("smooth small-ball check needs n >= 1");
  SmoothSmallBallReport r;
  r.n = n;
  r.d = H.dim;
  double s = 0;
  for (const auto& [R, a] : H.coef) {
    if (R.shape().weight() != n) throw UsageError("small-ball sums use only rectangles of volume 2^-n");
    s += std::abs(a);
  }
  r.lhs = std::ldexp(s, -2 * n);
  r.rhs = smooth_sup(H, n, cap);
  const double scale = std::pow(static_cast<double>(n), (r.d - 2) / 2.0);
  r.ratio = r.rhs > 0 ? r.lhs / (scale * r.rhs) : 0.0;
  return r;
}

EntropyReport entropy_experiment(int n, int d, int m_cap, std::size_t pair_budget, std::uint64_t seed,
                                 std::int64_t cap) {
  if (n < 1 || d < 1) throw UsageError("entropy experiment needs n, d >= 1");
  if (m_cap < 1 || m_cap > kMaxCodeLength) throw UsageError("m_cap must lie in 1..24");
  if (pair_budget == 0) throw UsageError("pair budget must be positive");

  std::vector<DyadicRectangle> rects;
  for (const auto& r : hyperbolic_index(n, d))
    for (auto& R : enumerate_rectangles(r)) rects.push_back(std::move(R));

  EntropyReport rep;
  rep.n = n;
  rep.d = d;
  rep.rectangles = static_cast<std::int64_t>(rects.size());
  const std::size_t M = rects.size();
  const std::size_t L = std::min(M, static_cast<std::size_t>(m_cap));
  rep.code_length = static_cast<int>(L);
  rep.group = static_cast<int>((M + L - 1) / L);

  const SeparatedFamily fam = separated_family(rep.code_length);
  rep.code_distance = fam.distance;
  rep.dimension = fam.dimension;
  rep.log_family = fam.dimension * std::log(2.0);
  rep.eps_ref = std::sqrt(static_cast<double>(n)) * std::ldexp(1.0, -n);

  // rectangle i carries code coordinate i mod L
  std::vector<std::int64_t> group_size(L, 0);
  std::vector<HaarExpansion> groups(L, HaarExpansion(d));
  for (std::size_t i = 0; i < M; ++i) {
    groups[i % L].add(rects[i], 1.0);
    ++group_size[i % L];
  }
  std::vector<std::vector<double>> basis;
  for (const auto& H : groups) basis.push_back(integrated_vertices(grid_evaluate(H, n + 1, cap), cap));
  const std::size_t V = basis.front().size();
  const double norm = std::pow(static_cast<double>(n), (1.0 - d) / 2.0);

  auto member = [&](std::uint64_t w) {
    std::vector<double> u(V, 0.0);
    for (int b = 0; b < rep.code_length; ++b) {
      const double s = ((w >> b) & 1) ? 1.0 : -1.0;
      const auto& B = basis[static_cast<std::size_t>(b)];
      for (std::size_t i = 0; i < V; ++i) u[i] += s * B[i];
    }
    return u;
  };

  const std::size_t F = fam.words.size();
  rep.total_pairs = F * (F - 1) / 2;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (rep.total_pairs <= pair_budget) {
    for (std::size_t i = 0; i < F; ++i)
      for (std::size_t j = i + 1; j < F; ++j) pairs.emplace_back(i, j);
  } else {
    rep.sampled = true;
    CounterRng rng(seed, 0);
    for (std::size_t t = 0; t < pair_budget; ++t) {
      std::size_t i = rng.below(F), j = rng.below(F - 1);
      if (j >= i) ++j;
      pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  rep.pairs_checked = pairs.size();

  const bool cache = static_cast<double>(F) * static_cast<double>(V) <= static_cast<double>(cap);
  std::vector<std::vector<double>> members;
  if (cache)
    for (auto w : fam.words) members.push_back(member(w));

  rep.min_sym_diff = std::numeric_limits<std::int64_t>::max();
  rep.min_separation = std::numeric_limits<double>::infinity();
  for (auto [i, j] : pairs) {
    const std::uint64_t diff = fam.words[i] ^ fam.words[j];
    std::int64_t sym = 0;
    for (int b = 0; b < rep.code_length; ++b)
      if ((diff >> b) & 1) sym += group_size[static_cast<std::size_t>(b)];
    rep.min_sym_diff = std::min(rep.min_sym_diff, sym);
    std::vector<double> ui, uj;
    if (!cache) {
      ui = member(fam.words[i]);
      uj = member(fam.words[j]);
    }
    const auto& a = cache ? members[i] : ui;
    const auto& b = cache ? members[j] : uj;
    double sup = 0;
    for (std::size_t c = 0; c < V; ++c) sup = std::max(sup, std::abs(a[c] - b[c]));
    rep.min_separation = std::min(rep.min_separation, norm * sup);
  }
  if (pairs.empty()) {
    rep.min_sym_diff = 0;
    rep.min_separation = 0;
  }
  rep.ze_big_ratio = 2.0 * static_cast<double>(rep.min_sym_diff) /
                     (std::pow(static_cast<double>(n), d - 1) * std::ldexp(1.0, n));
  rep.kappa = rep.min_separation / rep.eps_ref;
  return rep;
}

}  // namespace dlab
