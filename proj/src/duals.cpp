#include "dlab/duals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dlab/rng.hpp"
#include "dlab/stats.hpp"

namespace dlab {

HaarExpansion random_expansion_upto(int n, int d, CounterRng& rng) {
  HaarExpansion H(d);
  for (int w = 0; w <= n; ++w)
    for (const auto& r : hyperbolic_index(w, d))
      for (auto& R : enumerate_rectangles(r)) H.coef.emplace(std::move(R), rng.uniform(-1, 1));
  return H;
}

HaarExpansion random_sign_hyperbolic(int n, int d, CounterRng& rng) {
  HaarExpansion H(d);
  for (const auto& r : hyperbolic_index(n, d))
    for (auto& R : enumerate_rectangles(r)) H.coef.emplace(std::move(R), rng.sign());
  return H;
}

RFunction sign_function(const HaarExpansion& H, const ShapeVector& r) {
  RFunction f{r, std::vector<std::int8_t>(std::size_t{1} << r.weight(), 0)};
  std::vector<std::int64_t> lo(static_cast<std::size_t>(r.dim()), 0);
  auto it = H.coef.lower_bound(DyadicRectangle(r, lo));
  for (; it != H.coef.end(); ++it) {
    if (it->first.shape() != r) {
      if (it->first.sides[0].scale > r[0]) break;
      continue;
    }
    const double a = it->second;
    f.sign[static_cast<std::size_t>(rectangle_rank(it->first))] = static_cast<std::int8_t>((a > 0) - (a < 0));
  }
  return f;
}

namespace {

GridFunction from_ints(const std::vector<std::int32_t>& v, int d, int m, double scale) {
  GridFunction g;
  g.dim = d;
  g.resolution = m;
  g.values.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) g.values[i] = scale * v[i];
  return g;
}

double grid_min(const GridFunction& g) { return *std::min_element(g.values.begin(), g.values.end()); }

}  // namespace

GridFunction temlyakov_psi(const HaarExpansion& H, int n, std::int64_t cap) {
  if (H.dim != 2) throw UsageError("Temlyakov product is two-dimensional");
  const int m = n + 1;
  GridFunction psi = GridFunction::constant(2, m, 1.0, cap);
  for (int s = 0; s <= n; ++s) {
    const auto f = rfunction_cells(sign_function(H, ShapeVector({s, n - s})), m, cap);
    for (std::size_t i = 0; i < psi.size(); ++i) psi.values[i] *= 1.0 + 0.5 * f[i];
  }
  return psi;
}

TemlyakovReport temlyakov_dual(const HaarExpansion& H, int n, std::int64_t cap) {
  if (H.depth() > n) throw UsageError("expansion has terms finer than 2^-n");
  TemlyakovReport rep;
  rep.n = n;
  const GridFunction psi = temlyakov_psi(H, n, cap);
  rep.mean = mean(psi);
  rep.min_value = grid_min(psi);
  std::vector<double> a = psi.values;
  haar_analysis(a, 2, psi.resolution);
  std::vector<double> terms, top;
  for (const auto& [R, c] : H.coef) {
    std::size_t idx = 0;
    for (const auto& I : R.sides) idx = (idx << psi.resolution) | haar_slot(I);
    terms.push_back(c * a[idx]);
    if (R.shape().weight() == n) top.push_back(std::abs(c));
  }
  rep.pairing = pairwise_sum(terms);
  rep.predicted = std::ldexp(pairwise_sum(top), -n - 1);
  return rep;
}

SchmidtReport schmidt_dual(const PointSet& A, double alpha, int n, std::int64_t cap) {
  if (A.dim != 2) throw UsageError("Schmidt product is two-dimensional");
  if (!(alpha > 0 && alpha < 1)) throw UsageError("alpha must lie in (0,1)");
  SchmidtReport rep;
  rep.N = A.size();
  rep.n = n < 0 ? scale_for(A.size()) : n;
  rep.alpha = alpha;
  const int m = rep.n + 1;
  GridFunction psi = GridFunction::constant(2, m, 1.0, cap);
  std::vector<double> shape_pairings;
  for (const auto& r : hyperbolic_index(rep.n, 2)) {
    const RFunction f = build_r_function(A, r);
    shape_pairings.push_back(pairing(A, f));
    const auto c = rfunction_cells(f, m, cap);
    for (std::size_t i = 0; i < psi.size(); ++i) psi.values[i] *= 1.0 + alpha * c[i];
  }
  rep.pairing = pair_with_grid(A, psi);
  rep.constant_term = pair_with_grid(A, GridFunction::constant(2, 0, 1.0));
  rep.main_term = alpha * pairwise_sum(shape_pairings);
  rep.tail = rep.pairing - rep.constant_term - rep.main_term;
  rep.main_lower_bound = alpha * static_cast<double>(shape_pairings.size()) * std::ldexp(1.0, -8);
  rep.tail_bound = 4.0 * rep.n * alpha * alpha;
  rep.mean = mean(psi);
  rep.min_value = grid_min(psi);
  return rep;
}

namespace {
std::vector<std::int32_t> r_function_sum(const PointSet& A, int n, int m, std::int64_t cap) {
  std::vector<std::int32_t> s(static_cast<std::size_t>(checked_cell_count(A.dim, m, cap)), 0);
  for (const auto& r : hyperbolic_index(n, A.dim)) {
    const auto c = rfunction_cells(build_r_function(A, r), m, cap);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += c[i];
  }
  return s;
}
}  // namespace

HalaszComplexReport halasz_complex_dual(const PointSet& A, double a, int n, std::int64_t cap) {
  if (A.dim != 2) throw UsageError("Halasz product is two-dimensional");
  HalaszComplexReport rep;
  rep.n = n < 0 ? scale_for(A.size()) : n;
  if (rep.n < 1) throw UsageError("n must be positive");
  const int m = rep.n + 1;
  const double c = a / std::sqrt(static_cast<double>(rep.n));
  std::vector<std::complex<double>> psi(static_cast<std::size_t>(checked_cell_count(2, m, cap)), 1.0);
  const auto shapes = hyperbolic_index(rep.n, 2);
  for (const auto& r : shapes) {
    const auto f = rfunction_cells(build_r_function(A, r), m, cap);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= std::complex<double>(1.0, c * f[i]);
  }
  GridFunction im = GridFunction::zeros(2, m, cap);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    im.values[i] = psi[i].imag();
    rep.sup_modulus = std::max(rep.sup_modulus, std::abs(psi[i]));
  }
  rep.pairing = pair_with_grid(A, im);
  rep.modulus_bound = std::pow(1.0 + c * c, static_cast<double>(shapes.size()) / 2);
  return rep;
}

HalaszSineReport halasz_sine_dual(const PointSet& A, double a, int n, std::int64_t cap) {
  if (A.dim != 2) throw UsageError("Halasz product is two-dimensional");
  HalaszSineReport rep;
  rep.n = n < 0 ? scale_for(A.size()) : n;
  if (rep.n < 1) throw UsageError("n must be positive");
  const int m = rep.n + 1;
  const double c = a / std::sqrt(static_cast<double>(rep.n));
  const auto s = r_function_sum(A, rep.n, m, cap);
  GridFunction phi = GridFunction::zeros(2, m, cap);
  for (std::size_t i = 0; i < s.size(); ++i) phi.values[i] = std::sin(c * s[i]);
  rep.pairing = pair_with_grid(A, phi);
  rep.normalized = rep.pairing / std::sqrt(static_cast<double>(rep.n));
  rep.sup = sup_norm(phi);
  return rep;
}

double parity_word_count(int len, int v, int m) {
  if (len < 0 || v < 0 || v > m) throw UsageError("bad word-count arguments");
  // ways[u]: number of ways to place the letters processed so far in u chosen slots
  std::vector<double> binom(static_cast<std::size_t>(len + 1) * static_cast<std::size_t>(len + 1), 0);
  auto C = [&](int a, int b) -> double& { return binom[static_cast<std::size_t>(a * (len + 1) + b)]; };
  for (int a = 0; a <= len; ++a) {
    C(a, 0) = 1;
    for (int b = 1; b <= a; ++b) C(a, b) = C(a - 1, b - 1) + (b <= a - 1 ? C(a - 1, b) : 0);
  }
  std::vector<double> ways(static_cast<std::size_t>(len + 1), 0);
  ways[0] = 1;
  for (int letter = 0; letter < m; ++letter) {
    const int parity = letter < v ? 1 : 0;
    std::vector<double> next(ways.size(), 0);
    for (int u = 0; u <= len; ++u) {
      if (ways[static_cast<std::size_t>(u)] == 0) continue;
      for (int c = parity; u + c <= len; c += 2)
        next[static_cast<std::size_t>(u + c)] += ways[static_cast<std::size_t>(u)] * C(len - u, c);
    }
    ways.swap(next);
  }
  return ways[static_cast<std::size_t>(len)];
}

ExpansionCheck expansion_check(int n, int k, std::uint64_t seed, double t, std::int64_t cap) {
  if (n < 1 || k < 0) throw UsageError("expansion check needs n >= 1 and k >= 0");
  const int m = n + 1;
  const auto shapes = hyperbolic_index(n, 2);
  const int count = static_cast<int>(shapes.size());
  CounterRng rng(seed, 0x6b70);
  std::vector<std::vector<std::int8_t>> f;
  for (const auto& r : shapes) f.push_back(rfunction_cells(random_rfunction(r, rng), m, cap));
  const std::size_t cells = f[0].size();
  const int power = 2 * k + 1;

  // e[v]: sum over v-subsets of the product; G_v = v! e[v] sums ordered distinct tuples.
  std::vector<std::vector<double>> e(static_cast<std::size_t>(count + 1), std::vector<double>(cells, 0.0));
  for (std::uint32_t mask = 0; mask < (1u << count); ++mask) {
    auto& row = e[static_cast<std::size_t>(__builtin_popcount(mask))];
    for (std::size_t c = 0; c < cells; ++c) {
      int prod = 1;
      for (int i = 0; i < count; ++i)
        if (mask >> i & 1) prod *= f[static_cast<std::size_t>(i)][c];
      row[c] += prod;
    }
  }
  auto factorial = [](int v) {
    double r = 1;
    for (int i = 2; i <= v; ++i) r *= i;
    return r;
  };

  ExpansionCheck out;
  for (int v = 0; v <= power; ++v) {
    const bool odd = (power - v) % 2 == 0;
    out.coefficients.push_back(odd && v <= count ? parity_word_count(power, v, count) / factorial(v) : 0.0);
    out.closed_form_coefficients.push_back(
        odd ? factorial(power) * std::ldexp(1.0, -v) * std::pow(static_cast<double>(n), (power - v) / 2.0) : 0.0);
  }
  const double st = std::sin(t), ct = std::cos(t);
  for (std::size_t c = 0; c < cells; ++c) {
    double s = 0;
    for (int i = 0; i < count; ++i) s += f[static_cast<std::size_t>(i)][c];
    const double lhs = std::pow(s, power);
    double exact = 0, closed = 0, sine = 0;
    for (int v = 0; v <= std::min(power, count); ++v) {
      const double G = factorial(v) * e[static_cast<std::size_t>(v)][c];
      exact += out.coefficients[static_cast<std::size_t>(v)] * G;
      closed += out.closed_form_coefficients[static_cast<std::size_t>(v)] * G;
    }
    // sin(t sum f) = Im prod (cos t + i f sin t)
    for (int v = 1; v <= count; v += 2) {
      const double sign = ((v - 1) / 2) % 2 ? -1.0 : 1.0;
      sine += sign * std::pow(ct, count - v) * std::pow(st, v) * e[static_cast<std::size_t>(v)][c];
    }
    out.residual = std::max(out.residual, std::abs(lhs - exact));
    out.closed_form_residual = std::max(out.closed_form_residual, std::abs(lhs - closed));
    out.sine_residual = std::max(out.sine_residual, std::abs(std::sin(t * s) - sine));
  }
  return out;
}

double BeckParameters::rho() const { return std::sqrt(static_cast<double>(q)) / n; }
double BeckParameters::rho_tilde() const { return a * std::pow(static_cast<double>(q), b) / n; }

std::vector<std::pair<int, int>> beck_blocks(int n, int q) {
  if (q < 1 || q > n) throw UsageError("block count q must satisfy 1 <= q <= n");
  std::vector<std::pair<int, int>> out;
  const int total = n + 1;
  int lo = 0;
  for (int t = 0; t < q; ++t) {
    const int size = total / q + (t < total % q ? 1 : 0);
    out.emplace_back(lo, lo + size - 1);
    lo += size;
  }
  return out;
}

std::vector<int> beck_block_of(int n, int q) {
  const auto blocks = beck_blocks(n, q);
  std::vector<int> out;
  for (const auto& r : hyperbolic_index(n, 3)) {
    int t = 0;
    while (r[0] > blocks[static_cast<std::size_t>(t)].second) ++t;
    out.push_back(t);
  }
  return out;
}

GridFunction BeckDecomposition::psi_sd() const {
  GridFunction g = GridFunction::zeros(3, psi.resolution, static_cast<std::int64_t>(psi.size()));
  for (std::size_t k = 1; k < sd.size(); ++k) g += sd_part(static_cast<int>(k));
  return g;
}

GridFunction BeckDecomposition::psi_not() const {
  GridFunction g = GridFunction::zeros(3, psi.resolution, static_cast<std::int64_t>(psi.size()));
  for (std::size_t k = 1; k < nsd.size(); ++k)
    g += from_ints(nsd[k], 3, psi.resolution, std::pow(params.rho_tilde(), static_cast<double>(k)));
  return g;
}

GridFunction BeckDecomposition::sd_part(int k) const {
  return from_ints(sd[static_cast<std::size_t>(k)], 3, psi.resolution, std::pow(params.rho_tilde(), k));
}

BeckDecomposition beck_short_riesz(const std::vector<RFunction>& f, const BeckParameters& p, std::int64_t cap) {
  const auto shapes = hyperbolic_index(p.n, 3);
  if (f.size() != shapes.size()) throw UsageError("need one r-function per shape of H_n");
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i].shape != shapes[i]) throw UsageError("r-functions must follow hyperbolic_index order");
  const auto block_of = beck_block_of(p.n, p.q);
  const int m = p.n + 1;
  const std::size_t cells = static_cast<std::size_t>(checked_cell_count(3, m, cap));

  std::vector<std::vector<std::int8_t>> cellsf;
  for (const auto& g : f) cellsf.push_back(rfunction_cells(g, m, cap));
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(p.q));
  for (std::size_t i = 0; i < shapes.size(); ++i) members[static_cast<std::size_t>(block_of[i])].push_back(i);

  BeckDecomposition D;
  D.params = p;
  D.sd.assign(static_cast<std::size_t>(p.q + 1), std::vector<std::int32_t>(cells, 0));
  D.nsd.assign(static_cast<std::size_t>(p.q + 1), std::vector<std::int32_t>(cells, 0));

  // Psi as the plain product of (1 + rho~ F_t).
  D.psi = GridFunction::constant(3, m, 1.0, cap);
  const double rt = p.rho_tilde();
  for (const auto& mem : members) {
    std::vector<std::int32_t> F(cells, 0);
    for (auto i : mem)
      for (std::size_t c = 0; c < cells; ++c) F[c] += cellsf[i][c];
    for (std::size_t c = 0; c < cells; ++c) D.psi.values[c] *= 1.0 + rt * F[c];
    D.block_sum.push_back(std::move(F));
  }

  // Expansion over one-per-block tuples, split by strong distinctness.
  std::vector<std::vector<std::int8_t>> partial(static_cast<std::size_t>(p.q + 1), std::vector<std::int8_t>(cells));
  std::vector<int> used2, used3;
  std::function<void(int, int, bool)> dfs = [&](int t, int k, bool strong) {
    if (t == p.q) return;
    dfs(t + 1, k, strong);
    for (auto i : members[static_cast<std::size_t>(t)]) {
      const auto& r = shapes[i];
      const bool s2 = std::find(used2.begin(), used2.end(), r[1]) == used2.end();
      const bool s3 = std::find(used3.begin(), used3.end(), r[2]) == used3.end();
      const bool now_strong = strong && s2 && s3;
      auto& cur = partial[static_cast<std::size_t>(k + 1)];
      const auto& prev = partial[static_cast<std::size_t>(k)];
      const auto& fi = cellsf[i];
      if (k == 0)
        cur = fi;
      else
        for (std::size_t c = 0; c < cells; ++c) cur[c] = static_cast<std::int8_t>(prev[c] * fi[c]);
      auto& acc = (now_strong ? D.sd : D.nsd)[static_cast<std::size_t>(k + 1)];
      for (std::size_t c = 0; c < cells; ++c) acc[c] += cur[c];
      (now_strong ? D.sd_tuples : D.nsd_tuples)++;
      used2.push_back(r[1]);
      used3.push_back(r[2]);
      dfs(t + 1, k + 1, now_strong);
      used2.pop_back();
      used3.pop_back();
    }
  };
  dfs(0, 0, true);
  return D;
}

BeckStats beck_stats(const BeckDecomposition& D, const HaarExpansion& H, int p_max) {
  BeckStats s;
  const auto sd = D.psi_sd();
  const auto nt = D.psi_not();
  for (std::size_t c = 0; c < D.psi.size(); ++c)
    s.residual = std::max(s.residual, std::abs(D.psi.values[c] - 1.0 - sd.values[c] - nt.values[c]));
  s.mean = mean(D.psi);
  std::size_t neg = 0;
  for (double v : D.psi.values) neg += v < 0;
  s.negative_measure = static_cast<double>(neg) / static_cast<double>(D.psi.size());
  s.l1 = lp_norm(D.psi, 1);
  s.l2 = lp_norm(D.psi, 2);

  if (H.dim == 3 && !H.coef.empty()) {
    const GridFunction h = grid_evaluate(H, D.psi.resolution, static_cast<std::int64_t>(D.psi.size()));
    s.pairing_sd1 = inner(h, D.sd_part(1));
    std::vector<double> top;
    for (const auto& [R, a] : H.coef)
      if (R.shape().weight() == D.params.n) top.push_back(std::abs(a));
    s.pairing_sd1_formula = D.params.rho_tilde() * std::ldexp(pairwise_sum(top), -D.params.n);
  }

  for (const auto& F : D.block_sum) {
    const GridFunction g = from_ints(F, 3, D.psi.resolution, D.params.rho());
    std::vector<double> row;
    for (int p = 1; p <= p_max; ++p) row.push_back(lp_norm(g, p) / std::sqrt(static_cast<double>(p)));
    s.block_moments.push_back(std::move(row));
  }
  return s;
}

BeckLedger beck_discrepancy_ledger(const PointSet& A, const BeckParameters& params, std::int64_t cap) {
  if (A.dim != 3) throw UsageError("the short Riesz product ledger is three-dimensional");
  BeckParameters p = params;
  if (p.n <= 0) p.n = scale_for(A.size());
  std::vector<RFunction> f;
  for (const auto& r : hyperbolic_index(p.n, 3)) f.push_back(build_r_function(A, r));
  const auto D = beck_short_riesz(f, p, cap);
  BeckLedger L;
  L.N = A.size();
  L.n = p.n;
  L.main = pair_with_grid(A, D.sd_part(1));
  if (p.q >= 2) L.second = std::abs(pair_with_grid(A, D.sd_part(2)));
  for (int k = 3; k <= p.q; ++k) L.higher += std::abs(pair_with_grid(A, D.sd_part(k)));
  L.pairing_sd = pair_with_grid(A, D.psi_sd());
  L.pairing_not = pair_with_grid(A, D.psi_not());
  L.ratio = (L.second + L.higher) / L.main;
  return L;
}

}  // namespace dlab
