#include <doctest.h>

#include <bit>
#include <cmath>
#include <set>

#include "dlab/duals.hpp"
#include "dlab/entropy.hpp"
#include "dlab/rng.hpp"

using namespace dlab;

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("vg dimension against the bound") {
  for (int m = 1; m <= 24; ++m)
    for (int dmin = 1; dmin <= m; ++dmin) {
      double lhs = 0;
      for (int i = 0; i <= dmin - 2; ++i) lhs += binom(m - 1, i);
      int k = 0;
      for (int kk = m; kk >= 1; --kk)
        if (lhs < std::ldexp(1.0, m - kk)) {
          k = kk;
          break;
        }
      CHECK(vg_dimension(m, dmin) == k);
      if (dmin > 1) CHECK(vg_dimension(m, dmin) <= vg_dimension(m, dmin - 1));
    }
  CHECK_THROWS_AS(vg_dimension(3, 4), UsageError);
  CHECK_THROWS_AS(vg_dimension(3, 0), UsageError);
}

TEST_CASE("vg codes") {
  auto c73 = vg_code(7, 3);
  CHECK(c73.k >= 3);
  CHECK(c73.min_distance >= 3);
  for (auto w : c73.codewords())
    if (w) CHECK(std::popcount(w) >= 3);

  auto c22 = vg_code(2, 2);
  CHECK(c22.k == 1);
  auto w22 = c22.codewords();
  CHECK(std::set<std::uint64_t>(w22.begin(), w22.end()) == std::set<std::uint64_t>{0, 3});

  auto full = vg_code(5, 1);
  CHECK(full.k == 5);
  CHECK(full.min_distance == 1);

  for (int m = 1; m <= 12; ++m)
    for (int dmin = 1; dmin <= m; ++dmin) {
      auto c = vg_code(m, dmin);
      CHECK(c.k == vg_dimension(m, dmin));
      const auto words = c.codewords();
      const std::set<std::uint64_t> all(words.begin(), words.end());
      REQUIRE(all.size() == words.size());
      int pairwise = m + 1;
      bool closed = true;
      for (auto a : words) {
        closed = closed && a < (std::uint64_t{1} << m);
        for (auto b : words) {
          closed = closed && all.count(a ^ b) == 1;
          if (a != b) pairwise = std::min(pairwise, std::popcount(a ^ b));
        }
      }
      CHECK(closed);
      CHECK(c.min_distance == pairwise);
      CHECK(c.min_distance >= dmin);
    }
  CHECK(vg_code(20, 5).min_distance >= 5);
  CHECK_THROWS_AS(vg_code(25, 3), ResourceError);
}

TEST_CASE("separated families") {
  auto f2 = separated_family(2);
  CHECK(f2.subsets() == std::vector<std::vector<int>>{{}, {1, 2}});
  CHECK(f2.min_sym_diff == 2);

  for (int m = 1; m <= 16; ++m) {
    auto f = separated_family(m);
    const int t = f.dimension;
    CHECK(f.words.size() == (std::size_t{1} << t));
    CHECK(f.distance >= t);
    CHECK(vg_dimension(m, t + 1 <= m ? t + 1 : m) <= t);
    for (std::size_t i = 0; i < f.words.size(); ++i)
      for (std::size_t j = i + 1; j < f.words.size(); ++j) CHECK(std::popcount(f.words[i] ^ f.words[j]) >= t);
  }
  auto f16 = separated_family(16);
  CHECK(f16.dimension == 5);
  CHECK(f16.distance == 6);
  CHECK(f16.min_sym_diff >= 6);
}

TEST_CASE("tent primitive") {
  const DyadicInterval unit(0, 0);
  CHECK(tent_primitive(unit, 0.5) == -0.5);
  CHECK(tent_primitive(unit, 0.0) == 0.0);
  CHECK(tent_primitive(unit, 1.0) == 0.0);
  CHECK(integrated_haar_eval(DyadicRectangle(ShapeVector({2, 1}), {1, 1}), {0.0, 0.0}) == 0.0);

  // cumulative midpoint sums of h_I on 2^12 cells
  const int K = 12;
  const double h = std::ldexp(1.0, -K);
  for (int k = 0; k <= 8; ++k)
    for (std::int64_t j : {std::int64_t{0}, (std::int64_t{1} << k) - 1, std::int64_t{1} << k >> 1}) {
      const DyadicInterval I(k, j);
      double acc = 0, worst = 0;
      for (int c = 0; c < (1 << K); ++c) {
        acc += haar_eval(I, (c + 0.5) * h) * h;
        worst = std::max(worst, std::abs(acc - tent_primitive(I, (c + 1) * h)));
      }
      CHECK(worst <= 1e-9);
    }

  // two dimensions on 64 x 64 cells
  const int S = 64;
  for (const auto& R : {DyadicRectangle(ShapeVector({1, 2}), {1, 2}), DyadicRectangle(ShapeVector({3, 0}), {5, 0}),
                        DyadicRectangle(ShapeVector({0, 4}), {0, 9})}) {
    std::vector<double> cum(static_cast<std::size_t>((S + 1) * (S + 1)), 0.0);
    double worst = 0;
    for (int a = 1; a <= S; ++a)
      for (int b = 1; b <= S; ++b) {
        const double f = haar_eval(R, {(a - 0.5) / S, (b - 0.5) / S}) / (S * S);
        const auto idx = static_cast<std::size_t>(a * (S + 1) + b);
        cum[idx] = f + cum[idx - 1] + cum[idx - static_cast<std::size_t>(S + 1)] -
                   cum[idx - static_cast<std::size_t>(S + 2)];
        worst = std::max(worst, std::abs(cum[idx] - integrated_haar_eval(R, {double(a) / S, double(b) / S})));
      }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("smooth sup") {
  for (const auto& R : {DyadicRectangle(ShapeVector({0, 0}), {0, 0}), DyadicRectangle(ShapeVector({2, 1}), {3, 1}),
                        DyadicRectangle(ShapeVector({1, 1, 2}), {0, 1, 2})}) {
    HaarExpansion H(R.dim());
    H.add(R, 1.0);
    double expect = 1;
    for (const auto& I : R.sides) expect *= I.length() / 2;
    CHECK(smooth_sup(H, R.shape().weight()) == doctest::Approx(expect).epsilon(1e-14));
  }

  CounterRng rng(17, 0);
  for (int d = 1; d <= 3; ++d)
    for (int n = 1; n <= (d == 3 ? 2 : 4); ++n) {
      auto H = random_sign_hyperbolic(n, d, rng);
      const int m = n + 1;
      const auto v = integrated_vertices(grid_evaluate(H, m), kDefaultCellCap);
      const std::int64_t W = (std::int64_t{1} << m) + 1;
      double worst = 0, sup = 0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        std::vector<double> x(static_cast<std::size_t>(d));
        std::int64_t rest = static_cast<std::int64_t>(i);
        for (int j = d - 1; j >= 0; --j) {
          x[static_cast<std::size_t>(j)] = std::ldexp(static_cast<double>(rest % W), -m);
          rest /= W;
        }
        double direct = 0;
        for (const auto& [R, a] : H.coef) direct += a * integrated_haar_eval(R, x);
        worst = std::max(worst, std::abs(direct - v[i]));
        sup = std::max(sup, std::abs(direct));
      }
      CHECK(worst <= 1e-12);
      auto rep = smooth_smallball_check(H, n);
      CHECK(rep.rhs == doctest::Approx(sup).epsilon(1e-12));
      HaarExpansion neg(d);
      for (const auto& [R, a] : H.coef) neg.add(R, -a);
      CHECK(smooth_smallball_check(neg, n).rhs == rep.rhs);
      // the multilinear sup is not exceeded off the vertices
      for (int t = 0; t < 50; ++t) {
        std::vector<double> x;
        for (int j = 0; j < d; ++j) x.push_back(rng.uniform());
        double val = 0;
        for (const auto& [R, a] : H.coef) val += a * integrated_haar_eval(R, x);
        CHECK(std::abs(val) <= rep.rhs + 1e-12);
      }
    }
  HaarExpansion bad(2);
  bad.add(DyadicRectangle(ShapeVector({0, 1}), {0, 0}), 1.0);
  CHECK_THROWS_AS(smooth_smallball_check(bad, 2), UsageError);
}

TEST_CASE("entropy experiment") {
  auto rep = entropy_experiment(4, 2, 20, 100000, 1);
  CHECK(rep.rectangles == 80);
  CHECK(rep.group == 4);
  CHECK(rep.code_length == 20);
  CHECK_FALSE(rep.sampled);
  CHECK(rep.pairs_checked == rep.total_pairs);
  CHECK(rep.min_sym_diff >= static_cast<std::int64_t>(rep.code_distance) * (rep.rectangles / rep.code_length));
  CHECK(rep.min_separation > 0);
  CHECK(rep.log_family == doctest::Approx(rep.dimension * std::log(2.0)));

  // direct recomputation over all pairs
  auto fam = separated_family(rep.code_length);
  std::vector<DyadicRectangle> rects;
  for (const auto& r : hyperbolic_index(4, 2))
    for (auto& R : enumerate_rectangles(r)) rects.push_back(R);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < fam.words.size(); ++p)
    for (std::size_t j = p + 1; j < fam.words.size(); ++j) {
      HaarExpansion diff(2);
      for (std::size_t i = 0; i < rects.size(); ++i) {
        const auto b = i % static_cast<std::size_t>(rep.code_length);
        const double s0 = ((fam.words[p] >> b) & 1) ? 1 : -1, s1 = ((fam.words[j] >> b) & 1) ? 1 : -1;
        if (s0 != s1) diff.add(rects[i], (s0 - s1) / 2.0);
      }
      best = std::min(best, 2.0 * smooth_sup(diff, 4) / std::sqrt(4.0));
    }
  CHECK(rep.min_separation == doctest::Approx(best).epsilon(1e-12));

  // complementary pair: Int(F_sigma - F_-sigma) = 2 n^(-1/2) Int(sum sigma h_R)
  CounterRng rng(3, 0);
  auto H = random_sign_hyperbolic(5, 2, rng);
  HaarExpansion twice(2);
  for (const auto& [R, a] : H.coef) twice.add(R, 2 * a);
  CHECK(smooth_sup(twice, 5) == doctest::Approx(2 * smooth_sup(H, 5)));

  auto sampled = entropy_experiment(3, 2, 24, 10, 2);
  CHECK(sampled.sampled);
  CHECK(sampled.pairs_checked == 10);
  CHECK(entropy_experiment(3, 2, 24, 10, 2).min_separation == sampled.min_separation);
  CHECK_THROWS_AS(entropy_experiment(3, 2, 25), UsageError);
}
