#include <doctest.h>

#include <cmath>

#include "dlab/dyadic.hpp"
#include "dlab/haar_field.hpp"
#include "dlab/rng.hpp"

using namespace dlab;

TEST_CASE("haar_eval halves and boundary") {
  DyadicInterval I(0, 0);
  CHECK(haar_eval(I, 0.25) == -1);
  CHECK(haar_eval(I, 0.75) == 1);
  CHECK(haar_eval(I, 0.5) == 1);
  CHECK(haar_eval(I, 1.0) == 1);
  CHECK(haar_eval(DyadicInterval(1, 0), 0.75) == 0);
  CHECK_THROWS_AS(DyadicInterval(2, 4), UsageError);
}

TEST_CASE("hyperbolic_index ordering and counts") {
  auto h = hyperbolic_index(2, 2);
  REQUIRE(h.size() == 3);
  CHECK(h[0].r == std::vector<int>{0, 2});
  CHECK(h[1].r == std::vector<int>{1, 1});
  CHECK(h[2].r == std::vector<int>{2, 0});
  CHECK(hyperbolic_index(0, 3).size() == 1);
  for (int d = 1; d <= 4; ++d)
    for (int n = 0; n <= 8; ++n) {
      auto shapes = hyperbolic_index(n, d);
      CHECK(static_cast<std::int64_t>(shapes.size()) == hyperbolic_count(n, d));
      for (const auto& r : shapes) CHECK(r.weight() == n);
    }
}

TEST_CASE("rectangles of a shape tile the cube") {
  ShapeVector r({1, 2});
  auto rects = enumerate_rectangles(r);
  REQUIRE(rects.size() == 8);
  double vol = 0;
  for (std::size_t i = 0; i < rects.size(); ++i) {
    vol += rects[i].volume();
    CHECK(rectangle_rank(rects[i]) == static_cast<std::int64_t>(i));
  }
  CHECK(vol == 1.0);
  CHECK_THROWS_AS(enumerate_rectangles(ShapeVector({20, 20})), ResourceError);
}

TEST_CASE("fast synthesis matches term-by-term evaluation") {
  CounterRng rng(7, 0);
  for (int d = 1; d <= 3; ++d) {
    HaarExpansion e(d);
    e.mean = rng.uniform(-1, 1);
    for (int t = 0; t < 20; ++t) {
      std::vector<int> r;
      for (int j = 0; j < d; ++j) r.push_back(static_cast<int>(rng.below(3)));
      ShapeVector s(r);
      auto rects = enumerate_rectangles(s);
      e.add(rects[rng.below(rects.size())], rng.uniform(-1, 1));
    }
    const int m = e.grid_resolution();
    auto fast = grid_evaluate(e, m);
    auto slow = grid_evaluate_direct(e, m);
    for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));

    auto back = haar_coefficients(fast, 1e-12);
    CHECK(back.mean == doctest::Approx(e.mean));
    CHECK(back.coef.size() == e.coef.size());
    for (const auto& [R, a] : e.coef) CHECK(back.coef.at(R) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("product rule within a coordinate") {
  DyadicRectangle I({DyadicInterval(0, 0)});
  DyadicRectangle J({DyadicInterval(1, 1)});
  DyadicRectangle K({DyadicInterval(1, 0)});
  std::vector<DyadicRectangle> same{I, I};
  auto p = haar_product(same);
  CHECK(p.kind() == HaarProduct::Kind::Indicator);
  std::vector<DyadicRectangle> nested{I, J};
  p = haar_product(nested);
  CHECK(p.kind() == HaarProduct::Kind::SignedHaar);
  CHECK(p.sign == 1);
  CHECK(p.support == J);
  std::vector<DyadicRectangle> nested_left{I, K};
  CHECK(haar_product(nested_left).sign == -1);
  std::vector<DyadicRectangle> disjoint{J, K};
  CHECK(haar_product(disjoint).kind() == HaarProduct::Kind::Zero);
}

TEST_CASE("symbolic products agree with grid products, d=2 pairs and triples") {
  std::vector<DyadicRectangle> all;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b)
      for (auto& R : enumerate_rectangles(ShapeVector({a, b}))) all.push_back(R);
  const int m = 3;
  std::vector<GridFunction> grids;
  for (const auto& R : all) {
    HaarExpansion e(2);
    e.add(R, 1.0);
    grids.push_back(grid_evaluate(e, m));
  }
  CounterRng rng(11, 0);
  for (int t = 0; t < 400; ++t) {
    std::vector<DyadicRectangle> terms;
    GridFunction prod = GridFunction::constant(2, m, 1.0);
    const int k = 2 + static_cast<int>(rng.below(2));
    for (int i = 0; i < k; ++i) {
      const auto pick = rng.below(all.size());
      terms.push_back(all[pick]);
      prod *= grids[pick];
    }
    auto sym = grid_evaluate(haar_product(terms), m);
    CHECK(sym.values == prod.values);
  }
}

TEST_CASE("parseval and square function") {
  CounterRng rng(3, 1);
  HaarExpansion e(2);
  e.mean = 0.5;
  for (auto& R : enumerate_rectangles(ShapeVector({1, 2}))) e.add(R, rng.uniform(-1, 1));
  for (auto& R : enumerate_rectangles(ShapeVector({0, 0}))) e.add(R, rng.uniform(-1, 1));
  auto rep = parseval_check(e);
  CHECK(rep.norm_squared == doctest::Approx(rep.coefficient_sum).epsilon(1e-12));
  CHECK(rep.square_function_l2 == doctest::Approx(rep.coefficient_sum).epsilon(1e-12));

  HaarExpansion c(2);
  c.mean = -3;
  auto s = square_function(c, 2);
  for (double v : s.values) CHECK(v == 3.0);

  HaarExpansion one(1);
  one.add(DyadicRectangle({DyadicInterval(0, 0)}), 1.0);
  auto s1 = square_function(one);
  for (double v : s1.values) CHECK(v == 1.0);
}

TEST_CASE("orlicz surrogate of a constant") {
  auto g = GridFunction::constant(2, 2, 1.0);
  auto r = orlicz_surrogate(g, 2.0, 8);
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.argmax_p == 1);
}

TEST_CASE("dyadic maximal function") {
  auto g = GridFunction::constant(2, 3, 2.0);
  auto M = dyadic_maximal(g, true);
  for (double v : M.values) CHECK(v == doctest::Approx(2.0));

  // indicator of [0,1/2): maximal function is 1 there and 1/2 elsewhere
  auto f = GridFunction::zeros(1, 3);
  for (int i = 0; i < 4; ++i) f[static_cast<std::size_t>(i)] = 1;
  auto Mf = dyadic_maximal(f, false);
  for (int i = 0; i < 8; ++i) CHECK(Mf[static_cast<std::size_t>(i)] == (i < 4 ? 1.0 : 0.5));
}

TEST_CASE("Calderon-Zygmund examples") {
  const double lambda = 1.0;
  auto g = GridFunction::constant(1, 4, 0.75);
  auto cz = cz_decompose(g, lambda);
  CHECK(cz.intervals.empty());
  CHECK(cz.good.values == g.values);

  auto h = GridFunction::zeros(1, 4);
  for (int i = 0; i < 8; ++i) h[static_cast<std::size_t>(i)] = 2 * lambda;
  cz = cz_decompose(h, lambda);
  REQUIRE(cz.intervals.size() == 1);
  CHECK(cz.intervals[0] == DyadicInterval(0, 0));
  for (double v : cz.good.values) CHECK(v == lambda);
  CHECK_THROWS_AS(cz_decompose(h, 0.0), UsageError);
}

TEST_CASE("rademacher tail with a single weight") {
  const double w[] = {1.0};
  const double ts[] = {0.5, 1.0};
  auto rows = rademacher_tail(w, ts, 20000, 5);
  CHECK(rows[0].p_hat == doctest::Approx(0.5).epsilon(0.03));
  CHECK(rows[1].p_hat == 0.0);
}

TEST_CASE("r-function cells match the expansion") {
  CounterRng rng(1, 2);
  auto f = random_rfunction(ShapeVector({2, 1}), rng);
  auto g = rfunction_grid(f, 3);
  auto h = grid_evaluate(to_expansion(f), 3);
  CHECK(g.values == h.values);
}
