#include <algorithm>
#include <cmath>
#include <map>

#include "dlab/duals.hpp"
#include "dlab/rng.hpp"

namespace dlab {

namespace {

struct Entry {
  DyadicRectangle tail;
  double a;
};

struct Envelope {
  GridFunction hi, lo;  // max and min over the first coordinate below a node
};

class SupTree {
 public:
  SupTree(const HaarExpansion& H, std::int64_t cap) : d_(H.dim), cap_(cap) {
    for (const auto& [R, a] : H.coef) {
      const auto& I = R.sides[0];
      if (static_cast<std::size_t>(I.scale) >= res_.size()) res_.resize(static_cast<std::size_t>(I.scale) + 1, 0);
      int need = 0;
      std::vector<DyadicInterval> rest(R.sides.begin() + 1, R.sides.end());
      for (const auto& J : rest) need = std::max(need, J.scale + 1);
      res_[static_cast<std::size_t>(I.scale)] = std::max(res_[static_cast<std::size_t>(I.scale)], need);
      nodes_[{I.scale, I.offset}].push_back({DyadicRectangle(rest), a});
    }
    for (std::size_t k = res_.size(); k-- > 1;) res_[k - 1] = std::max(res_[k - 1], res_[k]);
  }

  Envelope run() { return node(0, 0); }

 private:
  Envelope node(int k, std::int64_t offset) {
    if (static_cast<std::size_t>(k) >= res_.size())
      return {GridFunction::zeros(d_ - 1, 0, cap_), GridFunction::zeros(d_ - 1, 0, cap_)};
    const int m = res_[static_cast<std::size_t>(k)];
    Envelope left = node(k + 1, 2 * offset), right = node(k + 1, 2 * offset + 1);
    for (Envelope* e : {&left, &right}) {
      if (e->hi.resolution < m) {
        e->hi = refine(e->hi, m, cap_);
        e->lo = refine(e->lo, m, cap_);
      }
    }
    std::vector<double> g(static_cast<std::size_t>(checked_cell_count(d_ - 1, m, cap_)), 0.0);
    if (auto it = nodes_.find({k, offset}); it != nodes_.end()) {
      for (const auto& e : it->second) {
        std::size_t slot = 0;
        for (const auto& J : e.tail.sides) slot = (slot << m) | haar_slot(J);
        g[slot] += e.a;
      }
      haar_synthesis(g, d_ - 1, m);
    }
    Envelope out = std::move(left);
    for (std::size_t i = 0; i < g.size(); ++i) {
      out.hi.values[i] = std::max(out.hi.values[i] - g[i], right.hi.values[i] + g[i]);
      out.lo.values[i] = std::min(out.lo.values[i] - g[i], right.lo.values[i] + g[i]);
    }
    return out;
  }

  int d_;
  std::int64_t cap_;
  std::vector<int> res_;
  std::map<std::pair<int, std::int64_t>, std::vector<Entry>> nodes_;
};

}  // namespace

double hyperbolic_sup(const HaarExpansion& H, int n, std::int64_t cap) {
  if (H.depth() > n) throw UsageError("expansion is deeper than n");
  if (H.dim == 1 || H.coef.empty()) return sup_norm(grid_evaluate(H, n + 1, cap));
  const Envelope env = SupTree(H, cap).run();
  double best = 0;
  for (std::size_t i = 0; i < env.hi.size(); ++i)
    best = std::max({best, std::abs(H.mean + env.hi.values[i]), std::abs(H.mean + env.lo.values[i])});
  return best;
}

SmallBallReport smallball_report(const HaarExpansion& H, int n, std::int64_t cap) {
  if (n < 1) throw UsageError("small-ball report needs n >= 1");
  SmallBallReport r;
  r.n = n;
  r.d = H.dim;
  double s = 0;
  for (const auto& [R, a] : H.coef) {
    if (R.shape().weight() != n) throw UsageError("small-ball sums use only rectangles of volume 2^-n");
    s += std::abs(a);
  }
  r.lhs = std::ldexp(s, -n);
  r.rhs = hyperbolic_sup(H, n, cap);
  const double nn = static_cast<double>(n);
  r.trivial_ratio = r.lhs / (std::pow(nn, (r.d - 1) / 2.0) * r.rhs);
  r.trivial_ratio_exact = r.lhs / (std::sqrt(static_cast<double>(hyperbolic_count(n, r.d))) * r.rhs);
  r.conjectured_ratio = r.lhs / (std::pow(nn, (r.d - 2) / 2.0) * r.rhs);
  return r;
}

SmallBallSummary smallball_experiment(int n, int d, std::size_t trials, SignMode mode, std::uint64_t seed,
                                      std::int64_t cap) {
  if (trials == 0) throw UsageError("trials must be positive");
  SmallBallSummary sum;
  sum.n = n;
  sum.d = d;
  sum.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(seed, t);
    HaarExpansion H(d);
    if (mode == SignMode::Random) {
      H = random_sign_hyperbolic(n, d, rng);
    } else {
      for (const auto& r : hyperbolic_index(n, d))
        for (auto& R : enumerate_rectangles(r)) H.coef.emplace(std::move(R), 1.0);
    }
    const auto rep = smallball_report(H, n, cap);
    sum.mean_sup += rep.rhs;
    sum.mean_conjectured_ratio += rep.conjectured_ratio;
    sum.max_trivial_ratio = std::max(sum.max_trivial_ratio, rep.trivial_ratio);
    sum.max_trivial_ratio_exact = std::max(sum.max_trivial_ratio_exact, rep.trivial_ratio_exact);
  }
  sum.mean_sup /= static_cast<double>(trials);
  sum.mean_conjectured_ratio /= static_cast<double>(trials);
  return sum;
}

}  // namespace dlab
