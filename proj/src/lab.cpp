#include "dlab/lab.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "dlab/duals.hpp"
#include "dlab/rng.hpp"
#include "dlab/stats.hpp"

namespace dlab::lab {

namespace fs = std::filesystem;

namespace {

class Params {
 public:
  explicit Params(const Json& j) : j_(j) {}

  std::int64_t integer(const std::string& key, std::int64_t def) {
    std::int64_t v = def;
    if (auto* x = find(key)) {
      if (x->is_number_integer()) {
        v = x->get<std::int64_t>();
      } else if (x->is_string()) {
        const auto s = x->get<std::string>();
        auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) bad(key, "an integer");
      } else {
        bad(key, "an integer");
      }
    }
    resolved_[key] = v;
    return v;
  }

  int small(const std::string& key, int def) {
    const auto v = integer(key, def);
    if (v < -(1 << 30) || v > (1 << 30)) bad(key, "a small integer");
    return static_cast<int>(v);
  }

  std::size_t count(const std::string& key, std::size_t def) {
    const auto v = integer(key, static_cast<std::int64_t>(def));
    if (v < 0) bad(key, "a nonnegative integer");
    return static_cast<std::size_t>(v);
  }

  double real(const std::string& key, double def) {
    double v = def;
    if (auto* x = find(key)) {
      if (x->is_number()) {
        v = x->get<double>();
      } else if (x->is_string()) {
        try {
          v = parse_number(x->get<std::string>());
        } catch (const IoError&) {
          bad(key, "a number");
        }
      } else {
        bad(key, "a number");
      }
    }
    resolved_[key] = v;
    return v;
  }

  std::string text(const std::string& key, const std::string& def) {
    std::string v = def;
    if (auto* x = find(key)) {
      if (x->is_string()) v = x->get<std::string>();
      else if (x->is_number()) v = x->dump();
      else bad(key, "a string");
    }
    resolved_[key] = v;
    return v;
  }

  bool flag(const std::string& key, bool def) {
    bool v = def;
    if (auto* x = find(key)) {
      if (x->is_boolean()) {
        v = x->get<bool>();
      } else if (x->is_string()) {
        const auto s = x->get<std::string>();
        if (s == "true" || s == "1") v = true;
        else if (s == "false" || s == "0") v = false;
        else bad(key, "true or false");
      } else {
        bad(key, "true or false");
      }
    }
    resolved_[key] = v;
    return v;
  }

  std::vector<double> range(const std::string& key, const std::string& def, bool geometric) {
    std::vector<double> v;
    const Json* x = find(key);
    if (x && x->is_array()) {
      for (const auto& e : *x) {
        if (!e.is_number()) bad(key, "a list of numbers");
        v.push_back(e.get<double>());
      }
    } else if (x && x->is_string()) {
      v = parse_range(x->get<std::string>(), geometric);
    } else if (x && x->is_number()) {
      v = {x->get<double>()};
    } else if (x) {
      bad(key, "a range");
    } else if (!def.empty()) {
      v = parse_range(def, geometric);
    }
    resolved_[key] = v;
    return v;
  }

  std::vector<int> int_range(const std::string& key, const std::string& def) {
    std::vector<int> out;
    for (double x : range(key, def, false)) {
      if (x != std::floor(x)) bad(key, "a list of integers");
      out.push_back(static_cast<int>(x));
    }
    resolved_[key] = out;
    return out;
  }

  void finish() const {
    std::string unknown;
    for (const auto& [k, v] : j_.items())
      if (!resolved_.contains(k)) unknown += (unknown.empty() ? "" : ", ") + k;
    if (!unknown.empty()) throw UsageError("unknown parameter(s): " + unknown);
  }

  const Json& resolved() const { return resolved_; }

 private:
  const Json* find(const std::string& key) const {
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }
  [[noreturn]] static void bad(const std::string& key, const std::string& what) {
    throw UsageError("parameter '" + key + "' must be " + what);
  }

  const Json& j_;
  Json resolved_ = Json::object();
};

class Context {
 public:
  Context(fs::path out, std::uint64_t seed, std::int64_t cap) : seed(seed), cap(cap), out_(std::move(out)) {}

  std::ofstream open(const std::string& name) {
    add(name);
    std::ofstream os(out_ / name, std::ios::binary);
    if (!os) throw IoError("cannot write " + (out_ / name).string());
    return os;
  }

  void json(const std::string& name, const Json& j) {
    auto os = open(name);
    os << j.dump(2) << '\n';
    if (!os) throw IoError("cannot write " + name);
  }

  void grid(const std::string& stem, const GridFunction& g, const std::string& format) {
    write_grid(g, out_ / stem, format);
    add(stem + ".json");
    add(stem + "." + format);
  }

  const std::vector<std::string>& files() const { return files_; }

  const std::uint64_t seed;
  const std::int64_t cap;

 private:
  void add(const std::string& name) {
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  }

  fs::path out_;
  std::vector<std::string> files_;
};

struct PointSource {
  std::string gen;
  int d = 2;
  int bits = 30;
  std::string file;

  static PointSource read(Params& P) {
    PointSource s;
    s.gen = P.text("gen", "van_der_corput");
    s.d = P.small("d", 2);
    s.bits = P.small("bits", 30);
    s.file = P.text("points", "");
    if (s.gen != "van_der_corput" && s.gen != "halton" && s.gen != "random" && s.gen != "file")
      throw UsageError("gen must be van_der_corput, halton, random or file");
    if (s.gen == "file" && s.file.empty()) throw UsageError("gen=file needs --points");
    if (s.gen == "van_der_corput" && s.d != 2) throw UsageError("van der Corput sets are two-dimensional");
    return s;
  }

  PointSet make(std::size_t N, std::uint64_t seed) const {
    if (gen == "file") {
      std::ifstream is(file);
      if (!is) throw IoError("cannot read " + file);
      return read_points_csv(is);
    }
    if (N == 0) throw UsageError("N must be positive");
    if (gen == "van_der_corput") return van_der_corput(N);
    if (gen == "halton") return halton(N, d);
    return random_points(N, d, seed, N, bits);
  }
};

std::vector<std::size_t> n_values(Params& P, std::size_t def_N, const PointSource& src) {
  const auto N = P.count("N", def_N);
  auto sweep = P.text("sweep", "");
  if (sweep.empty()) return {N};
  if (src.gen == "file") throw UsageError("a sweep cannot use a point file");
  if (sweep.rfind("N=", 0) == 0) sweep = sweep.substr(2);
  std::vector<std::size_t> out;
  for (double x : parse_range(sweep, true)) {
    if (x < 1 || x != std::floor(x)) throw UsageError("sweep values must be positive integers");
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string rational_text(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string edges_text(const CoincidenceGraph& G, int color) {
  std::string s;
  for (auto [a, b] : G.edges(color)) s += (s.empty() ? "" : " ") + std::to_string(a) + "-" + std::to_string(b);
  return s;
}

std::string ints_text(const std::vector<int>& v) {
  std::string s;
  for (int x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
  return s;
}

Json fit_json(const LinearFit& f) { return Json{{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}}; }

HaarExpansion random_expansion(int n, int d, int terms, CounterRng& rng) {
  HaarExpansion H(d);
  H.mean = rng.uniform(-1, 1);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> r;
    for (int j = 0; j < d; ++j) r.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n) + 1)));
    auto rects = enumerate_rectangles(ShapeVector(r));
    H.add(rects[rng.below(rects.size())], rng.uniform(-1, 1));
  }
  return H;
}

// ---- commands ----

void cmd_discrepancy(Params& P, Context& C) {
  const auto src = PointSource::read(P);
  const auto Ns = n_values(P, 64, src);
  const bool exact = P.flag("exact", false);
  const bool sup = P.flag("sup", true);
  P.finish();

  auto os = C.open("discrepancy.csv");
  CsvWriter w(os, {"N", "n", "d", "sup_disc", "l2_disc", "roth_lower", "pairing"});
  Json certs = Json::array();
  std::vector<double> x, y;
  for (auto N : Ns) {
    const auto A = src.make(N, C.seed);
    const auto cert = roth_certificate(A, -1, sup);
    const double l2 = l2_discrepancy(A);
    w << A.size() << cert.n << cert.d << optional_cell(cert.sup_disc) << l2 << cert.l2_lower << cert.pairing;
    w.end_row();
    certs.push_back(certificate_json(cert));
    x.push_back(std::sqrt(std::log(static_cast<double>(A.size()))));
    y.push_back(cert.l2_lower);
    if (Ns.size() == 1) {
      auto ps = C.open("points.csv");
      write_points_csv(ps, A, exact);
    }
  }
  C.json("certificates.json", certs);
  if (Ns.size() >= 3) {
    Json f = fit_json(least_squares(x, y));
    f["x"] = "sqrt(ln N)";
    f["y"] = "roth_lower";
    C.json("fit.json", f);
  }
}

void cmd_temlyakov(Params& P, Context& C) {
  const int n = P.small("n", 6);
  const auto trials = P.count("trials", 10);
  const auto grid = P.text("grid", "none");
  P.finish();
  if (n < 1) throw UsageError("n must be positive");
  auto os = C.open("temlyakov.csv");
  CsvWriter w(os, {"trial", "n", "pairing", "predicted", "residual", "mean", "min_value"});
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(C.seed, t);
    const auto H = random_expansion_upto(n, 2, rng);
    const auto r = temlyakov_dual(H, n, C.cap);
    w << t << n << r.pairing << r.predicted << r.pairing - r.predicted << r.mean << r.min_value;
    w.end_row();
    if (t == 0 && grid != "none") C.grid("psi", temlyakov_psi(H, n, C.cap), grid);
  }
}

void cmd_schmidt(Params& P, Context& C) {
  const auto src = PointSource::read(P);
  const auto Ns = n_values(P, 64, src);
  const double alpha = P.real("alpha", 1.0 / 64);
  const int n = P.small("n", -1);
  P.finish();
  auto os = C.open("schmidt.csv");
  CsvWriter w(os, {"N", "n", "alpha", "pairing", "constant_term", "main_term", "tail", "main_lower_bound",
                   "tail_bound", "mean", "min_value"});
  for (auto N : Ns) {
    const auto r = schmidt_dual(src.make(N, C.seed), alpha, n, C.cap);
    w << r.N << r.n << r.alpha << r.pairing << r.constant_term << r.main_term << r.tail << r.main_lower_bound
      << r.tail_bound << r.mean << r.min_value;
    w.end_row();
  }
}

void cmd_halasz(Params& P, Context& C, bool complex) {
  const auto src = PointSource::read(P);
  const auto Ns = n_values(P, 64, src);
  const double a = P.real("a", 0.5);
  const int n = P.small("n", -1);
  P.finish();
  if (complex) {
    auto os = C.open("halasz_complex.csv");
    CsvWriter w(os, {"N", "n", "a", "pairing", "sup_modulus", "modulus_bound"});
    for (auto N : Ns) {
      const auto A = src.make(N, C.seed);
      const auto r = halasz_complex_dual(A, a, n, C.cap);
      w << A.size() << r.n << a << r.pairing << r.sup_modulus << r.modulus_bound;
      w.end_row();
    }
  } else {
    auto os = C.open("halasz_sine.csv");
    CsvWriter w(os, {"N", "n", "a", "pairing", "normalized", "sup"});
    for (auto N : Ns) {
      const auto A = src.make(N, C.seed);
      const auto r = halasz_sine_dual(A, a, n, C.cap);
      w << A.size() << r.n << a << r.pairing << r.normalized << r.sup;
      w.end_row();
    }
  }
}

void cmd_beck(Params& P, Context& C) {
  BeckParameters p;
  p.n = P.small("n", 6);
  p.q = P.small("q", 3);
  p.a = P.real("a", 0.25);
  p.b = P.real("b", 0.25);
  const auto trials = P.count("trials", 1);
  const auto N = P.count("N", 0);
  const int p_max = P.small("p-max", 4);
  P.finish();
  auto os = C.open("beck.csv");
  CsvWriter w(os, {"trial", "n", "q", "residual", "mean", "negative_measure", "l1", "l2", "pairing_sd1",
                   "pairing_sd1_formula", "sd_tuples", "nsd_tuples"});
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(C.seed, t);
    const auto H = random_sign_hyperbolic(p.n, 3, rng);
    std::vector<RFunction> f;
    for (const auto& r : hyperbolic_index(p.n, 3)) f.push_back(sign_function(H, r));
    const auto D = beck_short_riesz(f, p, C.cap);
    const auto s = beck_stats(D, H, p_max);
    w << t << p.n << p.q << s.residual << s.mean << s.negative_measure << s.l1 << s.l2 << s.pairing_sd1
      << s.pairing_sd1_formula << D.sd_tuples << D.nsd_tuples;
    w.end_row();
  }
  if (N > 0) {
    BeckParameters lp = p;
    lp.n = -1;
    const auto L = beck_discrepancy_ledger(halton(N, 3), lp, C.cap);
    C.json("ledger.json", Json{{"N", L.N},
                               {"n", L.n},
                               {"main", L.main},
                               {"second", L.second},
                               {"higher", L.higher},
                               {"pairing_sd", L.pairing_sd},
                               {"pairing_not", L.pairing_not},
                               {"ratio", L.ratio}});
  }
}

void cmd_smallball(Params& P, Context& C) {
  const int n = P.small("n", 6);
  const int d = P.small("d", 3);
  const auto scheme = P.text("scheme", "random_signs");
  const auto trials = P.count("trials", 100);
  const bool smooth = P.flag("smooth", false);
  P.finish();
  if (scheme != "random_signs" && scheme != "all_ones") throw UsageError("scheme must be random_signs or all_ones");
  if (trials == 0) throw UsageError("trials must be positive");
  std::vector<std::string> header{"trial", "n", "d", "lhs", "rhs", "trivial_ratio", "trivial_ratio_exact",
                                  "conjectured_ratio"};
  if (smooth) header.insert(header.end(), {"smooth_lhs", "smooth_rhs", "smooth_ratio"});
  auto os = C.open("smallball.csv");
  CsvWriter w(os, header);
  double mean_rhs = 0, max_trivial = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(C.seed, t);
    HaarExpansion H(d);
    if (scheme == "random_signs") {
      H = random_sign_hyperbolic(n, d, rng);
    } else {
      for (const auto& r : hyperbolic_index(n, d))
        for (auto& R : enumerate_rectangles(r)) H.coef.emplace(std::move(R), 1.0);
    }
    const auto r = smallball_report(H, n, C.cap);
    w << t << n << d << r.lhs << r.rhs << r.trivial_ratio << r.trivial_ratio_exact << r.conjectured_ratio;
    if (smooth) {
      const auto s = smooth_smallball_check(H, n, C.cap);
      w << s.lhs << s.rhs << s.ratio;
    }
    w.end_row();
    mean_rhs += r.rhs;
    max_trivial = std::max(max_trivial, r.trivial_ratio_exact);
  }
  C.json("summary.json", Json{{"n", n},
                              {"d", d},
                              {"trials", trials},
                              {"mean_rhs", mean_rhs / static_cast<double>(trials)},
                              {"max_trivial_ratio_exact", max_trivial}});
}

CollectionSpec read_collection(Params& P, const std::string& def) {
  CollectionSpec s;
  s.kind = parse_collection(P.text("collection", def));
  s.n = P.small("n", 4);
  s.q = P.small("q", 0);
  s.s = P.small("s", 1);
  s.t = P.small("t", 2);
  s.fixed = P.small("fixed", 0);
  s.V = P.int_range("V", "1..4");
  return s;
}

void cmd_graphs_enumerate(Params& P, Context& C) {
  const bool has_collection = P.text("collection", "").size() > 0;
  if (has_collection) {
    const auto spec = read_collection(P, "");
    P.finish();
    const auto tuples = enumerate_collection(spec);
    auto os = C.open("tuples.csv");
    write_tuples_csv(os, tuples);
    C.json("summary.json", Json{{"collection", collection_name(spec.kind)}, {"n", spec.n}, {"count", tuples.size()}});
    return;
  }
  const auto V = P.int_range("V", "1..4");
  const auto which = P.text("which", "admissible");
  P.finish();
  std::vector<CoincidenceGraph> gs;
  if (which == "admissible") gs = admissible_graphs(V);
  else if (which == "connected") gs = connected_admissible_graphs(V);
  else if (which == "primes") gs = primes(V);
  else throw UsageError("which must be admissible, connected or primes");
  Json arr = Json::array();
  for (const auto& G : gs) arr.push_back(graph_to_json(G));
  C.json("graphs.json", arr);
  C.json("summary.json", Json{{"which", which}, {"V", V}, {"count", gs.size()}});
}

Json exponent_json(const CoincidenceGraph& G, const BeckExponent& e) {
  return Json{{"graph", graph_to_json(G)},       {"exponent", rational_text(e.exponent)},
              {"value", boost::rational_cast<double>(e.exponent)}, {"v32", e.v32},
              {"v12", e.v12},                    {"tabulated", e.tabulated}};
}

void cmd_graphs_exponent(Params& P, Context& C) {
  const auto example = P.text("example", "");
  const auto file = P.text("graph", "");
  if (!example.empty() || !file.empty()) {
    P.finish();
    CoincidenceGraph G;
    if (!example.empty()) {
      G = example_graph(example);
    } else {
      std::ifstream is(file);
      if (!is) throw IoError("cannot read " + file);
      try {
        G = graph_from_json(Json::parse(is));
      } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("bad graph file: ") + e.what());
      }
    }
    C.json("exponent.json", exponent_json(G, beck_exponent(G)));
    return;
  }
  const auto V = P.int_range("V", "1..4");
  P.finish();
  if (V.size() < 2) throw UsageError("exponents need at least two vertices");
  auto os = C.open("exponents.csv");
  CsvWriter w(os, {"index", "vertices", "edges2", "edges3", "exponent", "value", "v32", "v12", "tabulated"});
  Rational best(-1000), worst(1000);
  std::size_t k = 0;
  for (const auto& G : connected_admissible_graphs(V)) {
    const auto e = beck_exponent(G);
    w << k++ << ints_text(G.vertices) << edges_text(G, 2) << edges_text(G, 3) << rational_text(e.exponent)
      << boost::rational_cast<double>(e.exponent) << ints_text(e.v32) << ints_text(e.v12) << e.tabulated;
    w.end_row();
    best = std::max(best, e.exponent);
    worst = std::min(worst, e.exponent);
  }
  C.json("summary.json", Json{{"V", V},
                              {"count", k},
                              {"max", rational_text(best)},
                              {"min", rational_text(worst)},
                              {"all_negative", best < Rational(0)}});
}

void cmd_graphs_ie(Params& P, Context& C) {
  const auto V = P.int_range("V", "1..3");
  const int n = P.small("n", 4);
  const int q = P.small("q", 3);
  P.finish();
  const auto r = inclusion_exclusion_check(V, n, q, C.seed, C.cap);
  C.json("ie.json", Json{{"V", V},
                         {"n", n},
                         {"q", q},
                         {"residual", r.residual},
                         {"graded_residual", r.graded_residual},
                         {"lhs_sup", r.lhs_sup},
                         {"tuples", r.tuples},
                         {"nsd_tuples", r.nsd_tuples},
                         {"graphs", r.graphs}});
}

void cmd_graphs_norms(Params& P, Context& C) {
  const auto spec = read_collection(P, "C2");
  const double p = P.real("p", 2);
  const auto ns = P.int_range("ns", "4..7");
  const auto trials = P.count("trials", 10);
  P.finish();
  const auto r = prod_norm_experiment(spec, p, ns, trials, C.seed, C.cap);
  auto os = C.open("norms.csv");
  CsvWriter w(os, {"n", "tuples", "mean", "ci_low", "ci_high"});
  for (const auto& row : r.rows) {
    w << row.n << row.tuples << row.mean << row.ci_low << row.ci_high;
    w.end_row();
  }
  Json f = fit_json(r.fit);
  f["collection"] = collection_name(spec.kind);
  f["p"] = p;
  f["predicted_exponent"] = r.predicted_exponent;
  C.json("fit.json", f);
}

void cmd_code_vg(Params& P, Context& C) {
  const int m = P.small("m", 7);
  const int dmin = P.small("dmin", 3);
  const bool family = P.flag("family", false);
  P.finish();
  C.json("code.json", code_to_json(vg_code(m, dmin)));
  if (family) C.json("family.json", family_to_json(separated_family(m)));
}

void cmd_code_entropy(Params& P, Context& C) {
  const int n = P.small("n", 6);
  const int d = P.small("d", 2);
  const int m_cap = P.small("m-cap", 20);
  const auto pairs = P.count("pairs", 4096);
  P.finish();
  const auto r = entropy_experiment(n, d, m_cap, pairs, C.seed, C.cap);
  C.json("entropy.json", Json{{"n", r.n},
                              {"d", r.d},
                              {"rectangles", r.rectangles},
                              {"code_length", r.code_length},
                              {"group", r.group},
                              {"code_distance", r.code_distance},
                              {"dimension", r.dimension},
                              {"log_family", r.log_family},
                              {"min_sym_diff", r.min_sym_diff},
                              {"ze_big_ratio", r.ze_big_ratio},
                              {"min_separation", r.min_separation},
                              {"eps_ref", r.eps_ref},
                              {"kappa", r.kappa},
                              {"pairs_checked", r.pairs_checked},
                              {"total_pairs", r.total_pairs},
                              {"sampled", r.sampled}});
}

void cmd_norms_orlicz(Params& P, Context& C) {
  const int n = P.small("n", 6);
  const int d = P.small("d", 2);
  const double alpha = P.real("alpha", 2);
  const int p_max = P.small("p-max", 8);
  P.finish();
  CounterRng rng(C.seed, 0);
  auto H = random_sign_hyperbolic(n, d, rng);
  const double s = 1.0 / std::sqrt(static_cast<double>(hyperbolic_count(n, d)));
  for (auto& [R, a] : H.coef) a *= s;
  const auto r = orlicz_surrogate(grid_evaluate(H, n + 1, C.cap), alpha, p_max);
  auto os = C.open("profile.csv");
  CsvWriter w(os, {"p", "value"});
  for (std::size_t i = 0; i < r.profile.size(); ++i) {
    w << static_cast<int>(i + 1) << r.profile[i];
    w.end_row();
  }
  C.json("summary.json", Json{{"value", r.value}, {"argmax_p", r.argmax_p}});
}

void cmd_norms_square(Params& P, Context& C) {
  const int n = P.small("n", 6);
  const int d = P.small("d", 2);
  const int terms = P.small("terms", 40);
  const auto trials = P.count("trials", 20);
  P.finish();
  auto os = C.open("square.csv");
  CsvWriter w(os, {"trial", "norm_squared", "coefficient_sum", "square_function_l2", "parseval_residual",
                   "square_residual"});
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(C.seed, t);
    const auto r = parseval_check(random_expansion(n, d, terms, rng), C.cap);
    w << t << r.norm_squared << r.coefficient_sum << r.square_function_l2
      << std::abs(r.norm_squared - r.coefficient_sum) << std::abs(r.square_function_l2 - r.norm_squared);
    w.end_row();
  }
}

void cmd_norms_maximal(Params& P, Context& C) {
  const int n = P.small("n", 6);
  const int d = P.small("d", 2);
  const int terms = P.small("terms", 40);
  const bool absolute = P.flag("absolute", true);
  const auto grid = P.text("grid", "none");
  P.finish();
  CounterRng rng(C.seed, 0);
  const auto g = grid_evaluate(random_expansion(n, d, terms, rng), n + 1, C.cap);
  const auto M = dyadic_maximal(g, absolute);
  C.json("summary.json", Json{{"sup_f", sup_norm(g)},
                              {"sup_M", sup_norm(M)},
                              {"l2_f", lp_norm(g, 2)},
                              {"l2_M", lp_norm(M, 2)},
                              {"l2_ratio", lp_norm(M, 2) / lp_norm(g, 2)}});
  if (grid != "none") C.grid("maximal", M, grid);
}

void cmd_norms_cz(Params& P, Context& C) {
  const int m = P.small("m", 10);
  const auto trials = P.count("trials", 100);
  const auto lambdas = P.range("lambdas", "0.5,1,2,4,8", false);
  P.finish();
  auto os = C.open("cz.csv");
  CsvWriter w(os, {"trial", "lambda", "intervals", "measure", "l1_over_lambda", "good_sup", "reconstruction",
                   "max_interval_mean"});
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(C.seed, t);
    auto g = GridFunction::zeros(1, m, C.cap);
    for (auto& v : g.values) v = std::pow(rng.normal(), 3);
    for (double lambda : lambdas) {
      const auto cz = cz_decompose(g, lambda);
      double measure = 0, rec = 0, worst_mean = 0;
      for (const auto& I : cz.intervals) {
        measure += I.length();
        const std::int64_t width = std::int64_t{1} << (m - I.scale);
        double s = 0;
        for (std::int64_t c = I.offset * width; c < (I.offset + 1) * width; ++c) s += cz.bad[static_cast<std::size_t>(c)];
        worst_mean = std::max(worst_mean, std::abs(s / static_cast<double>(width)));
      }
      for (std::size_t c = 0; c < g.size(); ++c) rec = std::max(rec, std::abs(cz.good[c] + cz.bad[c] - g[c]));
      w << t << lambda << cz.intervals.size() << measure << lp_norm(g, 1) / lambda << sup_norm(cz.good) << rec
        << worst_mean;
      w.end_row();
    }
  }
}

void cmd_norms_khintchine(Params& P, Context& C) {
  const int terms = P.small("terms", 64);
  const auto trials = P.count("trials", 1'000'000);
  const auto ts = P.range("ts", "0.5,1,1.5,2,2.5,3,3.5,4", false);
  P.finish();
  if (terms < 1) throw UsageError("terms must be positive");
  const std::vector<double> weights(static_cast<std::size_t>(terms), 1.0 / std::sqrt(static_cast<double>(terms)));
  const auto rows = rademacher_tail(weights, ts, trials, C.seed);
  auto os = C.open("tail.csv");
  CsvWriter w(os, {"t", "p_hat", "wilson_lo", "wilson_hi", "bound", "sigma", "within"});
  for (const auto& r : rows) {
    const double sigma = std::sqrt(r.bound * (1 - r.bound) / static_cast<double>(trials));
    w << r.t << r.p_hat << r.wilson_lo << r.wilson_hi << r.bound << sigma << (r.p_hat <= r.bound + 3 * sigma);
    w.end_row();
  }
}

void cmd_sweep(Params& P, Context& C) {
  const auto target = P.text("target", "smallball");
  std::vector<double> xs, ys, fx, fy;
  std::string transform;
  if (target == "smallball") {
    const int d = P.small("d", 2);
    const auto trials = P.count("trials", 200);
    const auto ns = P.int_range("values", "4..8");
    P.finish();
    for (int n : ns) {
      const auto s = smallball_experiment(n, d, trials, SignMode::Random, C.seed, C.cap);
      xs.push_back(n);
      ys.push_back(s.mean_sup);
    }
    transform = "log-log";
  } else if (target == "roth" || target == "schmidt" || target == "halasz-sine") {
    const auto src = PointSource::read(P);
    const double param = target == "schmidt" ? P.real("alpha", 1.0 / 64) : P.real("a", 0.5);
    const auto Ns = P.range("values", "8..1024", true);
    P.finish();
    for (double N : Ns) {
      const auto A = src.make(static_cast<std::size_t>(N), C.seed);
      double y = 0;
      if (target == "roth") y = roth_certificate(A, -1, false).l2_lower;
      else if (target == "schmidt") y = schmidt_dual(A, param, -1, C.cap).pairing;
      else y = halasz_sine_dual(A, param, -1, C.cap).normalized;
      xs.push_back(N);
      ys.push_back(y);
    }
    transform = target == "roth" ? "sqrt(ln x)" : "log2 x";
  } else if (target == "constant") {
    const double value = P.real("value", 1.0);
    xs = P.range("values", "1..8", false);
    P.finish();
    ys.assign(xs.size(), value);
    transform = "log-log";
  } else {
    throw UsageError("sweep target must be smallball, roth, schmidt, halasz-sine or constant");
  }
  if (xs.size() < 3) throw UsageError("a sweep needs at least three points");
  auto os = C.open("sweep.csv");
  CsvWriter w(os, {"axis", "value"});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    w << xs[i] << ys[i];
    w.end_row();
  }
  LinearFit fit;
  if (transform == "log-log") {
    fit = loglog_fit(xs, ys);
  } else {
    for (double x : xs) fx.push_back(transform == "log2 x" ? std::log2(x) : std::sqrt(std::log(x)));
    fit = least_squares(fx, ys);
  }
  Json f = fit_json(fit);
  f["target"] = target;
  f["transform"] = transform;
  f["points"] = xs.size();
  C.json("fit.json", f);
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class DirectoryLock {
 public:
  explicit DirectoryLock(fs::path p) : path_(std::move(p)) {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) throw IoError("output directory is locked or unwritable: " + path_.string());
  }
  ~DirectoryLock() {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

}  // namespace

ExperimentSpec ExperimentSpec::from_json(const Json& j) {
  if (!j.is_object()) throw UsageError("an experiment spec must be a JSON object");
  ExperimentSpec s;
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "command") s.command = v.get<std::string>();
      else if (k == "variant") s.variant = v.get<std::string>();
      else if (k == "seed") s.seed = v.is_string() ? std::stoull(v.get<std::string>()) : v.get<std::uint64_t>();
      else if (k == "out") s.out = v.get<std::string>();
      else if (k == "cap-cells") s.cap = v.is_string() ? std::stoll(v.get<std::string>()) : v.get<std::int64_t>();
      else s.params[k] = v;
    } catch (const std::exception&) {
      throw UsageError("bad value for '" + k + "'");
    }
  }
  return s;
}

Json ExperimentSpec::to_json() const {
  Json j;
  j["command"] = command;
  if (!variant.empty()) j["variant"] = variant;
  j["seed"] = seed;
  j["out"] = out.string();
  j["cap-cells"] = cap;
  for (const auto& [k, v] : params.items()) j[k] = v;
  return j;
}

Json RunManifest::to_json() const {
  Json j;
  j["tool"] = tool;
  j["version"] = version;
  j["rng"] = rng;
  j["spec"] = spec;
  j["started"] = started;
  j["finished"] = finished;
  Json f = Json::array();
  for (const auto& o : files) f.push_back(Json{{"name", o.name}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  j["files"] = f;
  return j;
}

const std::map<std::string, std::vector<std::string>>& command_table() {
  static const std::map<std::string, std::vector<std::string>> t{
      {"discrepancy", {""}},
      {"dual", {"temlyakov", "schmidt", "halasz-complex", "halasz-sine", "beck"}},
      {"smallball", {""}},
      {"graphs", {"enumerate", "exponent", "ie-check", "norms"}},
      {"code", {"vg", "entropy"}},
      {"norms", {"orlicz", "square", "maximal", "cz", "khintchine"}},
      {"sweep", {""}},
  };
  return t;
}

std::string sha256_hex(const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw IoError("cannot read " + file.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(is.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned i = 0; i < len; ++i) {
    hex += "0123456789abcdef"[md[i] >> 4];
    hex += "0123456789abcdef"[md[i] & 15];
  }
  return hex;
}

RunManifest run(const ExperimentSpec& spec) {
  const auto& table = command_table();
  auto it = table.find(spec.command);
  if (it == table.end()) throw UsageError("unknown command '" + spec.command + "'");
  const auto& variants = it->second;
  if (std::find(variants.begin(), variants.end(), spec.variant) == variants.end())
    throw UsageError("unknown variant '" + spec.variant + "' for " + spec.command);
  if (spec.cap < 1) throw UsageError("cap-cells must be positive");

  std::error_code ec;
  fs::create_directories(spec.out, ec);
  if (ec) throw IoError("cannot create " + spec.out.string() + ": " + ec.message());
  DirectoryLock lock(spec.out / ".lock");

  RunManifest m;
  m.rng = CounterRng::kName;
  m.started = utc_now();
  Params P(spec.params);
  Context C(spec.out, spec.seed, spec.cap);
  const std::string key = spec.variant.empty() ? spec.command : spec.command + " " + spec.variant;
  if (key == "discrepancy") cmd_discrepancy(P, C);
  else if (key == "dual temlyakov") cmd_temlyakov(P, C);
  else if (key == "dual schmidt") cmd_schmidt(P, C);
  else if (key == "dual halasz-complex") cmd_halasz(P, C, true);
  else if (key == "dual halasz-sine") cmd_halasz(P, C, false);
  else if (key == "dual beck") cmd_beck(P, C);
  else if (key == "smallball") cmd_smallball(P, C);
  else if (key == "graphs enumerate") cmd_graphs_enumerate(P, C);
  else if (key == "graphs exponent") cmd_graphs_exponent(P, C);
  else if (key == "graphs ie-check") cmd_graphs_ie(P, C);
  else if (key == "graphs norms") cmd_graphs_norms(P, C);
  else if (key == "code vg") cmd_code_vg(P, C);
  else if (key == "code entropy") cmd_code_entropy(P, C);
  else if (key == "norms orlicz") cmd_norms_orlicz(P, C);
  else if (key == "norms square") cmd_norms_square(P, C);
  else if (key == "norms maximal") cmd_norms_maximal(P, C);
  else if (key == "norms cz") cmd_norms_cz(P, C);
  else if (key == "norms khintchine") cmd_norms_khintchine(P, C);
  else if (key == "sweep") cmd_sweep(P, C);

  ExperimentSpec echo = spec;
  echo.params = P.resolved();
  m.spec = echo.to_json();
  m.spec.erase("out");
  for (const auto& name : C.files())
    m.files.push_back({name, sha256_hex(spec.out / name), fs::file_size(spec.out / name)});
  m.finished = utc_now();
  std::ofstream os(spec.out / "manifest.json", std::ios::binary);
  os << m.to_json().dump(2) << '\n';
  if (!os) throw IoError("cannot write the manifest");
  return m;
}

Json error_record(const std::exception& e) {
  std::string type = "internal";
  if (dynamic_cast<const UsageError*>(&e)) type = "usage";
  else if (dynamic_cast<const ResourceError*>(&e)) type = "resource";
  else if (dynamic_cast<const IoError*>(&e)) type = "io";
  return Json{{"error", Json{{"type", type}, {"message", e.what()}}}};
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return 2;
  if (dynamic_cast<const ResourceError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  return 1;
}

CoincidenceGraph example_graph(const std::string& name) {
  auto make = [](std::vector<int> v, std::vector<std::pair<int, int>> e2, std::vector<std::pair<int, int>> e3) {
    CoincidenceGraph G(std::move(v));
    for (auto [a, b] : e2) G.add_edge(2, a, b);
    for (auto [a, b] : e3) G.add_edge(3, a, b);
    return G;
  };
  if (name == "e5") return make({1, 2, 3, 4, 5}, {{5, 2}, {4, 1}}, {{2, 4}, {1, 3}});
  if (name == "e6") return make({1, 2, 3, 4, 5, 6}, {{6, 1}, {5, 2}, {4, 3}}, {{1, 5}, {2, 4}});
  if (name == "half") return make({1, 2, 3, 4, 5, 6}, {{1, 2}, {2, 3}, {1, 3}}, {{1, 4}, {2, 5}, {3, 6}});
  throw UsageError("unknown example graph '" + name + "' (e5, e6, half)");
}

std::vector<double> parse_range(const std::string& s, bool geometric) {
  std::vector<double> out;
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(parse_number(item));
      } catch (const IoError&) {
        throw UsageError("bad list entry '" + item + "'");
      }
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
  }
  double lo = 0, hi = 0;
  try {
    lo = parse_number(s.substr(0, dots));
    hi = parse_number(s.substr(dots + 2));
  } catch (const IoError&) {
    throw UsageError("bad range '" + s + "'");
  }
  if (hi < lo) throw UsageError("range end below its start");
  if (geometric) {
    if (lo <= 0) throw UsageError("a doubling range must start above zero");
    for (double x = lo; x <= hi; x *= 2) out.push_back(x);
  } else {
    for (double x = lo; x <= hi + 1e-9; x += 1) out.push_back(x);
  }
  return out;
}

}  // namespace dlab::lab
