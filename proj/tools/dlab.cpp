// Command-line front end for the dyadic laboratory.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dlab/lab.hpp"

using dlab::Json;

namespace {

struct Opt {
  const char* key;
  const char* help;
  bool flag = false;
};

const std::vector<Opt> kPoints{{"gen", "van_der_corput | halton | random | file"},
                               {"N", "number of points"},
                               {"d", "dimension"},
                               {"bits", "bits per coordinate for random points"},
                               {"points", "points CSV when gen=file"},
                               {"sweep", "N range such as N=8..512 (doubling)"}};

std::vector<Opt> with_points(std::vector<Opt> extra) {
  auto v = kPoints;
  v.insert(v.end(), extra.begin(), extra.end());
  return v;
}

const std::map<std::string, std::vector<Opt>>& option_table() {
  static const std::map<std::string, std::vector<Opt>> t{
      {"discrepancy", with_points({{"exact", "write coordinates as p/2^k", true}, {"sup", "compute the star discrepancy"}})},
      {"dual temlyakov", {{"n", "volume scale"}, {"trials", "random coefficient sets"}, {"grid", "none | bin | csv"}}},
      {"dual schmidt", with_points({{"alpha", "Riesz parameter"}, {"n", "scale (default from N)"}})},
      {"dual halasz-complex", with_points({{"a", "product parameter"}, {"n", "scale (default from N)"}})},
      {"dual halasz-sine", with_points({{"a", "sine parameter"}, {"n", "scale (default from N)"}})},
      {"dual beck",
       {{"n", "volume scale"},
        {"q", "number of blocks"},
        {"a", "first Riesz parameter"},
        {"b", "second Riesz parameter"},
        {"trials", "random sign sets"},
        {"N", "Halton points for the discrepancy ledger (0 for none)"},
        {"p-max", "largest moment of the block sums"}}},
      {"smallball",
       {{"n", "volume scale"},
        {"d", "dimension"},
        {"scheme", "random_signs | all_ones"},
        {"trials", "number of trials"},
        {"smooth", "add the integrated (smooth) variant", true}}},
      {"graphs enumerate",
       {{"V", "vertex labels, e.g. 1..4"},
        {"which", "admissible | connected | primes"},
        {"collection", "C2 | C2b | X1 | B4 | B4a | Bmax | B1 | B3 | NSD"},
        {"n", "volume scale"},
        {"q", "number of blocks (0 for none)"},
        {"s", "first block label"},
        {"t", "second block label"},
        {"fixed", "fixed coordinate value"}}},
      {"graphs exponent",
       {{"V", "vertex labels; all connected admissible graphs"},
        {"example", "e5 | e6 | half"},
        {"graph", "graph JSON file"}}},
      {"graphs ie-check", {{"V", "vertex labels"}, {"n", "volume scale"}, {"q", "number of blocks"}}},
      {"graphs norms",
       {{"collection", "collection name"},
        {"p", "Lebesgue exponent"},
        {"ns", "values of n, e.g. 4..7"},
        {"trials", "random sign sets per n"},
        {"q", "number of blocks (0 for none)"},
        {"s", "first block label"},
        {"t", "second block label"},
        {"fixed", "fixed coordinate value"},
        {"V", "vertex labels for NSD"}}},
      {"code vg", {{"m", "code length"}, {"dmin", "minimum distance"}, {"family", "also write the separated family", true}}},
      {"code entropy",
       {{"n", "volume scale"}, {"d", "dimension"}, {"m-cap", "largest code length"}, {"pairs", "pair budget"}}},
      {"norms orlicz",
       {{"n", "volume scale"}, {"d", "dimension"}, {"alpha", "Orlicz exponent"}, {"p-max", "largest p"}}},
      {"norms square", {{"n", "depth"}, {"d", "dimension"}, {"terms", "terms per expansion"}, {"trials", "expansions"}}},
      {"norms maximal",
       {{"n", "depth"}, {"d", "dimension"}, {"terms", "terms"}, {"absolute", "average |f|"}, {"grid", "none | bin | csv"}}},
      {"norms cz", {{"m", "resolution"}, {"trials", "random functions"}, {"lambdas", "heights, e.g. 0.5,1,2"}}},
      {"norms khintchine", {{"terms", "equal weights"}, {"trials", "samples"}, {"ts", "thresholds"}}},
      {"sweep",
       {{"target", "smallball | roth | schmidt | halasz-sine | constant"},
        {"values", "sweep axis, e.g. 4..8 or 8..1024"},
        {"d", "dimension"},
        {"trials", "trials per point (smallball)"},
        {"gen", "point generator"},
        {"bits", "bits per random coordinate"},
        {"points", "points CSV when gen=file"},
        {"alpha", "Riesz parameter (schmidt)"},
        {"a", "sine parameter (halasz-sine)"},
        {"value", "constant value"}}},
  };
  return t;
}

const std::map<std::string, std::string> kHelp{
    {"discrepancy", "discrepancy of point sets with r-function certificates"},
    {"dual", "dual test functions paired against data"},
    {"dual temlyakov", "Temlyakov product against random expansions"},
    {"dual schmidt", "Schmidt Riesz product against D_N"},
    {"dual halasz-complex", "complex Riesz product against D_N"},
    {"dual halasz-sine", "sine test function against D_N"},
    {"dual beck", "short Riesz product split into strongly distinct parts"},
    {"smallball", "sup norms of hyperbolic Haar sums"},
    {"graphs", "coincidence graphs and r-function products"},
    {"graphs enumerate", "admissible graphs or tuples of a collection"},
    {"graphs exponent", "Beck exponent of graphs"},
    {"graphs ie-check", "inclusion-exclusion over admissible graphs on the grid"},
    {"graphs norms", "L^p norms of collection products against n"},
    {"code", "linear codes and separated families"},
    {"code vg", "Varshamov-Gilbert code"},
    {"code entropy", "separated smooth functions from a code"},
    {"norms", "function norms on dyadic grids"},
    {"norms orlicz", "exp(L^alpha) surrogate of a hyperbolic sum"},
    {"norms square", "square function against L^2"},
    {"norms maximal", "strong dyadic maximal function"},
    {"norms cz", "Calderon-Zygmund decomposition"},
    {"norms khintchine", "Rademacher tail against exp(-t^2/4)"},
    {"sweep", "sweep one parameter and fit a trend"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic discrepancy and small-ball laboratory"};
  app.require_subcommand(1);

  std::string seed, out, cap, config;
  auto add_globals = [&](CLI::App* a) {
    a->add_option("--seed", seed, "64-bit seed");
    a->add_option("--out", out, "output directory");
    a->add_option("--cap-cells", cap, "largest grid allowed, in cells");
    a->add_option("--json", config, "JSON config file; flags override it");
  };
  add_globals(&app);

  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::map<CLI::App*, std::pair<std::string, std::string>> routes;

  auto add_options = [&](CLI::App* sub, const std::string& key) {
    add_globals(sub);
    for (const auto& o : option_table().at(key)) {
      const std::string slot = key + "/" + o.key;
      if (o.flag) sub->add_flag(std::string("--") + o.key, flags[slot], o.help);
      else sub->add_option(std::string("--") + o.key, values[slot], o.help);
    }
  };

  for (const auto& [command, variants] : dlab::lab::command_table()) {
    auto* sub = app.add_subcommand(command, kHelp.at(command));
    if (variants.size() == 1 && variants[0].empty()) {
      add_options(sub, command);
      routes[sub] = {command, ""};
      continue;
    }
    sub->require_subcommand(1);
    for (const auto& v : variants) {
      auto* leaf = sub->add_subcommand(v, kHelp.at(command + " " + v));
      add_options(leaf, command + " " + v);
      routes[leaf] = {command, v};
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << Json{{"error", Json{{"type", "usage"}, {"message", e.what()}}}}.dump() << '\n';
    return 2;
  }

  try {
    CLI::App* leaf = nullptr;
    for (auto& [a, r] : routes)
      if (a->parsed()) leaf = a;
    const auto [command, variant] = routes.at(leaf);
    const std::string key = variant.empty() ? command : command + " " + variant;

    Json spec = Json::object();
    if (!config.empty()) {
      std::ifstream is(config);
      if (!is) throw dlab::IoError("cannot read config " + config);
      try {
        spec = Json::parse(is);
      } catch (const nlohmann::json::exception& e) {
        throw dlab::IoError(std::string("bad config: ") + e.what());
      }
      if (!spec.is_object()) throw dlab::UsageError("config must be a JSON object");
      if (spec.contains("command") && spec["command"] != command)
        throw dlab::UsageError("config is for command " + spec["command"].dump());
      if (spec.contains("variant") && spec["variant"] != variant)
        throw dlab::UsageError("config is for variant " + spec["variant"].dump());
    }
    spec["command"] = command;
    if (!variant.empty()) spec["variant"] = variant;
    if (!seed.empty()) spec["seed"] = seed;
    if (!out.empty()) spec["out"] = out;
    if (!cap.empty()) spec["cap-cells"] = cap;
    for (const auto& o : option_table().at(key)) {
      const std::string slot = key + "/" + o.key;
      if (o.flag) {
        if (flags[slot]) spec[o.key] = true;
      } else if (leaf->count(std::string("--") + o.key) > 0) {
        spec[o.key] = values[slot];
      }
    }
    const auto manifest = dlab::lab::run(dlab::lab::ExperimentSpec::from_json(spec));
    for (const auto& f : manifest.files) std::cout << f.name << ' ' << f.sha256 << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << dlab::lab::error_record(e).dump() << '\n';
    return dlab::lab::exit_code(e);
  }
}
