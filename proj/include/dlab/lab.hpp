#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dlab/io.hpp"

namespace dlab::lab {

inline constexpr const char* kToolVersion = "1.0.0";

struct ExperimentSpec {
  std::string command;
  std::string variant;  // subcommand, empty for commands without variants
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  std::int64_t cap = kDefaultCellCap;
  Json params = Json::object();

  // Flat object: command, variant, seed, out, cap-cells and the parameters.
  static ExperimentSpec from_json(const Json& j);
  Json to_json() const;
};

struct OutputFile {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  Json spec;  // the spec with every parameter resolved, defaults included
  std::string tool = "dlab";
  std::string version = kToolVersion;
  std::string rng;
  std::string started, finished;
  std::vector<OutputFile> files;

  Json to_json() const;
};

// Runs one experiment, writing its data files and manifest.json into spec.out.
RunManifest run(const ExperimentSpec& spec);

// Commands and their variants ("" when there are none).
const std::map<std::string, std::vector<std::string>>& command_table();

std::string sha256_hex(const std::filesystem::path& file);

// Error record {"error": {"type", "message"}} and the matching exit code:
// 2 usage, 3 resource, 4 io, 1 anything else.
Json error_record(const std::exception& e);
int exit_code(const std::exception& e);

// Named example graphs: "e5", "e6" and "half".
CoincidenceGraph example_graph(const std::string& name);

// "4..8", "8..512" (doubling when geometric), "4,5,7".
std::vector<double> parse_range(const std::string& s, bool geometric);

}  // namespace dlab::lab
