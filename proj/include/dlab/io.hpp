#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlab/entropy.hpp"
#include "dlab/graphs.hpp"
#include "dlab/haar_field.hpp"
#include "dlab/pointset.hpp"

namespace dlab {

// Thrown when a file cannot be read or written, or is malformed.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form.
std::string format_double(double x);
// "p/2^k" with k minimal when x is dyadic with k <= 60, otherwise the decimal form.
std::string format_dyadic(double x);
// Accepts decimals and "p/2^k".
double parse_number(const std::string& s);

// Rows of comma-separated fields; the header row is mandatory.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  CsvWriter& operator<<(const std::string& field);
  CsvWriter& operator<<(const char* field) { return *this << std::string(field); }
  CsvWriter& operator<<(double x) { return *this << format_double(x); }
  CsvWriter& operator<<(long long x) { return *this << std::to_string(x); }
  CsvWriter& operator<<(unsigned long long x) { return *this << std::to_string(x); }
  CsvWriter& operator<<(long x) { return *this << std::to_string(x); }
  CsvWriter& operator<<(unsigned long x) { return *this << std::to_string(x); }
  CsvWriter& operator<<(int x) { return *this << std::to_string(x); }
  CsvWriter& operator<<(bool x) { return *this << std::string(x ? "1" : "0"); }
  void end_row();

 private:
  std::ostream& os_;
  std::size_t width_, col_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& is);

// One point per row, header x1..xd.
void write_points_csv(std::ostream& os, const PointSet& A, bool exact = false);
PointSet read_points_csv(std::istream& is);

Json certificate_json(const RothCertificate& c);

Json graph_to_json(const CoincidenceGraph& G);
CoincidenceGraph graph_from_json(const Json& j);

// Generators as hex words, bit i is coordinate i + 1.
std::string hex_word(std::uint64_t w, int m);
std::uint64_t parse_hex_word(const std::string& s);
Json code_to_json(const BinaryCode& c);
BinaryCode code_from_json(const Json& j);
Json family_to_json(const SeparatedFamily& f);

// Writes stem.json {dim, resolution, format, cells, data} and the value file
// stem.bin (little-endian doubles) or stem.csv (header "value").
void write_grid(const GridFunction& g, const std::filesystem::path& stem, const std::string& format);
GridFunction read_grid(const std::filesystem::path& header);

// Rows r1..rd, j1..jd, coef; the mean is the row with every r_j = -1.
void write_expansion_csv(std::ostream& os, const HaarExpansion& e);
HaarExpansion read_expansion_csv(std::istream& is);

// Columns v1_r1.. for every vertex of the tuple.
void write_tuples_csv(std::ostream& os, const std::vector<RTuple>& tuples);

}  // namespace dlab
