#include "dlab/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dlab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string format_dyadic(double x) {
  for (int k = 0; k <= 60; ++k) {
    const double p = std::ldexp(x, k);
    if (p == std::floor(p) && std::abs(p) < 0x1.0p62) {
      const auto ip = static_cast<long long>(p);
      return k == 0 ? std::to_string(ip) : std::to_string(ip) + "/2^" + std::to_string(k);
    }
  }
  return format_double(x);
}

double parse_number(const std::string& s) {
  const auto slash = s.find("/2^");
  double v = 0;
  if (slash != std::string::npos) {
    long long p = 0;
    int k = 0;
    auto r1 = std::from_chars(s.data(), s.data() + slash, p);
    auto r2 = std::from_chars(s.data() + slash + 3, s.data() + s.size(), k);
    if (r1.ec != std::errc() || r1.ptr != s.data() + slash || r2.ec != std::errc() || r2.ptr != s.data() + s.size())
      throw IoError("bad dyadic number '" + s + "'");
    return std::ldexp(static_cast<double>(p), -k);
  }
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw IoError("bad number '" + s + "'");
  return v;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), width_(header.size()) {
  if (header.empty()) throw UsageError("csv header is empty");
  for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
  os_ << '\n';
}

CsvWriter& CsvWriter::operator<<(const std::string& field) {
  if (col_ == width_) throw std::logic_error("csv row longer than its header");
  os_ << (col_ ? "," : "") << field;
  ++col_;
  return *this;
}

void CsvWriter::end_row() {
  if (col_ != width_) throw std::logic_error("csv row shorter than its header");
  os_ << '\n';
  col_ = 0;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw IoError("csv input is empty");
  t.header = split(line);
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    auto row = split(line);
    if (row.size() != t.header.size()) throw IoError("csv row width does not match the header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_points_csv(std::ostream& os, const PointSet& A, bool exact) {
  std::vector<std::string> header;
  for (int j = 1; j <= A.dim; ++j) header.push_back("x" + std::to_string(j));
  CsvWriter w(os, header);
  for (const auto& p : A.points) {
    for (double x : p) w << (exact ? format_dyadic(x) : format_double(x));
    w.end_row();
  }
}

PointSet read_points_csv(std::istream& is) {
  auto t = read_csv(is);
  PointSet A;
  A.dim = static_cast<int>(t.header.size());
  for (const auto& row : t.rows) {
    std::vector<double> p;
    for (const auto& f : row) p.push_back(parse_number(f));
    A.points.push_back(std::move(p));
  }
  A.validate();
  return A;
}

Json certificate_json(const RothCertificate& c) {
  Json j;
  j["N"] = c.N;
  j["n"] = c.n;
  j["d"] = c.d;
  j["pairing"] = c.pairing;
  j["l2_lower"] = c.l2_lower;
  j["sup_disc"] = c.sup_disc ? Json(*c.sup_disc) : Json(nullptr);
  j["per_shape"] = c.per_shape;
  return j;
}

Json graph_to_json(const CoincidenceGraph& G) {
  Json j;
  j["vertices"] = G.vertices;
  for (int color : {2, 3}) {
    Json e = Json::array();
    for (auto [a, b] : G.edges(color)) e.push_back({a, b});
    j[color == 2 ? "edges2" : "edges3"] = e;
  }
  return j;
}

CoincidenceGraph graph_from_json(const Json& j) {
  try {
    CoincidenceGraph G(j.at("vertices").get<std::vector<int>>());
    for (int color : {2, 3})
      for (const auto& e : j.at(color == 2 ? "edges2" : "edges3")) {
        if (e.size() != 2) throw IoError("graph edge must have two endpoints");
        G.add_edge(color, e[0].get<int>(), e[1].get<int>());
      }
    return G;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad graph json: ") + e.what());
  }
}

std::string hex_word(std::uint64_t w, int m) {
  const int digits = std::max(1, (m + 3) / 4);
  std::string s(static_cast<std::size_t>(digits), '0');
  for (int i = digits - 1; i >= 0; --i, w >>= 4) s[static_cast<std::size_t>(i)] = "0123456789abcdef"[w & 15];
  return s;
}

std::uint64_t parse_hex_word(const std::string& s) {
  std::uint64_t w = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), w, 16);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) throw IoError("bad hex word '" + s + "'");
  return w;
}

Json code_to_json(const BinaryCode& c) {
  Json j;
  j["m"] = c.m;
  j["k"] = c.k;
  j["dmin"] = c.dmin;
  j["min_distance"] = c.min_distance;
  Json w = Json::array();
  for (auto g : c.generators) w.push_back(hex_word(g, c.m));
  j["words"] = w;
  return j;
}

BinaryCode code_from_json(const Json& j) {
  try {
    BinaryCode c;
    c.m = j.at("m").get<int>();
    c.k = j.at("k").get<int>();
    c.dmin = j.at("dmin").get<int>();
    for (const auto& w : j.at("words")) c.generators.push_back(parse_hex_word(w.get<std::string>()));
    if (static_cast<int>(c.generators.size()) != c.k) throw IoError("code word count differs from k");
    if (c.m < 1 || c.m > kMaxCodeLength) throw IoError("code length out of range");
    c.min_distance = min_weight(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad code json: ") + e.what());
  }
}

Json family_to_json(const SeparatedFamily& f) {
  Json j;
  j["m"] = f.m;
  j["k"] = f.dimension;
  j["dmin"] = f.distance;
  j["alpha"] = f.alpha;
  j["c"] = f.c;
  j["min_sym_diff"] = f.min_sym_diff;
  Json w = Json::array();
  for (auto x : f.words) w.push_back(hex_word(x, f.m));
  j["words"] = w;
  return j;
}

void write_grid(const GridFunction& g, const std::filesystem::path& stem, const std::string& format) {
  if (format != "bin" && format != "csv") throw UsageError("grid format must be bin or csv");
  auto data = stem;
  data += "." + format;
  Json h;
  h["dim"] = g.dim;
  h["resolution"] = g.resolution;
  h["format"] = format;
  h["cells"] = g.size();
  h["data"] = data.filename().string();
  auto hp = stem;
  hp += ".json";
  std::ofstream hs(hp);
  hs << h.dump(2) << '\n';
  if (format == "bin") {
    std::ofstream os(data, std::ios::binary);
    for (double v : g.values) {
      auto u = std::bit_cast<std::uint64_t>(v);
      char b[8];
      for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
      os.write(b, 8);
    }
    if (!os) throw IoError("cannot write " + data.string());
  } else {
    std::ofstream os(data);
    CsvWriter w(os, {"value"});
    for (double v : g.values) {
      w << v;
      w.end_row();
    }
    if (!os) throw IoError("cannot write " + data.string());
  }
  if (!hs) throw IoError("cannot write " + hp.string());
}

GridFunction read_grid(const std::filesystem::path& header) {
  std::ifstream hs(header);
  if (!hs) throw IoError("cannot read " + header.string());
  Json h;
  try {
    h = Json::parse(hs);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad grid header: ") + e.what());
  }
  GridFunction g;
  g.dim = h.at("dim").get<int>();
  g.resolution = h.at("resolution").get<int>();
  const auto cells = h.at("cells").get<std::size_t>();
  if (static_cast<double>(cells) != std::ldexp(1.0, g.dim * g.resolution)) throw IoError("grid cell count mismatch");
  const auto data = header.parent_path() / h.at("data").get<std::string>();
  const auto format = h.at("format").get<std::string>();
  if (format == "bin") {
    std::ifstream is(data, std::ios::binary);
    g.values.resize(cells);
    for (auto& v : g.values) {
      unsigned char b[8];
      if (!is.read(reinterpret_cast<char*>(b), 8)) throw IoError("grid data truncated");
      std::uint64_t u = 0;
      for (int i = 7; i >= 0; --i) u = (u << 8) | b[i];
      v = std::bit_cast<double>(u);
    }
  } else if (format == "csv") {
    std::ifstream is(data);
    if (!is) throw IoError("cannot read " + data.string());
    auto t = read_csv(is);
    if (t.rows.size() != cells) throw IoError("grid data has the wrong length");
    for (const auto& r : t.rows) g.values.push_back(parse_number(r[0]));
  } else {
    throw IoError("unknown grid format '" + format + "'");
  }
  return g;
}

void write_expansion_csv(std::ostream& os, const HaarExpansion& e) {
  std::vector<std::string> header;
  for (int j = 1; j <= e.dim; ++j) header.push_back("r" + std::to_string(j));
  for (int j = 1; j <= e.dim; ++j) header.push_back("j" + std::to_string(j));
  header.push_back("coef");
  CsvWriter w(os, header);
  for (int j = 0; j < e.dim; ++j) w << -1;
  for (int j = 0; j < e.dim; ++j) w << 0;
  w << e.mean;
  w.end_row();
  for (const auto& [R, a] : e.coef) {
    for (const auto& I : R.sides) w << I.scale;
    for (const auto& I : R.sides) w << static_cast<long long>(I.offset);
    w << a;
    w.end_row();
  }
}

HaarExpansion read_expansion_csv(std::istream& is) {
  auto t = read_csv(is);
  if (t.header.size() < 3 || t.header.size() % 2 == 0) throw IoError("expansion csv needs r, j and coef columns");
  const int d = static_cast<int>(t.header.size() / 2);
  HaarExpansion e(d);
  for (const auto& row : t.rows) {
    std::vector<int> r;
    std::vector<std::int64_t> off;
    for (int j = 0; j < d; ++j) r.push_back(static_cast<int>(parse_number(row[static_cast<std::size_t>(j)])));
    for (int j = 0; j < d; ++j) off.push_back(static_cast<std::int64_t>(parse_number(row[static_cast<std::size_t>(d + j)])));
    const double a = parse_number(row.back());
    if (std::all_of(r.begin(), r.end(), [](int x) { return x == -1; })) {
      e.mean += a;
      continue;
    }
    e.add(DyadicRectangle(ShapeVector(r), off), a);
  }
  return e;
}

void write_tuples_csv(std::ostream& os, const std::vector<RTuple>& tuples) {
  std::vector<std::string> header;
  const std::size_t k = tuples.empty() ? 1 : tuples.front().size();
  const int d = tuples.empty() || tuples.front().empty() ? 3 : tuples.front().front().dim();
  for (std::size_t v = 1; v <= k; ++v)
    for (int j = 1; j <= d; ++j) header.push_back("v" + std::to_string(v) + "_r" + std::to_string(j));
  CsvWriter w(os, header);
  for (const auto& t : tuples) {
    for (const auto& s : t)
      for (int x : s.r) w << x;
    w.end_row();
  }
}

}  // namespace dlab
