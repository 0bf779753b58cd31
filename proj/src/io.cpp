#include "torusmf/io.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <algorithm>
#include <boost/version.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "torusmf/errors.hpp"

#ifndef TORUSMF_VERSION
#define TORUSMF_VERSION "unknown"
#endif

namespace torusmf {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_block(std::ostream& os, const ScalarField& f) {
  const std::size_t n = f.n();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i) os << ',';
      os << fmt(f(i, j));
    }
    os << '\n';
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  return os;
}

std::vector<double> parse_row(const std::string& line, const std::string& where) {
  std::vector<double> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    double x = 0.0;
    const auto [next, ec] = std::from_chars(p, end, x);
    if (ec != std::errc()) throw InvalidArgument(where + ": not a number");
    out.push_back(x);
    p = next;
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p < end) {
      if (*p != ',') throw InvalidArgument(where + ": expected ','");
      ++p;
    }
  }
  return out;
}

struct RawCsv {
  std::size_t n = 0;
  std::string preset;
  std::vector<std::vector<double>> rows;
};

RawCsv read_raw(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open " + path.string());
  RawCsv raw;
  std::string line;
  std::size_t lineno = 0;
  auto where = [&] { return path.string() + ":" + std::to_string(lineno); };
  if (!std::getline(is, line)) throw InvalidArgument(path.string() + ": empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "n,v-preset") throw InvalidArgument(where() + ": expected header 'n,v-preset'");
  if (!std::getline(is, line)) throw InvalidArgument(path.string() + ": missing size line");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto comma = line.find(',');
  if (comma == std::string::npos) throw InvalidArgument(where() + ": expected '<n>,<v-preset>'");
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(line.data(), line.data() + comma, n);
  if (ec != std::errc() || ptr != line.data() + comma || n == 0) throw InvalidArgument(where() + ": bad n");
  raw.n = n;
  raw.preset = line.substr(comma + 1);
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto row = parse_row(line, where());
    if (row.size() != n) {
      throw InvalidArgument(where() + ": expected " + std::to_string(n) + " values, got " + std::to_string(row.size()));
    }
    raw.rows.push_back(std::move(row));
  }
  return raw;
}

ScalarField block(const RawCsv& raw, std::size_t first) {
  std::vector<double> v;
  v.reserve(raw.n * raw.n);
  for (std::size_t j = 0; j < raw.n; ++j) v.insert(v.end(), raw.rows[first + j].begin(), raw.rows[first + j].end());
  return ScalarField(raw.n, std::move(v));
}

}  // namespace

void write_field_csv(const std::filesystem::path& path, const ScalarField& f, const std::string& v_preset) {
  auto os = open_out(path);
  os << "n,v-preset\n" << f.n() << ',' << v_preset << '\n';
  write_block(os, f);
}

void write_oneform_csv(const std::filesystem::path& path, const OneForm& f, const std::string& v_preset) {
  auto os = open_out(path);
  os << "n,v-preset\n" << f.n() << ',' << v_preset << '\n';
  write_block(os, f.c1);
  write_block(os, f.c2);
}

FieldFile read_field_csv(const std::filesystem::path& path) {
  const RawCsv raw = read_raw(path);
  if (raw.rows.size() != raw.n) {
    throw InvalidArgument(path.string() + ": expected " + std::to_string(raw.n) + " rows, got " +
                          std::to_string(raw.rows.size()));
  }
  return {raw.n, raw.preset, block(raw, 0)};
}

OneFormFile read_oneform_csv(const std::filesystem::path& path) {
  const RawCsv raw = read_raw(path);
  if (raw.rows.size() != 2 * raw.n) {
    throw InvalidArgument(path.string() + ": expected " + std::to_string(2 * raw.n) + " rows, got " +
                          std::to_string(raw.rows.size()));
  }
  return {raw.n, raw.preset, OneForm(block(raw, 0), block(raw, raw.n))};
}

Json field_descriptor(const ScalarField& f, const std::string& v_preset, const std::string& csv_name) {
  const auto vals = f.values();
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  double sum = 0.0;
  for (double x : vals) sum += x;
  Json j;
  j["kind"] = "scalar";
  j["n"] = f.n();
  j["v_preset"] = v_preset;
  j["csv"] = csv_name;
  j["min"] = *lo;
  j["max"] = *hi;
  j["mean"] = sum / static_cast<double>(vals.size());
  return j;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

std::map<std::string, std::string> version_info() {
  std::ostringstream eigen, boost;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  boost << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.' << BOOST_VERSION % 100;
  return {{"torusmf", TORUSMF_VERSION},
          {"fftw", fftw_version},
          {"eigen", eigen.str()},
          {"boost", boost.str()},
          {"compiler", __VERSION__}};
}

}  // namespace torusmf
