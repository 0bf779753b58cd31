#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "support.hpp"
#include "torusmf/config.hpp"
#include "torusmf/io.hpp"

using namespace torusmf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "torusmf-test-io";
  fs::create_directories(d);
  return d / name;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream os(p);
  os << s;
}

std::string error_of(auto&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("field CSV round trip is exact") {
  const auto f = smooth_random_field(16, 5, 4, 3.0);
  write_field_csv(scratch("f.csv"), f, "cos-x");
  const auto back = read_field_csv(scratch("f.csv"));
  CHECK(back.n == 16);
  CHECK(back.v_preset == "cos-x");
  CHECK(support::max_diff(back.field, f) == 0.0);

  const OneForm w(smooth_random_field(16, 6), smooth_random_field(16, 7));
  write_oneform_csv(scratch("w.csv"), w, "zero");
  const auto wb = read_oneform_csv(scratch("w.csv"));
  CHECK(support::max_diff(wb.form.c1, w.c1) == 0.0);
  CHECK(support::max_diff(wb.form.c2, w.c2) == 0.0);
  // a one-form file is not a scalar file
  CHECK_THROWS_AS(read_field_csv(scratch("w.csv")), InvalidArgument);
}

TEST_CASE("CSV errors carry the line") {
  write_text(scratch("bad.csv"), "n,v-preset\n2,zero\n1,2\n1,x\n");
  const auto msg = error_of([] { read_field_csv(scratch("bad.csv")); });
  CHECK(msg.find("bad.csv:4") != std::string::npos);
  write_text(scratch("short.csv"), "n,v-preset\n2,zero\n1,2\n1\n");
  CHECK(error_of([] { read_field_csv(scratch("short.csv")); }).find("short.csv:4") != std::string::npos);
  write_text(scratch("hdr.csv"), "n;v\n");
  CHECK(error_of([] { read_field_csv(scratch("hdr.csv")); }).find("hdr.csv:1") != std::string::npos);
}

TEST_CASE("descriptor and versions") {
  ScalarField f(16, 2.0);
  f(3, 4) = -1.0;
  const auto d = field_descriptor(f, "zero", "u.csv");
  CHECK(d["min"].get<double>() == -1.0);
  CHECK(d["max"].get<double>() == 2.0);
  const auto v = version_info();
  CHECK(v.count("fftw") == 1);
  CHECK(v.count("eigen") == 1);
}

TEST_CASE("key = value and JSON configs agree") {
  const auto kv = parse_config(
      "# run\nrho = 7.9pi\n[grid]\nn = 64\nv_preset = cos-x\n[green]\np = 3,5\n[qk]\nk = 8,16\n");
  const auto js = parse_config(
      R"({"rho": "7.9pi", "grid": {"n": 64, "v_preset": "cos-x"}, "green": {"p": [3, 5]}, "qk": {"k": [8, 16]}})");
  CHECK(kv.rho == doctest::Approx(7.9 * support::pi).epsilon(1e-15));
  CHECK(kv.n == 64);
  CHECK(kv.p_i == 3);
  CHECK(kv.p_j == 5);
  CHECK(kv.qk_k == std::vector<int>{8, 16});
  CHECK(to_json(kv) == to_json(js));
  CHECK(config_hash(kv) == config_hash(js));
  CHECK(config_hash(kv).size() == 16);

  RunConfig other = kv;
  apply_setting(other, "seed", std::string("2"));
  CHECK(config_hash(other) != config_hash(kv));
  CHECK(config_keys().size() >= 20);
}

TEST_CASE("config errors") {
  CHECK(error_of([] { parse_config("n = 64\n", "c.ini"); }).find("c.ini:1") != std::string::npos);
  CHECK(error_of([] { parse_config("[grid]\nn = 64\nrho = abc\n", "c.ini"); }).find("c.ini:3") != std::string::npos);
  CHECK(error_of([] { parse_config("rho 3\n", "c.ini"); }).find("c.ini:1") != std::string::npos);
  CHECK(error_of([] { parse_config("{\n\"rho\": ,\n}", "c.json"); }).find("c.json:2") != std::string::npos);
  CHECK_THROWS_AS(parse_config("solver.max_iter = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("solver.precondition = maybe\n"), ConfigError);
  RunConfig c;
  c.n = 48;
  CHECK_THROWS_AS(grid_from_config(c), InvalidArgument);
  c = RunConfig{};
  c.backend = "fem";
  CHECK_THROWS_AS(green_options(c), InvalidArgument);
}

TEST_CASE("file presets feed the problem") {
  RunConfig c;
  c.n = 16;
  ScalarField v(16);
  for (std::size_t j = 0; j < 16; ++j)
    for (std::size_t i = 0; i < 16; ++i) v(i, j) = 0.1 * std::sin(2 * support::pi * j / 16.0);
  write_field_csv(scratch("v.csv"), v, "custom-file");
  c.v_preset = "file:" + scratch("v.csv").string();
  const auto grid = grid_from_config(c);
  CHECK(support::max_diff(grid.v(), v) == 0.0);
  CHECK(grid.v_preset() == "custom-file");

  c.init = "zero";
  const auto spec = problem_from_config(c);
  CHECK(support::max_abs(initial_field(c, spec)) == 0.0);
  c.init = "random";
  const auto u = initial_field(c, spec);
  CHECK(std::abs(l2_inner(u, *spec.kb.tau1, spec.grid)) <= 1e-12);
  CHECK(support::max_diff(u, initial_field(c, spec)) == 0.0);
  c.p_i = 16;
  CHECK_THROWS_AS(pole_from_config(c), InvalidArgument);
}
