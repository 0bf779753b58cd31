#pragma once

// Run configuration shared by the command-line front end: parsing from a
// JSON file or a key = value file, canonical serialization and hashing, and
// construction of the problem instance it describes.

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "torusmf/errors.hpp"
#include "torusmf/functional.hpp"
#include "torusmf/green.hpp"
#include "torusmf/io.hpp"

namespace torusmf {

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct RunConfig {
  std::size_t n = 128;
  std::string v_preset = "zero";
  std::string connection = "zero";
  std::string h = "one";
  double rho = 4.0 * std::numbers::pi;
  std::uint64_t seed = 1;
  std::string out = "out";

  double tol = 1e-10;
  int max_iter = 50000;
  bool precondition = true;
  bool newton_polish = true;
  // "random" (smooth, seeded), "zero" or "file:<path>"
  std::string init = "random";
  double init_amplitude = 1.0;

  int sweep_kmax = 64;

  // Pole; negative entries mean the centre node.
  long p_i = -1;
  long p_j = -1;
  std::string backend = "spectral";
  std::string cutoff = "smooth";
  double r0 = 0.125;
  double solvability_tol = 1e-8;
  std::size_t stride = 8;
  unsigned threads = 0;

  double alpha = 4.1 * std::numbers::pi;
  int moser_kmin = 4;
  int moser_kmax = 1024;
  double delta = 0.125;

  std::vector<int> qk_k = {8, 16, 32, 64};

  int reduce_samples = 20;
};

// Dotted keys ("grid.n", "solver.tol", ...) with their defaults, for --help.
std::vector<std::pair<std::string, std::string>> config_keys();

// Sets one key; `value` is JSON when it parses as JSON, else a bare string.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
void apply_setting(RunConfig& cfg, const std::string& key, const Json& value);

// JSON when the first non-blank character is '{', otherwise key = value
// lines with optional [section] headers and '#' comments. Errors carry the
// line number.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");

Json to_json(const RunConfig& cfg);
// FNV-1a over the canonical JSON without "out", as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

TorusGrid grid_from_config(const RunConfig& cfg);
ProblemSpec problem_from_config(const RunConfig& cfg);
MinimizeOptions minimize_options(const RunConfig& cfg);
GreenOptions green_options(const RunConfig& cfg);
Node pole_from_config(const RunConfig& cfg);
ScalarField initial_field(const RunConfig& cfg, const ProblemSpec& spec);

}  // namespace torusmf
