#include "torusmf/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "torusmf/bundle.hpp"
#include "torusmf/random.hpp"

namespace torusmf {

namespace {

double as_real(const Json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    // "4.1pi" style values
    std::string s = v.get<std::string>();
    double scale = 1.0;
    if (s.size() > 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
      scale = std::numbers::pi;
      s.resize(s.size() - 2);
    }
    try {
      std::size_t used = 0;
      const double x = std::stod(s, &used);
      if (used == s.size()) return x * scale;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(key + ": expected a number");
}

long as_integer(const Json& v, const std::string& key) {
  const double x = as_real(v, key);
  if (x != std::floor(x) || std::abs(x) > 9.0e15) throw ConfigError(key + ": expected an integer");
  return static_cast<long>(x);
}

long as_count(const Json& v, const std::string& key) {
  const long x = as_integer(v, key);
  if (x < 0) throw ConfigError(key + ": expected a non-negative integer");
  return x;
}

bool as_bool(const Json& v, const std::string& key) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "true" || s == "on" || s == "yes") return true;
    if (s == "false" || s == "off" || s == "no") return false;
  }
  throw ConfigError(key + ": expected true or false");
}

std::string as_string(const Json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw ConfigError(key + ": expected a string");
}

std::pair<long, long> as_pair(const Json& v, const std::string& key) {
  if (v.is_array() && v.size() == 2) return {as_integer(v[0], key), as_integer(v[1], key)};
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    const auto comma = s.find(',');
    if (comma != std::string::npos) {
      return {as_integer(Json(s.substr(0, comma)), key), as_integer(Json(s.substr(comma + 1)), key)};
    }
  }
  throw ConfigError(key + ": expected i,j");
}

std::vector<int> as_int_list(const Json& v, const std::string& key) {
  std::vector<int> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(static_cast<int>(as_integer(x, key)));
  } else if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(as_integer(Json(item), key)));
  } else {
    out.push_back(static_cast<int>(as_integer(v, key)));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

struct Entry {
  std::function<void(RunConfig&, const Json&, const std::string&)> set;
  std::function<Json(const RunConfig&)> get;
};

const std::vector<std::pair<std::string, Entry>>& table() {
  static const std::vector<std::pair<std::string, Entry>> t = {
      {"grid.n", {[](RunConfig& c, const Json& v, const std::string& k) { c.n = static_cast<std::size_t>(as_count(v, k)); },
                  [](const RunConfig& c) { return Json(c.n); }}},
      {"grid.v_preset", {[](RunConfig& c, const Json& v, const std::string& k) { c.v_preset = as_string(v, k); },
                         [](const RunConfig& c) { return Json(c.v_preset); }}},
      {"connection", {[](RunConfig& c, const Json& v, const std::string& k) { c.connection = as_string(v, k); },
                      [](const RunConfig& c) { return Json(c.connection); }}},
      {"h", {[](RunConfig& c, const Json& v, const std::string& k) { c.h = as_string(v, k); },
             [](const RunConfig& c) { return Json(c.h); }}},
      {"rho", {[](RunConfig& c, const Json& v, const std::string& k) { c.rho = as_real(v, k); },
               [](const RunConfig& c) { return Json(c.rho); }}},
      {"seed", {[](RunConfig& c, const Json& v, const std::string& k) { c.seed = static_cast<std::uint64_t>(as_count(v, k)); },
                [](const RunConfig& c) { return Json(c.seed); }}},
      {"out", {[](RunConfig& c, const Json& v, const std::string& k) { c.out = as_string(v, k); },
               [](const RunConfig& c) { return Json(c.out); }}},
      {"solver.tol", {[](RunConfig& c, const Json& v, const std::string& k) { c.tol = as_real(v, k); },
                      [](const RunConfig& c) { return Json(c.tol); }}},
      {"solver.max_iter", {[](RunConfig& c, const Json& v, const std::string& k) { c.max_iter = static_cast<int>(as_count(v, k)); },
                           [](const RunConfig& c) { return Json(c.max_iter); }}},
      {"solver.precondition", {[](RunConfig& c, const Json& v, const std::string& k) { c.precondition = as_bool(v, k); },
                               [](const RunConfig& c) { return Json(c.precondition); }}},
      {"solver.newton_polish", {[](RunConfig& c, const Json& v, const std::string& k) { c.newton_polish = as_bool(v, k); },
                                [](const RunConfig& c) { return Json(c.newton_polish); }}},
      {"init", {[](RunConfig& c, const Json& v, const std::string& k) { c.init = as_string(v, k); },
                [](const RunConfig& c) { return Json(c.init); }}},
      {"init_amplitude", {[](RunConfig& c, const Json& v, const std::string& k) { c.init_amplitude = as_real(v, k); },
                          [](const RunConfig& c) { return Json(c.init_amplitude); }}},
      {"sweep.kmax", {[](RunConfig& c, const Json& v, const std::string& k) { c.sweep_kmax = static_cast<int>(as_count(v, k)); },
                      [](const RunConfig& c) { return Json(c.sweep_kmax); }}},
      {"green.p", {[](RunConfig& c, const Json& v, const std::string& k) { std::tie(c.p_i, c.p_j) = as_pair(v, k); },
                   [](const RunConfig& c) { return Json::array({c.p_i, c.p_j}); }}},
      {"green.backend", {[](RunConfig& c, const Json& v, const std::string& k) { c.backend = as_string(v, k); },
                         [](const RunConfig& c) { return Json(c.backend); }}},
      {"green.cutoff", {[](RunConfig& c, const Json& v, const std::string& k) { c.cutoff = as_string(v, k); },
                        [](const RunConfig& c) { return Json(c.cutoff); }}},
      {"green.r0", {[](RunConfig& c, const Json& v, const std::string& k) { c.r0 = as_real(v, k); },
                    [](const RunConfig& c) { return Json(c.r0); }}},
      {"green.solvability_tol", {[](RunConfig& c, const Json& v, const std::string& k) { c.solvability_tol = as_real(v, k); },
                                 [](const RunConfig& c) { return Json(c.solvability_tol); }}},
      {"critmap.stride", {[](RunConfig& c, const Json& v, const std::string& k) { c.stride = static_cast<std::size_t>(as_count(v, k)); },
                          [](const RunConfig& c) { return Json(c.stride); }}},
      {"threads", {[](RunConfig& c, const Json& v, const std::string& k) { c.threads = static_cast<unsigned>(as_count(v, k)); },
                   [](const RunConfig& c) { return Json(c.threads); }}},
      {"moser.alpha", {[](RunConfig& c, const Json& v, const std::string& k) { c.alpha = as_real(v, k); },
                       [](const RunConfig& c) { return Json(c.alpha); }}},
      {"moser.kmin", {[](RunConfig& c, const Json& v, const std::string& k) { c.moser_kmin = static_cast<int>(as_count(v, k)); },
                      [](const RunConfig& c) { return Json(c.moser_kmin); }}},
      {"moser.kmax", {[](RunConfig& c, const Json& v, const std::string& k) { c.moser_kmax = static_cast<int>(as_count(v, k)); },
                      [](const RunConfig& c) { return Json(c.moser_kmax); }}},
      {"moser.delta", {[](RunConfig& c, const Json& v, const std::string& k) { c.delta = as_real(v, k); },
                       [](const RunConfig& c) { return Json(c.delta); }}},
      {"qk.k", {[](RunConfig& c, const Json& v, const std::string& k) { c.qk_k = as_int_list(v, k); },
                [](const RunConfig& c) { return Json(c.qk_k); }}},
      {"reduce.samples", {[](RunConfig& c, const Json& v, const std::string& k) { c.reduce_samples = static_cast<int>(as_count(v, k)); },
                          [](const RunConfig& c) { return Json(c.reduce_samples); }}},
  };
  return t;
}

const Entry* find_entry(const std::string& key) {
  for (const auto& [name, e] : table()) {
    if (name == key) return &e;
  }
  return nullptr;
}

void apply_object(RunConfig& cfg, const Json& obj, const std::string& prefix) {
  for (const auto& [k, v] : obj.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) {
      apply_object(cfg, v, key);
    } else {
      apply_setting(cfg, key, v);
    }
  }
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> config_keys() {
  const RunConfig def;
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, e] : table()) out.emplace_back(name, e.get(def).dump());
  return out;
}

void apply_setting(RunConfig& cfg, const std::string& key, const Json& value) {
  const Entry* e = find_entry(key);
  if (!e) throw ConfigError("unknown key '" + key + "'");
  e->set(cfg, value, key);
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  Json v = Json::parse(value, nullptr, false);
  if (v.is_discarded()) v = value;
  apply_setting(cfg, key, v);
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      // byte offset -> line
      const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
      const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
      throw ConfigError(origin + ":" + std::to_string(line) + ": " + e.what());
    }
    try {
      apply_object(cfg, j, "");
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
  }
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (!section.empty()) key = section + "." + key;
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string());
}

Json to_json(const RunConfig& cfg) {
  Json j = Json::object();
  for (const auto& [name, e] : table()) j[name] = e.get(cfg);
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  Json j = to_json(cfg);
  j.erase("out");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TorusGrid grid_from_config(const RunConfig& cfg) {
  if (cfg.v_preset.rfind("file:", 0) == 0) {
    FieldFile f = read_field_csv(cfg.v_preset.substr(5));
    if (f.n != cfg.n) throw InvalidArgument("v file has n = " + std::to_string(f.n) + ", config has " + std::to_string(cfg.n));
    if (cfg.n < 16 || (cfg.n & (cfg.n - 1)) != 0) throw InvalidArgument("grid.n must be a power of two >= 16");
    return build_grid(cfg.n, std::move(f.field), "custom-file");
  }
  if (cfg.v_preset == "custom-file") throw InvalidArgument("v preset custom-file needs a path: use file:<path>");
  return build_grid(cfg.n, cfg.v_preset);
}

ProblemSpec problem_from_config(const RunConfig& cfg) {
  TorusGrid grid = grid_from_config(cfg);
  Connection conn;
  if (cfg.connection.rfind("file:", 0) == 0) {
    OneFormFile f = read_oneform_csv(cfg.connection.substr(5));
    if (f.n != cfg.n) throw InvalidArgument("connection file has the wrong n");
    conn = make_connection(std::move(f.form), grid, cfg.connection);
  } else {
    conn = connection_preset(cfg.connection, grid);
  }
  ScalarField h;
  if (cfg.h.rfind("file:", 0) == 0) {
    FieldFile f = read_field_csv(cfg.h.substr(5));
    if (f.n != cfg.n) throw InvalidArgument("h file has the wrong n");
    h = std::move(f.field);
  } else {
    h = h_preset_field(grid, cfg.h);
  }
  return make_problem(std::move(grid), std::move(conn), std::move(h), cfg.rho, cfg.h);
}

MinimizeOptions minimize_options(const RunConfig& cfg) {
  MinimizeOptions o;
  o.tol_factor = cfg.tol;
  o.max_iter = cfg.max_iter;
  o.precondition = cfg.precondition;
  o.newton_polish = cfg.newton_polish;
  return o;
}

GreenOptions green_options(const RunConfig& cfg) {
  GreenOptions o;
  if (cfg.backend == "spectral") {
    o.backend = Backend::Spectral;
  } else if (cfg.backend == "fd" || cfg.backend == "finite-difference") {
    o.backend = Backend::FiniteDifference;
  } else {
    throw InvalidArgument("unknown backend '" + cfg.backend + "'");
  }
  if (cfg.cutoff == "smooth") {
    o.cutoff = Cutoff::Smooth;
  } else if (cfg.cutoff == "quintic") {
    o.cutoff = Cutoff::Quintic;
  } else {
    throw InvalidArgument("unknown cutoff '" + cfg.cutoff + "'");
  }
  o.r0 = cfg.r0;
  o.solvability_tol = cfg.solvability_tol;
  return o;
}

Node pole_from_config(const RunConfig& cfg) {
  const long n = static_cast<long>(cfg.n);
  const long i = cfg.p_i < 0 ? n / 2 : cfg.p_i;
  const long j = cfg.p_j < 0 ? n / 2 : cfg.p_j;
  if (i >= n || j >= n) throw InvalidArgument("pole lies off the grid");
  return {static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
}

ScalarField initial_field(const RunConfig& cfg, const ProblemSpec& spec) {
  ScalarField u;
  if (cfg.init == "zero") {
    u = ScalarField(cfg.n);
  } else if (cfg.init == "random") {
    u = smooth_random_field(cfg.n, cfg.seed, 4, cfg.init_amplitude);
  } else if (cfg.init.rfind("file:", 0) == 0) {
    FieldFile f = read_field_csv(cfg.init.substr(5));
    if (f.n != cfg.n) throw InvalidArgument("init file has the wrong n");
    u = std::move(f.field);
  } else {
    throw InvalidArgument("unknown init '" + cfg.init + "'");
  }
  return project_h1(u, spec.kb, spec.grid);
}

}  // namespace torusmf
