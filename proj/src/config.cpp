#include "zsres/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace zsres {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
    if (!known) throw ConfigError(join(path, it.key()) + ": unknown key");
  }
}

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + ": expected a number");
  return v.get<double>();
}

double number(const json& obj, const std::string& path, const char* key, double fallback) {
  return obj.contains(key) ? as_number(obj.at(key), join(path, key)) : fallback;
}

double positive(const json& obj, const std::string& path, const char* key, double fallback) {
  const double v = number(obj, path, key, fallback);
  if (!(v > 0.0)) throw ConfigError(join(path, key) + ": must be positive");
  return v;
}

int integer(const json& obj, const std::string& path, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key) + ": expected an integer");
  return v.get<int>();
}

Complex as_complex(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(key + ": expected a number or [re, im]");
}

std::vector<double> number_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError(key + ": expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::string> string_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError(key + ": expected a list of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw ConfigError(key + "[" + std::to_string(i) + "]: expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

// Rethrows the factory's own argument errors under the key that produced them.
template <class F>
Potential build(const std::string& key, F&& make) {
  try {
    return make();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

Potential parse_potential(const json& obj, const std::filesystem::path& base_dir) {
  const std::string path = "potential";
  check_keys(obj, path, {"type", "gamma", "value", "pieces", "samples_file", "samples"});
  if (!obj.contains("type") || !obj.at("type").is_string()) throw ConfigError("potential.type: expected a string");
  const std::string type = obj.at("type").get<std::string>();
  if (type == "box") {
    if (!obj.contains("value")) throw ConfigError("potential.value: required for a box");
    const Complex c = as_complex(obj.at("value"), "potential.value");
    const double gamma = positive(obj, path, "gamma", 1.0);
    return build("potential.value", [&] { return make_box(c, gamma); });
  }
  if (type == "multibox") {
    if (!obj.contains("pieces") || !obj.at("pieces").is_array()) throw ConfigError("potential.pieces: expected a list");
    std::vector<std::pair<double, Complex>> pieces;
    const json& list = obj.at("pieces");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string key = "potential.pieces[" + std::to_string(i) + "]";
      check_keys(list[i], key, {"length", "value"});
      if (!list[i].contains("value")) throw ConfigError(key + ".value: required");
      pieces.emplace_back(positive(list[i], key, "length", -1.0), as_complex(list[i].at("value"), key + ".value"));
    }
    return build("potential.pieces", [&] { return make_multibox(pieces); });
  }
  if (type == "sampled") {
    std::optional<double> gamma;
    if (obj.contains("gamma")) gamma = positive(obj, path, "gamma", 1.0);
    if (obj.contains("samples")) {
      if (!gamma) throw ConfigError("potential.gamma: required with inline samples");
      const json& list = obj.at("samples");
      if (!list.is_array()) throw ConfigError("potential.samples: expected a list");
      std::vector<Complex> s;
      for (std::size_t i = 0; i < list.size(); ++i)
        s.push_back(as_complex(list[i], "potential.samples[" + std::to_string(i) + "]"));
      return build("potential.samples", [&] { return make_sampled(s, *gamma); });
    }
    if (!obj.contains("samples_file") || !obj.at("samples_file").is_string())
      throw ConfigError("potential.samples_file: expected a path");
    std::filesystem::path file = obj.at("samples_file").get<std::string>();
    if (file.is_relative()) file = base_dir / file;
    if (!std::filesystem::exists(file)) throw ConfigError("potential.samples_file: no such file '" + file.string() + "'");
    return load_samples_csv(file, gamma);
  }
  if (type == "zero") return make_zero(positive(obj, path, "gamma", 1.0));
  throw ConfigError("potential.type: unknown type '" + type + "'");
}

std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

bool RunConfig::writes(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

Potential load_samples_csv(const std::filesystem::path& path, std::optional<double> gamma) {
  std::ifstream in(path);
  if (!in) throw ConfigError("potential.samples_file: cannot open '" + path.string() + "'");
  std::vector<double> xs;
  std::vector<Complex> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double x, re, im;
    if (!(fields >> x >> re >> im)) {
      if (xs.empty() && line_no == 1) continue;  // header
      throw ConfigError("potential.samples_file: line " + std::to_string(line_no) + " is not x,re,im");
    }
    xs.push_back(x);
    values.emplace_back(re, im);
  }
  if (xs.size() < 2) throw ConfigError("potential.samples_file: need at least two samples");
  if (std::abs(xs.front()) > 1e-12) throw ConfigError("potential.samples_file: grid must start at x = 0");
  const double step = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  if (!(step > 0.0)) throw ConfigError("potential.samples_file: x must increase");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (std::abs(xs[i] - xs[i - 1] - step) > 1e-6 * step)
      throw ConfigError("potential.samples_file: grid is not uniform near x = " + std::to_string(xs[i]));
  const double end = xs.back();
  if (gamma && std::abs(*gamma - end) > 1e-9 * std::max(1.0, end))
    throw ConfigError("potential.gamma: does not match the last sample position");
  return build("potential.samples_file", [&] { return make_sampled(values, end); });
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config syntax error at " + position(text, e.byte));
  }
  check_keys(root, "", {"potential", "resonances", "verify", "scattering", "determinant", "output", "threads"});
  RunConfig cfg;
  if (!root.contains("potential")) throw ConfigError("potential: required");
  cfg.potential = parse_potential(root.at("potential"), base_dir);

  if (root.contains("resonances")) {
    const json& r = root.at("resonances");
    const std::string path = "resonances";
    check_keys(r, path, {"re_max", "depth", "depth_offset", "tol", "radii"});
    auto& s = cfg.resonances;
    s.re_max = positive(r, path, "re_max", s.re_max);
    if (r.contains("depth") && !(r.at("depth").is_string() && r.at("depth").get<std::string>() == "auto"))
      s.depth = positive(r, path, "depth", 1.0);
    s.depth_offset = number(r, path, "depth_offset", s.depth_offset);
    s.tol = positive(r, path, "tol", s.tol);
    if (r.contains("radii")) {
      s.radii = number_list(r.at("radii"), "resonances.radii");
      for (double v : s.radii)
        if (!(v > 0.0)) throw ConfigError("resonances.radii: entries must be positive");
    }
  }

  if (root.contains("verify")) {
    const json& v = root.at("verify");
    const std::string path = "verify";
    check_keys(v, path, {"identities", "tolerances", "radius", "depth", "q0_window"});
    auto& s = cfg.verify;
    if (v.contains("identities")) s.identities = string_list(v.at("identities"), "verify.identities");
    if (v.contains("tolerances")) {
      const json& t = v.at("tolerances");
      if (!t.is_object()) throw ConfigError("verify.tolerances: expected an object");
      for (auto it = t.begin(); it != t.end(); ++it)
        s.tolerances[it.key()] = as_number(it.value(), "verify.tolerances." + it.key());
    }
    s.radius = positive(v, path, "radius", s.radius);
    if (v.contains("depth") && !(v.at("depth").is_string() && v.at("depth").get<std::string>() == "auto"))
      s.depth = positive(v, path, "depth", 1.0);
    s.q0_window = positive(v, path, "q0_window", s.q0_window);
  }

  if (root.contains("scattering")) {
    const json& v = root.at("scattering");
    const std::string path = "scattering";
    check_keys(v, path, {"lambda_min", "lambda_max", "n_points"});
    auto& s = cfg.scattering;
    s.lambda_min = number(v, path, "lambda_min", s.lambda_min);
    s.lambda_max = number(v, path, "lambda_max", s.lambda_max);
    s.n_points = integer(v, path, "n_points", s.n_points);
    if (!(s.lambda_max > s.lambda_min)) throw ConfigError("scattering.lambda_max: must exceed lambda_min");
    if (s.n_points < 2) throw ConfigError("scattering.n_points: need at least 2");
  }

  if (root.contains("determinant")) {
    const json& v = root.at("determinant");
    const std::string path = "determinant";
    check_keys(v, path, {"lambdas", "N", "M"});
    auto& s = cfg.determinant;
    if (v.contains("lambdas")) {
      const json& l = v.at("lambdas");
      if (!l.is_array()) throw ConfigError("determinant.lambdas: expected a list");
      for (std::size_t i = 0; i < l.size(); ++i) {
        const std::string key = "determinant.lambdas[" + std::to_string(i) + "]";
        const Complex z = as_complex(l[i], key);
        if (!(z.imag() > 0.0)) throw ConfigError(key + ": must lie in the upper half-plane");
        s.lambdas.push_back(z);
      }
    }
    if (v.contains("N") && !(v.at("N").is_string() && v.at("N").get<std::string>() == "auto")) {
      s.terms = integer(v, path, "N", 1);
      if (s.terms < 1) throw ConfigError("determinant.N: must be at least 1");
    }
    s.m = integer(v, path, "M", s.m);
    if (s.m < 16) throw ConfigError("determinant.M: must be at least 16");
  }

  if (root.contains("output")) {
    const json& o = root.at("output");
    check_keys(o, "output", {"dir", "formats"});
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) throw ConfigError("output.dir: expected a path");
      cfg.output_dir = o.at("dir").get<std::string>();
    }
    if (o.contains("formats")) {
      cfg.formats = string_list(o.at("formats"), "output.formats");
      for (const auto& f : cfg.formats)
        if (f != "csv" && f != "json") throw ConfigError("output.formats: unknown format '" + f + "'");
    }
  }

  if (root.contains("threads")) {
    cfg.threads = integer(root, "", "threads", 1);
    if (cfg.threads < 0) throw ConfigError("threads: must be nonnegative");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

void apply_environment(RunConfig& config) {
  if (const char* dir = std::getenv("ZS_OUTPUT_DIR"); dir && *dir) config.output_dir = dir;
  if (const char* t = std::getenv("ZS_THREADS"); t && *t) {
    char* end = nullptr;
    const long n = std::strtol(t, &end, 10);
    if (*end != '\0' || n < 0) throw ConfigError("ZS_THREADS: expected a nonnegative integer");
    config.threads = static_cast<int>(n);
  }
}

}  // namespace zsres
