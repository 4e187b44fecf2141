#include <cmath>
#include <numbers>
#include <set>

#include "cli.hpp"

namespace rwn::cli {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double real_of(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError("'" + key + "' must be finite");
  return v;
}

int int_of(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return j.get<int>();
}

LogGridSpec parse_log_grid(const json& j, const std::string& where) {
  check_keys(j, where, {"x_min", "x_max", "n"});
  LogGridSpec g;
  if (j.contains("x_min")) g.x_min = real_of(j["x_min"], "x_min");
  if (j.contains("x_max")) g.x_max = real_of(j["x_max"], "x_max");
  if (j.contains("n")) g.n = int_of(j["n"], "n");
  if (!(g.x_min > 0.0 && g.x_max > g.x_min)) throw ConfigError(where + ": need 0 < x_min < x_max");
  if (g.n < 2) throw ConfigError(where + ": n must be >= 2");
  return g;
}

json log_grid_json(const LogGridSpec& g) { return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"n", g.n}}; }

}  // namespace

Spacetime RunConfig::spacetime() const {
  const double a = A ? *A : extremal_mass_number(Z, constants);
  return build_spacetime({Z, a}, constants);
}

RadialMode RunConfig::mode() const {
  RadialMode m;
  m.spacetime = spacetime();
  m.k = k;
  m.fa = fa;
  m.theta = theta;
  m.rescale = rescale;
  return m;
}

RunConfig parse_config(const json& j) {
  check_keys(j, "config", {"Z", "A", "k", "fa", "theta", "rescale", "constants", "grids"});
  RunConfig c;
  if (j.contains("Z")) c.Z = int_of(j["Z"], "Z");
  if (c.Z < 1) throw ConfigError("'Z' must be >= 1");
  if (j.contains("A")) {
    const auto& a = j["A"];
    if (a.is_string()) {
      if (a.get<std::string>() != "extremal") throw ConfigError("'A' must be a number or \"extremal\"");
      c.A.reset();
    } else {
      c.A = real_of(a, "A");
      if (!(*c.A > 0.0)) throw ConfigError("'A' must be positive");
    }
  }
  if (j.contains("k")) c.k = int_of(j["k"], "k");
  if (c.k == 0) throw ConfigError("'k' must be nonzero");
  if (j.contains("fa")) c.fa = real_of(j["fa"], "fa");
  if (!(c.fa >= 0.0)) throw ConfigError("'fa' must be >= 0");
  if (j.contains("theta")) c.theta = real_of(j["theta"], "theta");
  if (!(c.theta >= 0.0 && c.theta < std::numbers::pi)) throw ConfigError("'theta' must lie in [0, pi)");
  if (j.contains("rescale")) {
    if (!j["rescale"].is_string()) throw ConfigError("'rescale' must be a string");
    const auto s = j["rescale"].get<std::string>();
    if (s == "inner_radius") {
      c.rescale = Rescale::ByInnerRadius;
    } else if (s == "none") {
      c.rescale = Rescale::None;
    } else {
      throw ConfigError("'rescale' must be \"inner_radius\" or \"none\"");
    }
  }
  if (j.contains("constants")) {
    const auto& k = j["constants"];
    check_keys(k, "constants", {"alpha_s", "eps_g", "mass_ratio"});
    if (k.contains("alpha_s")) c.constants.alpha_s = real_of(k["alpha_s"], "alpha_s");
    if (k.contains("eps_g")) c.constants.eps_g = real_of(k["eps_g"], "eps_g");
    if (k.contains("mass_ratio")) c.constants.mass_ratio = real_of(k["mass_ratio"], "mass_ratio");
    try {
      c.constants.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("constants: ") + e.what());
    }
  }
  if (j.contains("grids")) {
    const auto& g = j["grids"];
    check_keys(g, "grids", {"coords", "coeffs", "eigenscan", "weyldemo", "mfunc"});
    if (g.contains("coords")) c.coords = parse_log_grid(g["coords"], "grids.coords");
    if (g.contains("coeffs")) c.coeffs = parse_log_grid(g["coeffs"], "grids.coeffs");
    if (g.contains("eigenscan")) {
      const auto& e = g["eigenscan"];
      check_keys(e, "grids.eigenscan", {"n", "values"});
      if (e.contains("n")) c.eigenscan.n = int_of(e["n"], "n");
      if (c.eigenscan.n < 2) throw ConfigError("grids.eigenscan: n must be >= 2");
      if (e.contains("values")) {
        if (!e["values"].is_array()) throw ConfigError("grids.eigenscan: 'values' must be an array");
        for (const auto& v : e["values"]) c.eigenscan.values.push_back(real_of(v, "values"));
        for (std::size_t i = 1; i < c.eigenscan.values.size(); ++i) {
          if (!(c.eigenscan.values[i] > c.eigenscan.values[i - 1])) {
            throw ConfigError("grids.eigenscan: 'values' must be increasing");
          }
        }
      }
    }
    if (g.contains("weyldemo")) {
      const auto& w = g["weyldemo"];
      check_keys(w, "grids.weyldemo", {"n", "lambda"});
      if (w.contains("n")) {
        if (!w["n"].is_array() || w["n"].size() < 2) throw ConfigError("grids.weyldemo: 'n' must be an array of >= 2");
        c.weyldemo.n.clear();
        for (const auto& v : w["n"]) {
          c.weyldemo.n.push_back(int_of(v, "n"));
          if (c.weyldemo.n.back() < 1) throw ConfigError("grids.weyldemo: n must be >= 1");
        }
      }
      if (w.contains("lambda")) c.weyldemo.lambda = real_of(w["lambda"], "lambda");
    }
    if (g.contains("mfunc")) {
      const auto& m = g["mfunc"];
      check_keys(m, "grids.mfunc", {"n", "im_scale"});
      if (m.contains("n")) c.mfunc.n = int_of(m["n"], "n");
      if (m.contains("im_scale")) c.mfunc.im_scale = real_of(m["im_scale"], "im_scale");
      if (c.mfunc.n < 2) throw ConfigError("grids.mfunc: n must be >= 2");
      if (!(c.mfunc.im_scale > 0.0)) throw ConfigError("grids.mfunc: im_scale must be positive");
    }
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["Z"] = c.Z;
  if (c.A) {
    j["A"] = *c.A;
  } else {
    j["A"] = "extremal";
  }
  j["k"] = c.k;
  j["fa"] = c.fa;
  j["theta"] = c.theta;
  j["rescale"] = c.rescale == Rescale::ByInnerRadius ? "inner_radius" : "none";
  j["constants"] = {
      {"alpha_s", c.constants.alpha_s}, {"eps_g", c.constants.eps_g}, {"mass_ratio", c.constants.mass_ratio}};
  j["grids"] = {
      {"coords", log_grid_json(c.coords)},
      {"coeffs", log_grid_json(c.coeffs)},
      {"eigenscan", {{"n", c.eigenscan.n}, {"values", c.eigenscan.values}}},
      {"weyldemo", {{"n", c.weyldemo.n}, {"lambda", c.weyldemo.lambda}}},
      {"mfunc", {{"n", c.mfunc.n}, {"im_scale", c.mfunc.im_scale}}},
  };
  return j;
}

}  // namespace rwn::cli
