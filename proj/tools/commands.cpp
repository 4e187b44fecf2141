#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <limits>

#include "cli.hpp"

namespace rwn::cli {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kVersion = "0.1.0";

double or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }
long long flag(bool b) { return b ? 1 : 0; }

// Fills t.rows[i] through fn(i) on the worker pool. Numerical failures mark the
// row; domain errors mean the configuration does not suit the command.
void fill_rows(Table& t, std::size_t n, int jobs, const std::function<std::vector<Cell>(std::size_t)>& fn) {
  t.rows.assign(n, {});
  std::vector<char> ok(n, 1);
  parallel_for(n, jobs, [&](std::size_t i) {
    try {
      t.rows[i] = fn(i);
    } catch (const DomainError&) {
      throw;
    } catch (const Error&) {
      ok[i] = 0;
    }
  });
  t.ok.assign(ok.begin(), ok.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (!t.ok[i]) t.rows[i] = std::vector<Cell>(t.columns.size(), Cell(kNaN));
  }
}

Table classify(const RunConfig& c) {
  const auto st = c.spacetime();
  Table t;
  t.columns = {"sector", "Z", "A", "mu", "r_minus", "r_plus", "r0", "q", "kappa", "rho", "hyper_heavy"};
  const bool bh = st.is_black_hole();
  t.rows.push_back({std::string(to_string(st.sector)), (long long)st.nucleus.Z, st.nucleus.A, st.mu,
                    or_nan(st.r_minus), or_nan(st.r_plus), or_nan(st.r0()), or_nan(st.q), or_nan(st.kappa),
                    bh ? st.rho() : kNaN, flag(hyper_heavy(st.nucleus, st.constants))});
  t.ok = {true};
  t.summary = {{"sector", to_string(st.sector)}};
  return t;
}

Table sample_coordinates(const RunConfig& c, bool coefficients, int jobs) {
  const auto mode = c.mode();
  const RadialOperator op(mode);
  const auto& map = op.map();
  const auto& g = coefficients ? c.coeffs : c.coords;
  const auto xs = numerics::log_grid(g.x_min, g.x_max, g.n);
  Table t;
  if (coefficients) {
    t.columns = {"x", "a", "b", "c", "d", "kappa_tilde", "mass_term"};
  } else {
    t.columns = {"x", "r", "gap", "f", "t"};
  }
  fill_rows(t, xs.size(), jobs, [&](std::size_t i) -> std::vector<Cell> {
    const double x = xs[i];
    if (coefficients) {
      const auto s = op.coefficients(x);
      return {x, s.a, s.b, s.c, s.d, op.kappa_tilde(s), op.mass() * s.a};
    }
    const auto p = map.locate(x);
    return {x, p.r, p.gap, map.f(p), map.chart_of_x(x)};
  });
  t.summary = {{"r_star", map.r_star()}, {"length_unit", map.length_unit()}, {"kappa_hat", map.kappa_hat()}};
  return t;
}

Table endpoints(const RunConfig& c) {
  const auto mode = c.mode();
  const auto closed = classify_zero_endpoint(mode);
  const auto d = deficiency_indices(mode);
  Table t;
  t.columns = {"endpoint",     "classification", "exponent_p",     "l2_recessive",
               "l2_dominant", "slope_recessive", "slope_dominant"};
  for (const auto* r : {&d.zero, &d.infinity}) {
    const auto slopes = r->mass_slopes.value_or(std::array<double, 2>{kNaN, kNaN});
    t.rows.push_back({std::string(to_string(r->endpoint)), std::string(to_string(r->classification)),
                      or_nan(r->exponent_p), flag(r->l2_verdicts[0]), flag(r->l2_verdicts[1]), slopes[0],
                      slopes[1]});
    t.ok.push_back(true);
  }
  t.summary = {{"n_plus", d.n_plus},
               {"n_minus", d.n_minus},
               {"zero_closed_form", to_string(closed.classification)},
               {"exponent_p", or_nan(closed.exponent_p)}};
  return t;
}

Table threshold(const RunConfig& c) {
  const auto st = c.spacetime();
  const auto rep = esa_threshold(st);
  Table t;
  t.columns = {"fa_crit", "p_of_fa", "fa", "p", "zero_classification"};
  const auto zero = classify_zero_endpoint(c.mode());
  t.rows.push_back({rep.fa_crit, rep.p_of_fa, c.fa, rep.p_of_fa * c.fa, std::string(to_string(zero.classification))});
  t.ok = {true};
  t.summary = {{"fa_crit", rep.fa_crit}};
  return t;
}

Table eigenscan(const RunConfig& c, int jobs) {
  const auto mode = c.mode();
  const auto grid = c.eigenscan.values.empty() ? default_lambda_grid(mode, c.eigenscan.n) : c.eigenscan.values;
  Table t;
  t.columns = {"lambda", "ratio_1", "ratio_2", "ratio_3", "mismatch", "l2_tail"};
  fill_rows(t, grid.size(), jobs, [&](std::size_t i) -> std::vector<Cell> {
    const double one[] = {grid[i]};
    const auto rep = eigen_scan(mode, one, 1);
    const auto& r = rep.ratios[0];
    return {grid[i], r[0], r[1], r[2], rep.mismatch[0], flag(!rep.roots.empty())};
  });
  json roots = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (t.ok[i] && std::get<long long>(t.rows[i][5]) == 1) roots.push_back(grid[i]);
  }
  t.summary = {{"roots_found", roots.size()}, {"roots", roots}, {"lambda_star", RadialOperator(mode).lambda_star()}};
  return t;
}

Table weyldemo(const RunConfig& c, int jobs) {
  const auto mode = c.mode();
  const auto& ns = c.weyldemo.n;
  Table t;
  t.columns = {"n", "norm", "residual_analytic", "residual"};
  fill_rows(t, ns.size(), jobs, [&](std::size_t i) -> std::vector<Cell> {
    const auto w = weyl_residual(mode, c.weyldemo.lambda, ns[i]);
    return {(long long)w.n, w.norm, w.analytic, w.quadrature};
  });
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (t.ok[i]) pts.emplace_back(ns[i], std::get<double>(t.rows[i][3]));
  }
  t.summary = {{"lambda", c.weyldemo.lambda}};
  t.summary["slope"] = pts.size() >= 3 ? json(numerics::fit_power_law(pts).slope) : json(nullptr);
  return t;
}

Table mfunc(const RunConfig& c, int jobs) {
  const auto mode = c.mode();
  const double b = RadialOperator(mode).b_limit();
  const auto grid = numerics::linear_grid(-5.0 * b, 5.0 * b, c.mfunc.n);
  const double im = c.mfunc.im_scale * b;
  Table t;
  t.columns = {"lambda", "im_z", "re_m", "im_m", "herglotz"};
  fill_rows(t, grid.size(), jobs, [&](std::size_t i) -> std::vector<Cell> {
    const Complex m = m_function(mode, Complex(grid[i], im));
    return {grid[i], im, m.real(), m.imag(), flag(m.imag() > 0.0)};
  });
  bool all = t.all_ok();
  for (std::size_t i = 0; i < grid.size(); ++i) all = all && t.ok[i] && std::get<long long>(t.rows[i][4]) == 1;
  t.summary = {{"herglotz_all", all}};
  return t;
}

Table candidate(const RunConfig& c) {
  const auto mode = c.mode();
  const auto ev = variation_limits(mode);
  Table t;
  t.columns = {"window_start", "window_ratio"};
  for (std::size_t i = 0; i < ev.window_starts.size(); ++i) {
    t.rows.push_back({ev.window_starts[i], ev.window_ratios[i]});
    t.ok.push_back(true);
  }
  t.summary = {{"lambda_star", ev.lambda_star},
               {"lambda_star_raw", candidate_eigenvalue(mode.spacetime, Rescale::None)},
               {"match_point", ev.match_point},
               {"verdict", to_string(ev.verdict)}};
  t.summary["conservation_drift"] = std::isnan(ev.conservation_drift) ? json(nullptr) : json(ev.conservation_drift);
  if (ev.uv_limits) {
    t.summary["uv_limits"] = {ev.uv_limits->first, ev.uv_limits->second};
  } else {
    t.summary["uv_limits"] = nullptr;
  }
  return t;
}

std::string format_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", *d);
    return buf;
  }
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

json cell_json(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return std::isfinite(*d) ? json(*d) : json(format_cell(cell));
  if (const auto* i = std::get_if<long long>(&cell)) return *i;
  return std::get<std::string>(cell);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

bool Table::all_ok() const {
  for (bool b : ok) {
    if (!b) return false;
  }
  return true;
}

Table run_command(const std::string& command, const RunConfig& config, int jobs) {
  try {
    if (command == "classify") return classify(config);
    if (command == "coords") return sample_coordinates(config, false, jobs);
    if (command == "coeffs") return sample_coordinates(config, true, jobs);
    if (command == "endpoints") return endpoints(config);
    if (command == "threshold") return threshold(config);
    if (command == "eigenscan") return eigenscan(config, jobs);
    if (command == "weyldemo") return weyldemo(config, jobs);
    if (command == "mfunc") return mfunc(config, jobs);
    if (command == "candidate") return candidate(config);
  } catch (const DomainError& e) {
    throw ConfigError(command + ": " + e.what());
  }
  throw ConfigError("unknown command '" + command + "'");
}

std::string to_csv(const Table& t) {
  std::string out;
  for (const auto& c : t.columns) out += c + ",";
  out += "status\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (const auto& cell : t.rows[i]) out += format_cell(cell) + ",";
    out += t.ok[i] ? "ok\n" : "failed\n";
  }
  return out;
}

json envelope(const std::string& command, const RunConfig& config, const Table& t, int jobs, bool include_rows) {
  json j;
  j["command"] = command;
  j["config"] = to_json(config);
  j["constants"] = to_json(config)["constants"];
  const auto st = config.spacetime();
  j["derived"] = {{"sector", to_string(st.sector)}, {"A", st.nucleus.A}};
  if (st.is_black_hole()) {
    j["derived"]["r_star"] = *st.r_star;
    j["derived"]["rho"] = st.rho();
    j["derived"]["kappa_hat"] = st.kappa_hat();
  }
  j["summary"] = t.summary;
  j["status"] = t.all_ok() ? "ok" : "failed";
  if (include_rows) {
    j["columns"] = t.columns;
    json rows = json::array();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      json row = json::object();
      for (std::size_t k = 0; k < t.columns.size(); ++k) row[t.columns[k]] = cell_json(t.rows[i][k]);
      row["status"] = t.ok[i] ? "ok" : "failed";
      rows.push_back(row);
    }
    j["rows"] = rows;
  }
  j["provenance"] = {
      {"version", kVersion},
      {"timestamp", utc_timestamp()},
      {"jobs", jobs},
      {"tolerances",
       {{"quadrature_rel_tol", 1e-10}, {"propagator_rel_tol", 1e-10}, {"mfunc_rel_tol", 1e-11}, {"uv_rel_tol", 1e-12}}},
  };
  return j;
}

}  // namespace rwn::cli
