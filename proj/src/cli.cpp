// Copyright 2026 The habitcons Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "habitcons/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "habitcons/csv.hpp"
#include "habitcons/dual_solver.hpp"
#include "habitcons/error.hpp"
#include "habitcons/hump.hpp"
#include "habitcons/model.hpp"
#include "habitcons/oracle.hpp"
#include "habitcons/policy.hpp"
#include "habitcons/trajectory.hpp"

namespace habitcons::cli {

using nlohmann::json;

namespace {

class VerificationFailed : public Error {
 public:
  using Error::Error;
};

// A result table that can be written as CSV or as a JSON array of rows.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  std::string csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out += ',';
      out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        const json& cell = row[i];
        if (cell.is_number()) {
          out += format_number(cell.get<double>());
        } else if (cell.is_boolean()) {
          out += cell.get<bool>() ? "true" : "false";
        } else if (cell.is_string()) {
          out += cell.get<std::string>();
        }
      }
      out += '\n';
    }
    return out;
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& row : rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[columns[i]] = row[i];
      arr.push_back(std::move(obj));
    }
    return arr;
  }
};

json num_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct Context {
  json config;
  std::filesystem::path out_dir;
  std::string format;
  std::ostream& out;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
  if (!f) throw ConfigError("failed writing " + path.string());
}

void write_json(const Context& ctx, const std::string& name, const json& j) {
  write_file(ctx.out_dir / name, j.dump(2) + "\n");
}

void write_table(const Context& ctx, const std::string& stem, const Table& t) {
  if (ctx.format == "json") {
    write_file(ctx.out_dir / (stem + ".json"), t.to_json().dump(2) + "\n");
  } else {
    write_file(ctx.out_dir / (stem + ".csv"), t.csv());
  }
}

json section(const json& config, const char* name) {
  if (!config.contains(name)) return json::object();
  const json& s = config.at(name);
  if (!s.is_object()) throw ConfigError(std::string("'") + name + "' must be an object");
  return s;
}

double number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return obj.at(key).get<double>();
}

std::vector<double> numbers(const json& obj, const char* key) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  const json& a = obj.at(key);
  if (!a.is_array()) throw ConfigError(std::string("'") + key + "' must be an array of numbers");
  for (const json& v : a) {
    if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Parameters params_of(const json& config) {
  if (!config.contains("params")) throw ConfigError("config has no 'params' object");
  return parameters_from_json(config.at("params"));
}

InitialState init_of(const json& config) {
  if (!config.contains("init")) throw ConfigError("this command needs an 'init' object with w and z");
  const json& i = config.at("init");
  if (!i.is_object() || !i.contains("w") || !i.contains("z")) throw ConfigError("'init' needs w and z");
  InitialState s{number(i, "w", 0.0), number(i, "z", 0.0)};
  if (!(s.z > 0.0)) throw ConfigError("init.z must be positive");
  return s;
}

// Base params with selected fields replaced. A "delta" override replaces delta_tilde + lambda.
Parameters with_overrides(const json& base_params, const json& overrides) {
  json p = base_params;
  for (const auto& [key, v] : overrides.items()) {
    if (key == "delta") {
      p.erase("delta_tilde");
      p.erase("lambda");
    }
    p[key] = v;
  }
  return parameters_from_json(p);
}

// Runs fn(i) for i in [0, n) on a pool of threads; the first failure by index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void print_kv(std::ostream& out, const char* key, const std::string& value) { out << key << ": " << value << '\n'; }
void print_kv(std::ostream& out, const char* key, double value) { print_kv(out, key, format_number(value)); }

int cmd_solve(const Context& ctx) {
  const Parameters p = params_of(ctx.config);
  const Policy policy = make_policy(p);
  const DerivedConstants& d = policy.derived();

  json dual = to_json(policy.dual());
  dual["x_under"] = d.x_under;
  dual["x_alpha"] = policy.x_alpha();
  dual["x0"] = d.x0;
  dual["c0"] = d.c0;
  write_json(ctx, "dual_solution.json", dual);

  const json s = section(ctx.config, "solve");
  const double x_min = number(s, "x_min", d.x_under);
  const double x_max = number(s, "x_max", 5.0 * std::max(d.x0, d.x_under));
  const auto n = static_cast<long>(number(s, "n", 200));
  if (n < 1 || !(x_max > x_min) || x_min < d.x_under) throw ConfigError("bad solve grid");
  Table t{{"x", "c_star", "v", "v_prime", "hjb_residual"}, {}};
  for (long i = x_min == d.x_under ? 1 : 0; i <= n; ++i) {
    const double x = x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(n);
    t.rows.push_back({x, c_star(policy, x), value(policy, x), v_prime(policy, x), hjb_residual(policy, x)});
  }
  write_table(ctx, "policy", t);

  print_kv(ctx.out, "regime", std::string(to_string(d.regime)));
  print_kv(ctx.out, "x_under", d.x_under);
  print_kv(ctx.out, "x_alpha", policy.x_alpha());
  print_kv(ctx.out, "x0", d.x0);
  print_kv(ctx.out, "c0", d.c0);
  print_kv(ctx.out, "y_alpha", policy.dual().y_alpha());
  return kOk;
}

int cmd_simulate(const Context& ctx) {
  const Parameters p = params_of(ctx.config);
  const InitialState init = init_of(ctx.config);
  const Policy policy = make_policy(p);
  const json s = section(ctx.config, "simulate");
  SimulationOptions o;
  o.horizon = number(s, "horizon", o.horizon);
  o.sample_dt = number(s, "sample_dt", o.sample_dt);
  const Trajectory tr = simulate(policy, init, o);

  Table t{{"t", "x", "c", "z", "w", "C"}, {}};
  std::size_t peak = 0;
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    const Sample& x = tr.samples[i];
    t.rows.push_back({x.t, x.x, x.c, x.z, x.w, x.C});
    if (x.C > tr.samples[peak].C) peak = i;
  }
  write_table(ctx, "trajectory", t);

  json summary = summary_json(tr);
  summary["params"] = to_json(p);
  summary["init"] = {{"w", init.w}, {"z", init.z}};
  summary["value_at_start"] = value(policy, init.ratio());
  summary["peak_time"] = tr.samples[peak].t;
  write_json(ctx, "summary.json", summary);

  print_kv(ctx.out, "objective", tr.objective);
  print_kv(ctx.out, "value_at_start", summary["value_at_start"].get<double>());
  print_kv(ctx.out, "x_end", tr.samples.back().x);
  print_kv(ctx.out, "x_limit", tr.x_limit);
  print_kv(ctx.out, "c_limit", tr.c_limit);
  print_kv(ctx.out, "peak_time", tr.samples[peak].t);
  return kOk;
}

int cmd_hump_sweep(const Context& ctx) {
  const json base = ctx.config.contains("params") ? ctx.config.at("params") : json::object();
  const json sw = section(section(ctx.config, "hump"), "sweep");
  auto axis = [&](const char* key) {
    std::vector<double> v = numbers(sw, key);
    if (v.empty()) {
      const Parameters p = params_of(ctx.config);
      v.push_back(std::string(key) == "alpha" ? p.alpha : std::string(key) == "gamma" ? p.gamma : p.delta());
    }
    return v;
  };
  const auto alphas = axis("alpha");
  const auto gammas = axis("gamma");
  const auto deltas = axis("delta");
  const std::optional<InitialState> init =
      ctx.config.contains("init") ? std::optional<InitialState>(init_of(ctx.config)) : std::nullopt;

  struct Entry {
    double alpha, gamma, delta;
    HumpReport report;
  };
  std::vector<Entry> entries;
  for (double a : alphas)
    for (double g : gammas)
      for (double d : deltas) entries.push_back({a, g, d, {}});

  parallel_for(entries.size(), [&](std::size_t i) {
    Entry& e = entries[i];
    const Parameters p = with_overrides(base, {{"alpha", e.alpha}, {"gamma", e.gamma}, {"delta", e.delta}});
    const Policy policy = make_policy(p);
    if (init) {
      e.report = classify(policy, *init);
    } else {
      e.report.x_h = find_x_h(policy);
      e.report.x_h_prime = find_x_h_prime(policy);
      e.report.exists = e.report.x_h || e.report.x_h_prime;
      e.report.condition = e.report.x_h_prime ? HumpCondition::CondII
                           : e.report.x_h     ? HumpCondition::CondI
                                              : HumpCondition::None;
    }
  });

  Table t{{"alpha", "gamma", "delta", "exists", "condition", "x_h", "x_h_prime"}, {}};
  for (const Entry& e : entries) {
    t.rows.push_back({e.alpha, e.gamma, e.delta, e.report.exists, std::string(to_string(e.report.condition)),
                      num_or_null(e.report.x_h), num_or_null(e.report.x_h_prime)});
  }
  write_table(ctx, "hump_sweep", t);
  ctx.out << "entries: " << entries.size() << '\n';
  return kOk;
}

int cmd_hump(const Context& ctx, bool sweep) {
  if (sweep) return cmd_hump_sweep(ctx);
  const Parameters p = params_of(ctx.config);
  const InitialState init = init_of(ctx.config);
  const Policy policy = make_policy(p);
  const HumpReport rep = classify(policy, init);
  json j = to_json(rep);
  j["params"] = to_json(p);
  j["init"] = {{"w", init.w}, {"z", init.z}};
  write_json(ctx, "hump.json", j);
  print_kv(ctx.out, "exists", rep.exists ? "true" : "false");
  print_kv(ctx.out, "condition", std::string(to_string(rep.condition)));
  if (rep.x_h) print_kv(ctx.out, "x_h", *rep.x_h);
  if (rep.x_h_prime) print_kv(ctx.out, "x_h_prime", *rep.x_h_prime);
  if (rep.tau_h) print_kv(ctx.out, "tau_h", *rep.tau_h);
  return kOk;
}

int cmd_verify(const Context& ctx) {
  const Parameters p = params_of(ctx.config);
  const Policy policy = make_policy(p);
  const json s = section(ctx.config, "verify");
  const auto n_x = static_cast<std::size_t>(number(s, "n_x", 800));
  const double dt = number(s, "dt", 0.01);
  const auto n_c = static_cast<std::size_t>(number(s, "n_c", 400));
  const double tol = number(s, "tol", 1e-9);
  const double threshold = number(s, "threshold", 0.02);
  const bool refine = s.value("refine", true);
  const double min_factor = number(s, "min_refinement_factor", 1.5);

  const GridSpec grid = default_grid(policy, n_x, dt, n_c, tol);
  const OracleResult res = value_iterate(p, grid);
  const OracleComparison cmp = compare(res, policy, grid);

  Table t{{"x", "V_hat", "V_analytic", "abs_err"}, {}};
  for (std::size_t i = 0; i < res.x.size(); ++i) {
    t.rows.push_back({res.x[i], res.v_hat[i], cmp.v_analytic[i], cmp.abs_err[i]});
  }
  write_table(ctx, "oracle", t);

  json report;
  report["params"] = to_json(p);
  report["grid"] = {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"n_x", grid.n_x}, {"dt", grid.dt},
                    {"n_c", grid.c_grid.size()}, {"tol", grid.tol}};
  report["coarse"] = convergence_json(res, cmp);
  report["threshold"] = threshold;
  bool pass = cmp.max_rel_err_interior < threshold;
  if (refine) {
    const GridSpec fine = default_grid(policy, 2 * n_x, 0.5 * dt, n_c, tol);
    const OracleResult res_f = value_iterate(p, fine);
    const OracleComparison cmp_f = compare(res_f, policy, fine);
    const double factor = cmp.max_abs_err_interior / cmp_f.max_abs_err_interior;
    report["fine"] = convergence_json(res_f, cmp_f);
    report["refinement_factor"] = factor;
    report["min_refinement_factor"] = min_factor;
    pass = pass && factor >= min_factor;
    print_kv(ctx.out, "refinement_factor", factor);
  }
  report["pass"] = pass;
  write_json(ctx, "verify.json", report);
  print_kv(ctx.out, "max_rel_err_interior", cmp.max_rel_err_interior);
  print_kv(ctx.out, "iterations", static_cast<double>(res.iterations));
  ctx.out << (pass ? "PASS" : "FAIL") << '\n';
  if (!pass) throw VerificationFailed("oracle comparison outside tolerance");
  return kOk;
}

struct SweepEntry {
  std::size_t group = 0;
  double axis_value = 0.0;
  Parameters params;
  std::optional<Policy> policy;
};

struct Check {
  std::string name;
  std::size_t group;
  bool passed;
  std::string detail;
};

int cmd_sweep(const Context& ctx) {
  const json s = section(ctx.config, "sweep");
  const json base = ctx.config.contains("params") ? ctx.config.at("params") : json::object();
  const std::string axis = s.value("axis", std::string());
  static const std::vector<std::string> kAxes{"alpha", "gamma", "delta", "r", "rho"};
  if (std::find(kAxes.begin(), kAxes.end(), axis) == kAxes.end()) {
    throw ConfigError("sweep.axis must be one of alpha, gamma, delta, r, rho");
  }
  const std::vector<double> values = numbers(s, "values");
  if (values.empty()) throw ConfigError("sweep.values is empty");
  json groups = s.contains("groups") ? s.at("groups") : json::array({json::object()});
  if (!groups.is_array() || groups.empty()) throw ConfigError("sweep.groups must be a non-empty array");

  std::vector<SweepEntry> entries;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (double v : values) {
      json ov = groups[g];
      ov[axis] = v;
      entries.push_back({g, v, with_overrides(base, ov), std::nullopt});
    }
  }
  parallel_for(entries.size(), [&](std::size_t i) { entries[i].policy = make_policy(entries[i].params); });

  // Common x grid for the curves and the pointwise comparisons.
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& e : entries) {
    const DerivedConstants& d = e.policy->derived();
    lo = std::min(lo, d.x_under);
    hi = std::max(hi, 5.0 * std::max(d.x0, d.x_under));
  }
  const json xg = s.contains("x_grid") ? s.at("x_grid") : json::object();
  const double x_min = number(xg, "x_min", lo);
  const double x_max = number(xg, "x_max", hi);
  const auto n = static_cast<long>(number(xg, "n", 100));
  if (n < 1 || !(x_max > x_min)) throw ConfigError("bad sweep.x_grid");
  std::vector<double> xs;
  for (long i = 0; i <= n; ++i) xs.push_back(x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(n));

  Table rows{{"group", "r", "rho", "alpha", "delta", "gamma", "regime", "x_under", "x_alpha", "x0", "c0", "y_alpha"},
             {}};
  Table curves{{"group", axis, "x", "c_star"}, {}};
  std::vector<std::vector<std::optional<double>>> cvals(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const Policy& pol = *e.policy;
    const Parameters& p = e.params;
    rows.rows.push_back({static_cast<double>(e.group), p.r, p.rho, p.alpha, p.delta(), p.gamma,
                         std::string(to_string(pol.derived().regime)), pol.x_under(), pol.x_alpha(),
                         pol.derived().x0, pol.derived().c0, pol.dual().y_alpha()});
    for (double x : xs) {
      std::optional<double> c;
      if (x >= pol.x_under()) c = c_star(pol, x);
      cvals[i].push_back(c);
      curves.rows.push_back({static_cast<double>(e.group), e.axis_value, x, num_or_null(c)});
    }
  }
  write_table(ctx, "sweep", rows);
  write_table(ctx, "sweep_curves", curves);

  // Qualitative sign tests between consecutive axis values within a group.
  std::vector<Check> checks;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].group == g) idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return entries[a].axis_value < entries[b].axis_value; });
    auto regime = [&](std::size_t i) { return entries[i].policy->regime(); };
    auto c_drop = [&](std::size_t a, std::size_t b, std::string& detail) {
      // c*(b, x) < c*(a, x) wherever both are defined and x is above both safe levels.
      const double floor = std::max(entries[a].policy->x_under(), entries[b].policy->x_under());
      for (std::size_t k = 0; k < xs.size(); ++k) {
        if (xs[k] <= floor || !cvals[a][k] || !cvals[b][k]) continue;
        if (!(*cvals[b][k] < *cvals[a][k])) {
          detail = "x = " + format_number(xs[k]);
          return false;
        }
      }
      return true;
    };
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
      const std::size_t a = idx[k], b = idx[k + 1];
      const std::string pair = axis + " " + format_number(entries[a].axis_value) + " -> " +
                               format_number(entries[b].axis_value);
      const bool both_patient = regime(a) == Regime::Patient && regime(b) == Regime::Patient;
      const bool both_impatient = regime(a) != Regime::Patient && regime(b) != Regime::Patient;
      if (axis == "gamma" && both_patient) {
        const bool ok = entries[b].policy->x_alpha() < entries[a].policy->x_alpha();
        checks.push_back({"x_alpha decreasing in gamma", g, ok, pair});
      }
      if ((axis == "gamma" || axis == "alpha") && both_impatient) {
        std::string detail;
        const bool ok = c_drop(a, b, detail);
        checks.push_back({"c_star decreasing in " + axis + " (impatient)", g, ok, detail.empty() ? pair : pair + ", " + detail});
      }
      if (axis == "alpha" && both_patient) {
        const bool ok = entries[b].policy->x_alpha() > entries[a].policy->x_alpha();
        checks.push_back({"x_alpha increasing in alpha (patient)", g, ok, pair});
      }
    }
    if (axis == "alpha") {
      for (std::size_t i : idx) {
        const Parameters& p = entries[i].params;
        const double flip = 1.0 - (p.delta() - p.r) / p.rho;
        if (std::abs(p.alpha - flip) < 1e-9) continue;
        const bool expect_patient = p.alpha < flip;
        const bool ok = (regime(i) == Regime::Patient) == expect_patient;
        checks.push_back({"regime flips at alpha = 1 - (delta - r) / rho", g, ok,
                          "alpha " + format_number(p.alpha) + " vs flip " + format_number(flip)});
      }
    }
  }

  json cj = json::array();
  bool pass = true;
  for (const Check& c : checks) {
    cj.push_back({{"check", c.name}, {"group", c.group}, {"passed", c.passed}, {"detail", c.detail}});
    pass = pass && c.passed;
    ctx.out << (c.passed ? "PASS " : "FAIL ") << c.name << " [group " << c.group << "] " << c.detail << '\n';
  }
  write_json(ctx, "sweep_checks.json", {{"pass", pass}, {"checks", cj}});
  ctx.out << "entries: " << entries.size() << ", checks: " << checks.size() << '\n';
  if (!pass) throw VerificationFailed("sweep sign tests failed");
  return kOk;
}

}  // namespace

json apply_overrides(json config, const std::vector<std::string>& overrides) {
  if (config.is_null()) config = json::object();
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects key=value, got '" + kv + "'");
    std::string key = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    if (key.find('.') == std::string::npos) key = "params." + key;
    json* node = &config;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) throw ConfigError("empty path segment in '" + key + "'");
      if (!node->is_object()) throw ConfigError("'" + key + "' does not address an object");
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      if (node->is_null()) *node = json::object();
      start = dot + 1;
    }
  }
  return config;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal consumption under a habit-formation constraint", "habitcons"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--param", overrides, "override key=value (dotted path, bare keys go to params)")
      ->allow_extra_args(false);
  auto* solve = app.add_subcommand("solve", "solve the dual problem and dump the policy");
  auto* sim = app.add_subcommand("simulate", "simulate optimal wealth and consumption paths");
  auto* hump = app.add_subcommand("hump", "classify the consumption hump");
  bool hump_sweep = false;
  hump->add_flag("--sweep", hump_sweep, "sweep the hump conditions over a parameter grid");
  auto* verify = app.add_subcommand("verify", "compare against value iteration");
  auto* sweep = app.add_subcommand("sweep", "sensitivity sweep with sign tests");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    json config = json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot open config " + config_path);
      config = json::parse(f);
      if (!config.is_object()) throw ConfigError("config must be a JSON object");
    }
    config = apply_overrides(std::move(config), overrides);
    static const std::vector<std::string> kSections{"description", "params", "init",   "solve",
                                                    "simulate",    "hump",   "verify", "sweep"};
    for (const auto& [key, v] : config.items()) {
      if (std::find(kSections.begin(), kSections.end(), key) == kSections.end()) {
        throw ConfigError("unknown config section '" + key + "'");
      }
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + out_dir);
    const Context ctx{config, out_dir, format, out};

    if (*solve) return cmd_solve(ctx);
    if (*sim) return cmd_simulate(ctx);
    if (*hump) return cmd_hump(ctx, hump_sweep);
    if (*verify) return cmd_verify(ctx);
    if (*sweep) return cmd_sweep(ctx);
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const OutOfRange& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const GammaNearOne& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InadmissibleStart& e) {
    err << "inadmissible: " << e.what() << '\n';
    return kInadmissible;
  } catch (const InadmissiblePolicy& e) {
    err << "inadmissible: " << e.what() << '\n';
    return kInadmissible;
  } catch (const VerificationFailed& e) {
    err << "verification failed: " << e.what() << '\n';
    return kVerificationFailure;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  }
}

}  // namespace habitcons::cli
