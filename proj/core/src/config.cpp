#include "wellpose/config.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "wellpose/field_io.hpp"

namespace wellpose {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double_value(const std::string& key, const std::string& raw) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + raw + "'");
  }
}

int parse_int_value(const std::string& key, const std::string& raw) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + raw + "'");
  }
}

bool parse_bool_value(const std::string& key, const std::string& raw) {
  if (raw == "true" || raw == "1") return true;
  if (raw == "false" || raw == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + raw + "'");
}

// Axis values: either a comma list "a,b,c" or a linear range "lo:hi:n".
std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& raw) {
  std::vector<double> out;
  if (raw.find(':') != std::string::npos) {
    std::istringstream ss(raw);
    std::string lo_s, hi_s, n_s;
    if (!std::getline(ss, lo_s, ':') || !std::getline(ss, hi_s, ':') ||
        !std::getline(ss, n_s))
      throw ConfigError(key + ": range must be lo:hi:n");
    const double lo = parse_double_value(key, trim(lo_s));
    const double hi = parse_double_value(key, trim(hi_s));
    const int n = parse_int_value(key, trim(n_s));
    if (n < 1) throw ConfigError(key + ": range count must be >= 1");
    for (int i = 0; i < n; ++i)
      out.push_back(n == 1 ? lo : lo + (hi - lo) * double(i) / (n - 1));
    return out;
  }
  std::istringstream ss(raw);
  std::string cell;
  while (std::getline(ss, cell, ','))
    out.push_back(parse_double_value(key, trim(cell)));
  if (out.empty()) throw ConfigError(key + ": needs at least one value");
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& raw) {
  std::vector<int> out;
  std::istringstream ss(raw);
  std::string cell;
  while (std::getline(ss, cell, ','))
    out.push_back(parse_int_value(key, trim(cell)));
  if (out.empty()) throw ConfigError(key + ": needs at least one value");
  return out;
}

std::string emit_double_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt17(v[i]);
  }
  return out;
}

std::string emit_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

struct KeyDef {
  const char* name;
  const char* help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define WP_DOUBLE_KEY(key, field, help_text)                               \
  KeyDef{key, help_text,                                                   \
         [](RunConfig& c, const std::string& raw) {                        \
           c.field = parse_double_value(key, raw);                         \
         },                                                                \
         [](const RunConfig& c) { return fmt17(c.field); }}

#define WP_INT_KEY(key, field, help_text)                                  \
  KeyDef{key, help_text,                                                   \
         [](RunConfig& c, const std::string& raw) {                        \
           c.field = parse_int_value(key, raw);                            \
         },                                                                \
         [](const RunConfig& c) { return std::to_string(c.field); }}

#define WP_BOOL_KEY(key, field, help_text)                                 \
  KeyDef{key, help_text,                                                   \
         [](RunConfig& c, const std::string& raw) {                        \
           c.field = parse_bool_value(key, raw);                           \
         },                                                                \
         [](const RunConfig& c) { return c.field ? "true" : "false"; }}

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      WP_INT_KEY("grid.nx", nx, "x cells (periodic direction), >= 4"),
      WP_INT_KEY("grid.ny", ny, "y nodes including both walls, >= 4"),
      WP_DOUBLE_KEY("grid.lx", lx, "domain length in x, > 0"),
      WP_DOUBLE_KEY("grid.ly", ly, "channel height, > 0, equals bench.h"),
      WP_DOUBLE_KEY("fluid.mu", fluid.mu, "dynamic viscosity, > 0"),
      WP_DOUBLE_KEY("fluid.lambda", fluid.lambda,
                    "bulk viscosity, >= -(2/3) mu"),
      WP_DOUBLE_KEY("fluid.rho0", fluid.rho0, "reference density, > 0"),
      WP_DOUBLE_KEY("fluid.cs", fluid.cs, "artificial sound speed, > 0"),
      WP_DOUBLE_KEY("fluid.fx", fluid.fx, "extra body force x"),
      WP_DOUBLE_KEY("fluid.fy", fluid.fy, "extra body force y"),
      WP_DOUBLE_KEY("bench.px", bench_px, "benchmark pressure gradient dp/dx"),
      WP_DOUBLE_KEY("bench.h", bench_h, "channel height, equals grid.ly"),
      WP_DOUBLE_KEY("run.t_end", t_end, "simulated end time, > 0"),
      WP_DOUBLE_KEY("run.cfl", cfl, "time step safety factor in (0, 1]"),
      WP_INT_KEY("run.sample_every", sample_every,
                 "diagnostics cadence in steps, >= 1"),
      WP_INT_KEY("run.snapshot_every", snapshot_every,
                 "snapshot cadence in steps, 0 disables"),
      WP_DOUBLE_KEY("run.tol_residual", tol_residual,
                    "steady residual tolerance, > 0"),
      WP_DOUBLE_KEY("run.tol_steady", tol_steady,
                    "relative steady-distance tolerance, > 0"),
      WP_DOUBLE_KEY("run.blowup_ratio", blowup_ratio,
                    "kinetic energy blow-up ratio, > 1"),
      WP_DOUBLE_KEY("run.energy_ratio_max", energy_ratio_max,
                    "admissibility energy bound, >= 1"),
      WP_DOUBLE_KEY("run.little_o_factor", little_o_factor,
                    "little-o tail decrease factor in (0, 1)"),
      WP_DOUBLE_KEY("run.little_o_floor", little_o_floor,
                    "relative dudt floor treated as steady, >= 0"),
      WP_DOUBLE_KEY("run.big_o_bound", big_o_bound, "big-O ratio bound, >= 1"),
      WP_BOOL_KEY("run.freeze_dt", freeze_dt,
                  "compute stable_dt once at t=0 and keep it"),
      WP_DOUBLE_KEY("init.alpha", alpha, "profile amplitude multiplier"),
      WP_DOUBLE_KEY("init.eps", eps, "perturbation amplitude (velocity units)"),
      WP_INT_KEY("init.k", k, "perturbation wavenumber, >= 0"),
      WP_DOUBLE_KEY("reverse.j0", rev_j0, "decomposition factor at t0"),
      WP_DOUBLE_KEY("reverse.t0", rev_t0, "reversed-time start, > 0"),
      WP_DOUBLE_KEY("reverse.t_end", rev_t_end, "reversed-time end, > t0"),
      WP_INT_KEY("reverse.n_steps", rev_n_steps, "RK4 steps, >= 1"),
      WP_INT_KEY("reverse.wall_margin", rev_wall_margin,
                 "wall cells excluded from y samples, >= 1"),
      WP_DOUBLE_KEY("reverse.tol", rev_tol,
                    "closed-form agreement tolerance, > 0"),
      KeyDef{"sweep.alpha", "alpha axis: list a,b,c or range lo:hi:n",
             [](RunConfig& c, const std::string& raw) {
               c.sweep_alpha = parse_double_list("sweep.alpha", raw);
             },
             [](const RunConfig& c) { return emit_double_list(c.sweep_alpha); }},
      KeyDef{"sweep.eps", "eps axis: list a,b,c or range lo:hi:n",
             [](RunConfig& c, const std::string& raw) {
               c.sweep_eps = parse_double_list("sweep.eps", raw);
             },
             [](const RunConfig& c) { return emit_double_list(c.sweep_eps); }},
      KeyDef{"sweep.k", "k axis: integer list, values >= 0",
             [](RunConfig& c, const std::string& raw) {
               c.sweep_k = parse_int_list("sweep.k", raw);
             },
             [](const RunConfig& c) { return emit_int_list(c.sweep_k); }},
      WP_BOOL_KEY("sweep.emit_timing", sweep_emit_timing,
                  "write wall-clock seconds into the sweep CSV (breaks "
                  "byte-for-byte reproducibility)"),
  };
  return table;
}

#undef WP_DOUBLE_KEY
#undef WP_INT_KEY
#undef WP_BOOL_KEY

void validate(const RunConfig& c) {
  if (c.nx < 4) throw ConfigError("grid.nx: must be >= 4");
  if (c.ny < 4) throw ConfigError("grid.ny: must be >= 4");
  if (!(c.lx > 0.0)) throw ConfigError("grid.lx: must be > 0");
  if (!(c.ly > 0.0)) throw ConfigError("grid.ly: must be > 0");
  try {
    c.fluid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(c.bench_h > 0.0)) throw ConfigError("bench.h: must be > 0");
  if (std::abs(c.bench_h - c.ly) > 1e-12 * std::max(1.0, c.bench_h))
    throw ConfigError("bench.h: must equal grid.ly (walls sit on the grid)");
  if (!(c.t_end > 0.0)) throw ConfigError("run.t_end: must be > 0");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0))
    throw ConfigError("run.cfl: must be in (0, 1]");
  if (c.sample_every < 1) throw ConfigError("run.sample_every: must be >= 1");
  if (c.snapshot_every < 0)
    throw ConfigError("run.snapshot_every: must be >= 0");
  if (!(c.tol_residual > 0.0))
    throw ConfigError("run.tol_residual: must be > 0");
  if (!(c.tol_steady > 0.0)) throw ConfigError("run.tol_steady: must be > 0");
  if (!(c.blowup_ratio > 1.0))
    throw ConfigError("run.blowup_ratio: must be > 1");
  if (!(c.energy_ratio_max >= 1.0))
    throw ConfigError("run.energy_ratio_max: must be >= 1");
  if (!(c.little_o_factor > 0.0 && c.little_o_factor < 1.0))
    throw ConfigError("run.little_o_factor: must be in (0, 1)");
  if (!(c.little_o_floor >= 0.0))
    throw ConfigError("run.little_o_floor: must be >= 0");
  if (!(c.big_o_bound >= 1.0)) throw ConfigError("run.big_o_bound: must be >= 1");
  if (c.k < 0) throw ConfigError("init.k: must be >= 0");
  if (!std::isfinite(c.alpha)) throw ConfigError("init.alpha: must be finite");
  if (!std::isfinite(c.eps)) throw ConfigError("init.eps: must be finite");
  if (!(c.rev_t0 > 0.0)) throw ConfigError("reverse.t0: must be > 0");
  if (!(c.rev_t_end > c.rev_t0))
    throw ConfigError("reverse.t_end: must be > reverse.t0");
  if (c.rev_n_steps < 1) throw ConfigError("reverse.n_steps: must be >= 1");
  if (c.rev_wall_margin < 1)
    throw ConfigError("reverse.wall_margin: must be >= 1");
  if (!(c.rev_tol > 0.0)) throw ConfigError("reverse.tol: must be > 0");
  for (int kv : c.sweep_k)
    if (kv < 0) throw ConfigError("sweep.k: values must be >= 0");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::vector<bool> seen(key_table().size(), false);

  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key=value, got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));

    bool found = false;
    for (std::size_t idx = 0; idx < key_table().size(); ++idx) {
      if (key != key_table()[idx].name) continue;
      if (seen[idx])
        throw ConfigError("line " + std::to_string(line_no) +
                          ": duplicate key '" + key + "'");
      seen[idx] = true;
      try {
        key_table()[idx].set(cfg, value);
      } catch (const ConfigError& e) {
        throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
      }
      found = true;
      break;
    }
    if (!found)
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                        key + "'");
  }

  validate(cfg);
  return cfg;
}

std::string emit_config(const RunConfig& c) {
  std::string out;
  for (const KeyDef& k : key_table()) {
    out += k.name;
    out += '=';
    out += k.get(c);
    out += '\n';
  }
  return out;
}

std::string config_help() {
  const RunConfig defaults;
  std::string out = "configuration keys (key=value, # comments allowed):\n";
  for (const KeyDef& k : key_table()) {
    out += "  ";
    out += k.name;
    out += '=';
    out += k.get(defaults);
    out += "\n      ";
    out += k.help;
    out += '\n';
  }
  return out;
}

SteadyBenchmark RunConfig::make_bench() const {
  return make_poiseuille(fluid.mu, bench_px, bench_h);
}

ClassifyConfig RunConfig::make_classify_config() const {
  ClassifyConfig cc;
  cc.run.t_end = t_end;
  cc.run.cfl = cfl;
  cc.run.sample_every = sample_every;
  cc.run.snapshot_every = 0;  // sweeps never store per-point snapshots
  cc.run.blowup_ratio = blowup_ratio;
  cc.run.freeze_dt = freeze_dt;
  cc.tol_steady = tol_steady;
  cc.energy_ratio_max = energy_ratio_max;
  cc.little_o_factor = little_o_factor;
  cc.little_o_floor = little_o_floor;
  return cc;
}

SweepAxes RunConfig::make_sweep_axes() const {
  return SweepAxes{sweep_alpha, sweep_eps, sweep_k};
}

}  // namespace wellpose
