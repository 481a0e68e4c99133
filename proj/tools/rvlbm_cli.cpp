// Command-line driver for the linear and Kelvin-Helmholtz stability studies.
//
//   rvlbm stability table        highest stable |V| over (m, n)
//   rvlbm stability alpha-sweep  highest stable |V| as a function of alpha
//   rvlbm kh vorticity           field dumps of the shear-layer run
//   rvlbm kh scan-ma             highest stable Ma per mesh
//   rvlbm kh scan-re             highest stable Re per mesh
//   rvlbm kh scan-utilde         highest stable Ma per u~ = c u
//
// Exit codes: 0 success, 1 invalid configuration, 2 numerical failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rvlbm/config.hpp"
#include "rvlbm/experiments.hpp"

namespace {

using namespace rvlbm;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct Globals {
  std::string config_path;
  std::string out_path;
  int threads = 0;
  int kgrid = kDefaultKGrid;
  double tol = 0.01;
  bool full = false;
};

using Overrides = std::map<std::string, std::string>;

void add_key(CLI::App* app, const std::string& flag, const std::string& key, Overrides& overrides,
             const std::string& help) {
  app->add_option_function<std::string>(flag, [&overrides, key](const std::string& v) { overrides[key] = v; },
                                        help + " [" + key + "]");
}

KeyValueConfig merged_config(const Globals& g, const Overrides& overrides) {
  KeyValueConfig cfg = g.config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(g.config_path);
  for (const auto& [k, v] : overrides) cfg.set(k, v);
  return cfg;
}

int threads_of(const Globals& g) { return g.threads > 0 ? g.threads : default_threads(); }

std::vector<int> int_list(const KeyValueConfig& cfg, const std::string& key, const std::vector<int>& fallback) {
  auto text = cfg.find(key);
  if (!text) return fallback;
  std::vector<int> out;
  for (const auto& item : split_list(*text)) {
    // Accept "a-b" ranges and "1/n" mesh sizes as well as plain integers.
    const auto dash = item.find('-');
    const auto slash = item.find('/');
    if (dash != std::string::npos && dash > 0) {
      const int lo = static_cast<int>(parse_double(item.substr(0, dash), key));
      const int hi = static_cast<int>(parse_double(item.substr(dash + 1), key));
      for (int i = lo; i <= hi; ++i) out.push_back(i);
    } else if (slash != std::string::npos) {
      const double num = parse_double(item.substr(0, slash), key);
      const double den = parse_double(item.substr(slash + 1), key);
      out.push_back(static_cast<int>(std::lround(den / num)));
    } else {
      out.push_back(static_cast<int>(std::lround(parse_double(item, key))));
    }
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

LinearShift parse_linear_shift(const std::string& text) {
  if (text == "zero" || text == "0") return LinearShift::Zero;
  if (text == "V" || text == "v" || text == "fluid" || text == "u") return LinearShift::EqualsV;
  throw ConfigError("utilde.policy for linear stability must be zero or V, got '" + text + "'");
}

UtildePolicy parse_policy(const std::string& text, double scale) {
  if (text == "zero" || text == "0") return UtildePolicy::zero();
  if (text == "fluid" || text == "u") return UtildePolicy::fluid();
  if (text == "scaled") return UtildePolicy::scaled_fluid(scale);
  if (text.rfind("fixed:", 0) == 0) {
    const auto parts = split_list(text.substr(6), ':');
    if (parts.size() != 2) throw ConfigError("utilde.policy fixed expects fixed:wx:wy");
    return UtildePolicy::fixed_at(Vec2(parse_double(parts[0], "utilde"), parse_double(parts[1], "utilde")));
  }
  throw ConfigError("unknown utilde.policy '" + text + "' (zero, fluid, scaled, fixed:wx:wy)");
}

template <typename Fn>
auto wrap_config(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void emit(const Globals& g, const TableResult& table) {
  if (g.out_path.empty()) {
    table.write_csv(std::cout);
  } else {
    std::ofstream out(g.out_path);
    if (!out) throw ConfigError("cannot open output file " + g.out_path);
    table.write_csv(out);
  }
  std::cerr << "runtime: " << table.runtime_seconds << " s\n";
}

SpeedScan speed_scan(const Globals& g, const KeyValueConfig& cfg) {
  SpeedScan scan;
  scan.tol = cfg.get_double("experiment.tol", g.tol);
  scan.kgrid_n = static_cast<int>(cfg.get_long("experiment.kgrid", g.kgrid));
  scan.cap = cfg.get_double("experiment.v_cap", 0.0);
  if (!(scan.tol > 0.0)) throw ConfigError("tol must be positive");
  if (scan.kgrid_n < 8) throw ConfigError("kgrid must be at least 8");
  return scan;
}

int run_table(const Globals& g, const Overrides& ov) {
  const KeyValueConfig cfg = merged_config(g, ov);
  LinearTableSpec spec = wrap_config([&] {
    LinearTableSpec s;
    s.basis = MomentBasis{parse_family(cfg.get_string("family", "A")), cfg.get_double("alpha", 0.0)};
    s.kind = parse_equilibrium(cfg.get_string("equilibrium", "truncated2"));
    s.relaxation = parse_relaxation_type(cfg.get_string("relaxation.type", "trt1"));
    s.shift = parse_linear_shift(cfg.get_string("utilde.policy", "zero"));
    s.theta = cfg.get_double("experiment.theta", 0.0);
    return s;
  });
  spec.scan = speed_scan(g, cfg);
  const auto ms = int_list(cfg, "experiment.m", {0, 1, 2, 3, 4, 5, 6, 7});
  const auto ns = int_list(cfg, "experiment.n", {0, 1, 2, 3, 4, 5, 6, 7});
  emit(g, linear_table(ms, ns, spec, threads_of(g)));
  return kExitOk;
}

int run_alpha_sweep(const Globals& g, const Overrides& ov) {
  const KeyValueConfig cfg = merged_config(g, ov);
  const auto alphas = cfg.get_doubles("experiment.alphas", {-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0});
  for (double a : alphas) {
    if (a < -1.0 || a > 1.0) std::cerr << "warning: alpha " << a << " outside [-1, 1]\n";
  }
  std::vector<AlphaCurve> curves = wrap_config([&] {
    const Family family = parse_family(cfg.get_string("family", "A"));
    const EquilibriumKind kind = parse_equilibrium(cfg.get_string("equilibrium", "truncated2"));
    const RelaxationType type = parse_relaxation_type(cfg.get_string("relaxation.type", "trt1"));
    const LinearShift shift = parse_linear_shift(cfg.get_string("utilde.policy", "zero"));
    std::vector<AlphaCurve> out;
    for (const auto& pair : cfg.get_strings("experiment.pairs", {"0:3", "3:0", "0:7", "7:0", "7:7"})) {
      const auto mn = split_list(pair, ':');
      if (mn.size() != 2) throw ConfigError("experiment.pairs expects m:n items");
      out.push_back(AlphaCurve{static_cast<int>(parse_double(mn[0], "m")), static_cast<int>(parse_double(mn[1], "n")),
                               type, shift, family, kind});
    }
    return out;
  });
  emit(g, alpha_sweep(alphas, curves, speed_scan(g, cfg), threads_of(g)));
  return kExitOk;
}

KhSettings kh_settings(const Globals& g, const KeyValueConfig& cfg) {
  KhSettings s;
  s.mu = cfg.get_double("viscosity.mu", s.mu);
  s.nu = cfg.get_double("viscosity.nu", s.nu);
  s.lambda = cfg.get_double("lambda", s.lambda);
  s.k = cfg.get_double("experiment.k", s.k);
  s.delta = cfg.get_double("experiment.delta", s.delta);
  s.iterations = cfg.get_long("experiment.iterations", s.iterations);
  s.ma_step = cfg.get_double("experiment.ma_step", g.tol);
  s.ma_cap = cfg.get_double("experiment.ma_cap", s.ma_cap);
  s.re_ma = cfg.get_double("experiment.mach", s.re_ma);
  s.re_step = cfg.get_double("experiment.re_step", s.re_step);
  s.re_cap = cfg.get_double("experiment.re_cap", s.re_cap);
  const std::string search = cfg.get_string("experiment.search", "bisect");
  if (search == "bisect") {
    s.search = SearchMode::Bisect;
  } else if (search == "scan") {
    s.search = SearchMode::Scan;
  } else {
    throw ConfigError("experiment.search must be bisect or scan");
  }
  if (s.iterations < 1 || !(s.ma_step > 0.0) || !(s.re_step > 0.0) || !(s.lambda > 0.0)) {
    throw ConfigError("iterations, steps and lambda must be positive");
  }
  return s;
}

// Variants: the default six, or a single one described by the scheme keys.
std::vector<KhVariant> kh_variants(const KeyValueConfig& cfg, const std::vector<KhVariant>& defaults) {
  if (!cfg.has("family") && !cfg.has("alpha") && !cfg.has("equilibrium") && !cfg.has("utilde.policy")) {
    return defaults;
  }
  return wrap_config([&] {
    KhVariant v;
    v.basis = MomentBasis{parse_family(cfg.get_string("family", "A")), cfg.get_double("alpha", 0.0)};
    v.kind = parse_equilibrium(cfg.get_string("equilibrium", "truncated2"));
    v.policy = parse_policy(cfg.get_string("utilde.policy", "fluid"), cfg.get_double("utilde.scale", 1.0));
    v.label = "family=" + to_string(v.basis.family) + " alpha=" + cfg.get_string("alpha", "0") +
              " utilde=" + to_string(v.policy) + " " + to_string(v.kind);
    return std::vector<KhVariant>{v};
  });
}

int run_scan_ma(const Globals& g, const Overrides& ov) {
  const KeyValueConfig cfg = merged_config(g, ov);
  const KhSettings s = kh_settings(g, cfg);
  const std::vector<int> fallback = g.full ? std::vector<int>{16, 32, 64, 128, 256, 512, 1024}
                                           : std::vector<int>{16, 32, 64, 128};
  const auto meshes = int_list(cfg, "experiment.meshes", fallback);
  const auto variants = kh_variants(cfg, default_kh_variants());
  TableResult table = kh_ma_scan(meshes, variants, s, threads_of(g));
  const TableResult rates = rate_header(meshes, s);
  for (std::size_t r = 0; r < rates.row_labels.size(); ++r) {
    std::ostringstream row;
    for (std::size_t c = 0; c < meshes.size(); ++c) row << (c ? ";" : "") << rates.at(r, c).value;
    table.metadata.emplace_back(rates.row_labels[r], row.str());
  }
  emit(g, table);
  return kExitOk;
}

int run_scan_re(const Globals& g, const Overrides& ov) {
  const KeyValueConfig cfg = merged_config(g, ov);
  const KhSettings s = kh_settings(g, cfg);
  const auto meshes = int_list(cfg, "experiment.meshes", {16, 32, 64, 128});
  emit(g, kh_re_scan(meshes, kh_variants(cfg, default_kh_variants()), s, threads_of(g)));
  return kExitOk;
}

int run_scan_utilde(const Globals& g, const Overrides& ov) {
  const KeyValueConfig cfg = merged_config(g, ov);
  const KhSettings s = kh_settings(g, cfg);
  const auto scales = cfg.get_doubles("experiment.scales", {0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4});
  const int n = static_cast<int>(cfg.get_long("grid.n", 128));
  std::vector<KhVariant> defaults;
  for (const auto& v : default_kh_variants()) {
    if (v.policy.kind == UtildePolicy::Kind::Fluid) defaults.push_back(v);
  }
  for (auto& v : defaults) v.label = v.label.substr(0, v.label.find(" utilde")) + " " + to_string(v.kind);
  emit(g, kh_utilde_scan(scales, kh_variants(cfg, defaults), n, s, threads_of(g)));
  return kExitOk;
}

int run_vorticity(const Globals& g, const Overrides& ov) {
  const KeyValueConfig cfg = merged_config(g, ov);
  const double mach = cfg.get_double("experiment.mach", 0.04);
  KeyValueConfig local = cfg;
  if (!cfg.has("lambda")) local.set("lambda", std::to_string(lambda_for_unit_shear(mach)));
  if (!cfg.has("experiment.mach")) local.set("experiment.mach", std::to_string(mach));
  const KhSettings s = kh_settings(g, local);
  const int n = static_cast<int>(cfg.get_long("grid.n", 128));
  KhVariant variant{"alpha=0 utilde=u truncated2", MomentBasis{Family::A, 0.0}, EquilibriumKind::Truncated2,
                    UtildePolicy::fluid()};
  const auto chosen = kh_variants(cfg, {variant});
  const auto times = cfg.get_doubles("experiment.times", {0.0, 0.6, 1.0});
  const std::string prefix = g.out_path.empty() ? cfg.get_string("experiment.prefix", "vorticity") : g.out_path;
  const VorticityRun run = kh_vorticity_run(mach, n, chosen.front(), s, times, prefix);
  for (const auto& f : run.files) std::cout << f << '\n';
  if (!run.outcome.stable()) {
    std::cerr << "blow-up at iteration " << run.outcome.iterations << ": " << to_string(run.outcome.reason) << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relative-velocity D2Q9 lattice Boltzmann stability toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  Overrides ov;
  app.add_option("--config", g.config_path, "Key-value configuration file");
  app.add_option("--out", g.out_path, "Output CSV path (prefix for field dumps)");
  app.add_option("--threads", g.threads, "Worker threads (default: available parallelism)");
  app.add_option("--kgrid", g.kgrid, "Wavevector grid resolution per axis");
  app.add_option("--tol", g.tol, "Speed / Mach resolution");

  auto scheme_keys = [&](CLI::App* sub) {
    add_key(sub, "--family", "family", ov, "Moment family A or B");
    add_key(sub, "--alpha", "alpha", ov, "Moment family parameter");
    add_key(sub, "--equilibrium", "equilibrium", ov, "truncated2 or product4");
    add_key(sub, "--utilde", "utilde.policy", ov, "Relaxation frame velocity");
  };

  auto* stability = app.add_subcommand("stability", "Linear (von Neumann) stability");
  stability->require_subcommand(1);
  auto* table = stability->add_subcommand("table", "Highest stable |V| over the (m, n) grid");
  scheme_keys(table);
  add_key(table, "--relaxation", "relaxation.type", ov, "trt1 or trt2");
  add_key(table, "--theta", "experiment.theta", ov, "Linearization direction (radians)");
  add_key(table, "--m", "experiment.m", ov, "m values, e.g. 0-7");
  add_key(table, "--n", "experiment.n", ov, "n values, e.g. 0-7");
  auto* sweep = stability->add_subcommand("alpha-sweep", "Highest stable |V| as a function of alpha");
  scheme_keys(sweep);
  add_key(sweep, "--relaxation", "relaxation.type", ov, "trt1 or trt2");
  add_key(sweep, "--alphas", "experiment.alphas", ov, "Comma-separated alpha values");
  add_key(sweep, "--pairs", "experiment.pairs", ov, "Comma-separated m:n pairs");

  auto* kh = app.add_subcommand("kh", "Kelvin-Helmholtz shear layer");
  kh->require_subcommand(1);
  auto* vort = kh->add_subcommand("vorticity", "Field dumps of one run");
  scheme_keys(vort);
  add_key(vort, "--mach", "experiment.mach", ov, "Mach number");
  add_key(vort, "--n", "grid.n", ov, "Cells per direction");
  add_key(vort, "--times", "experiment.times", ov, "Dump times");
  add_key(vort, "--lambda", "lambda", ov, "Velocity scale (default gives U = 1)");
  auto* scan_ma = kh->add_subcommand("scan-ma", "Highest stable Ma per mesh");
  scheme_keys(scan_ma);
  add_key(scan_ma, "--meshes", "experiment.meshes", ov, "Cells per direction, e.g. 32,64,128");
  scan_ma->add_flag("--full", g.full, "Include the 256 to 1024 meshes");
  auto* scan_re = kh->add_subcommand("scan-re", "Highest stable Re per mesh");
  scheme_keys(scan_re);
  add_key(scan_re, "--meshes", "experiment.meshes", ov, "Cells per direction");
  add_key(scan_re, "--mach", "experiment.mach", ov, "Mach number");
  auto* scan_ut = kh->add_subcommand("scan-utilde", "Highest stable Ma per u~ = c u");
  scheme_keys(scan_ut);
  add_key(scan_ut, "--scales", "experiment.scales", ov, "Values of c");
  add_key(scan_ut, "--n", "grid.n", ov, "Cells per direction");

  for (auto* sub : {scan_ma, scan_re, scan_ut, vort}) {
    add_key(sub, "--mu", "viscosity.mu", ov, "Bulk viscosity");
    add_key(sub, "--nu", "viscosity.nu", ov, "Shear viscosity");
    add_key(sub, "--iterations", "experiment.iterations", ov, "Iterations per stability probe");
    add_key(sub, "--search", "experiment.search", ov, "bisect or scan");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*table) return run_table(g, ov);
    if (*sweep) return run_alpha_sweep(g, ov);
    if (*vort) return run_vorticity(g, ov);
    if (*scan_ma) return run_scan_ma(g, ov);
    if (*scan_re) return run_scan_re(g, ov);
    if (*scan_ut) return run_scan_utilde(g, ov);
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
