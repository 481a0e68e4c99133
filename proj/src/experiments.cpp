#include "rvlbm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace rvlbm {

namespace {

std::string fmt(double v, int precision = 6) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ';';
    out += items[i];
  }
  return out;
}

template <typename T>
std::string join_numbers(const std::vector<T>& items) {
  std::vector<std::string> s;
  for (const auto& v : items) s.push_back(fmt(static_cast<double>(v), 10));
  return join(s);
}

std::string to_string(LinearShift shift) {
  switch (shift) {
    case LinearShift::Zero: return "zero";
    case LinearShift::EqualsV: return "V";
    case LinearShift::Fixed: return "fixed";
  }
  return "?";
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string TableResult::config_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& [k, v] : metadata) {
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

void TableResult::write_csv(std::ostream& out, bool include_runtime) const {
  out << "# title: " << title << '\n';
  for (const auto& [k, v] : metadata) out << "# " << k << ": " << v << '\n';
  out << "# config_hash: " << config_hash() << '\n';
  if (include_runtime) out << "# runtime_seconds: " << fmt(runtime_seconds) << '\n';
  out << corner;
  for (const auto& c : col_labels) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    out << row_labels[r];
    for (const auto& cell : cells[r]) {
      out << ',';
      switch (cell.kind) {
        case TableCell::Kind::Value: out << fmt(cell.value, 10); break;
        case TableCell::Kind::Unbounded: out << "unbounded"; break;
        case TableCell::Kind::Nan: out << "nan"; break;
      }
    }
    out << '\n';
  }
}

int default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

RelaxationVector table_rates(RelaxationType type, int m, int n) {
  const double se = rate_from_exponent(m);
  const double other = rate_from_exponent(n);
  switch (type) {
    case RelaxationType::Trt1: return trt1(se, other);
    case RelaxationType::Trt2: return trt2(se, other);
    case RelaxationType::Bgk: return RelaxationVector::bgk(se);
  }
  return trt1(se, other);
}

TableResult linear_table(const std::vector<int>& m_range, const std::vector<int>& n_range,
                         const LinearTableSpec& spec, int threads) {
  if (m_range.empty() || n_range.empty()) {
    throw std::invalid_argument("linear_table: empty sweep range");
  }
  const auto start = std::chrono::steady_clock::now();
  TableResult table;
  table.title = "highest stable |V| (lambda units) along theta";
  table.corner = "n\\m";
  for (int n : n_range) table.row_labels.push_back(std::to_string(n));
  for (int m : m_range) table.col_labels.push_back(std::to_string(m));
  table.cells.assign(n_range.size(), std::vector<TableCell>(m_range.size()));
  table.metadata = {
      {"experiment", "stability table"},
      {"family", to_string(spec.basis.family)},
      {"alpha", fmt(spec.basis.alpha, 10)},
      {"equilibrium", to_string(spec.kind)},
      {"relaxation.type", to_string(spec.relaxation)},
      {"relaxation.rates", "s_e = 2 - 2^-m; s_nu/s_p = 2 - 2^-n"},
      {"utilde.policy", to_string(spec.shift)},
      {"theta", fmt(spec.theta, 10)},
      {"tol", fmt(spec.scan.tol, 10)},
      {"kgrid", std::to_string(spec.scan.kgrid_n)},
      {"m_range", join_numbers(m_range)},
      {"n_range", join_numbers(n_range)},
      {"version", kCodeVersion},
  };
  const std::size_t cols = m_range.size();
  parallel_for(n_range.size() * cols, threads, [&](std::size_t idx) {
    const std::size_t r = idx / cols;
    const std::size_t c = idx % cols;
    StabilityProblem prob;
    prob.basis = spec.basis;
    prob.kind = spec.kind;
    prob.shift = spec.shift;
    prob.theta = spec.theta;
    try {
      prob.s = table_rates(spec.relaxation, m_range[c], n_range[r]);
      table.cells[r][c] = TableCell::of(max_stable_speed(prob, spec.scan));
    } catch (const std::exception&) {
      table.cells[r][c] = TableCell::nan();
    }
  });
  table.runtime_seconds = elapsed_since(start);
  return table;
}

std::string AlphaCurve::label() const {
  std::ostringstream out;
  out << to_string(relaxation) << "(m=" << m << ";n=" << n << ")/" << to_string(family) << "/utilde="
      << to_string(shift) << "/" << to_string(kind);
  return out.str();
}

TableResult alpha_sweep(const std::vector<double>& alphas, const std::vector<AlphaCurve>& curves,
                        const SpeedScan& scan, int threads) {
  if (alphas.empty() || curves.empty()) {
    throw std::invalid_argument("alpha_sweep: empty sweep range");
  }
  const auto start = std::chrono::steady_clock::now();
  TableResult table;
  table.title = "highest stable |V| (lambda units) as a function of alpha";
  table.corner = "alpha";
  for (double a : alphas) table.row_labels.push_back(fmt(a, 10));
  for (const auto& c : curves) table.col_labels.push_back(c.label());
  table.cells.assign(alphas.size(), std::vector<TableCell>(curves.size()));
  table.metadata = {
      {"experiment", "stability alpha-sweep"},
      {"alphas", join_numbers(alphas)},
      {"curves", join(table.col_labels)},
      {"theta", "0"},
      {"tol", fmt(scan.tol, 10)},
      {"kgrid", std::to_string(scan.kgrid_n)},
      {"version", kCodeVersion},
  };
  const std::size_t cols = curves.size();
  parallel_for(alphas.size() * cols, threads, [&](std::size_t idx) {
    const std::size_t r = idx / cols;
    const std::size_t c = idx % cols;
    const AlphaCurve& curve = curves[c];
    StabilityProblem prob;
    prob.basis = MomentBasis{curve.family, alphas[r]};
    prob.kind = curve.kind;
    prob.shift = curve.shift;
    try {
      prob.s = table_rates(curve.relaxation, curve.m, curve.n);
      table.cells[r][c] = TableCell::of(max_stable_speed(prob, scan));
    } catch (const std::exception&) {
      table.cells[r][c] = TableCell::nan();
    }
  });
  table.runtime_seconds = elapsed_since(start);
  return table;
}

std::vector<KhVariant> default_kh_variants() {
  const auto t2 = EquilibriumKind::Truncated2;
  const auto p4 = EquilibriumKind::Product4;
  return {
      {"alpha=0 utilde=0 truncated2", MomentBasis{Family::A, 0.0}, t2, UtildePolicy::zero()},
      {"alpha=0 utilde=u truncated2", MomentBasis{Family::A, 0.0}, t2, UtildePolicy::fluid()},
      {"alpha=0 utilde=0 product4", MomentBasis{Family::A, 0.0}, p4, UtildePolicy::zero()},
      {"alpha=0 utilde=u product4", MomentBasis{Family::A, 0.0}, p4, UtildePolicy::fluid()},
      {"alpha=1 utilde=0 truncated2", MomentBasis{Family::A, 1.0}, t2, UtildePolicy::zero()},
      {"alpha=1 utilde=u truncated2", MomentBasis{Family::A, 1.0}, t2, UtildePolicy::fluid()},
  };
}

double shear_speed(double mach, double lambda) { return mach * lambda / std::sqrt(3.0); }

double lambda_for_unit_shear(double mach) { return std::sqrt(3.0) / mach; }

SchemeConfig kh_scheme(const KhVariant& variant, int n, double mu, double nu, const KhSettings& settings) {
  const Grid grid = Grid::unit_square(n, n, settings.lambda);
  const RatePair rates = viscosity_to_rates(mu, nu, settings.lambda, grid.dt);
  return SchemeConfig::make(variant.basis, variant.kind, trt1(rates.s_e, rates.s_nu), variant.policy, n,
                            settings.lambda);
}

bool kh_probe(const KhVariant& variant, int n, double mach, double nu, const KhSettings& settings) {
  const SchemeConfig cfg = kh_scheme(variant, n, settings.mu, nu, settings);
  const KelvinHelmholtz setup{shear_speed(mach, settings.lambda), settings.k, settings.delta};
  FieldState state = init_kelvin_helmholtz(cfg.grid, setup, cfg.kind, cfg.consts, cfg.vset);
  return run_until(state, cfg, settings.iterations, settings.u_max_factor * settings.lambda).stable();
}

namespace {

// Largest index i in [1, cap] with stable(i), assuming stable(0). Returns 0
// if stable(1) fails.
long search_largest(long cap, SearchMode mode, const std::function<bool(long)>& stable) {
  if (mode == SearchMode::Scan) {
    long last = 0;
    for (long i = 1; i <= cap; ++i) {
      if (!stable(i)) break;
      last = i;
    }
    return last;
  }
  if (stable(cap)) return cap;
  long lo = 0;
  long hi = cap;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (stable(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

double kh_max_mach(const KhVariant& variant, int n, const KhSettings& settings) {
  const long cap = std::lround(settings.ma_cap / settings.ma_step);
  const long best = search_largest(cap, settings.search, [&](long i) {
    return kh_probe(variant, n, static_cast<double>(i) * settings.ma_step, settings.nu, settings);
  });
  return static_cast<double>(best) * settings.ma_step;
}

TableCell kh_max_reynolds(const KhVariant& variant, int n, const KhSettings& settings) {
  if (kh_probe(variant, n, settings.re_ma, 0.0, settings)) {
    return TableCell::unbounded();
  }
  const long cap = std::lround(settings.re_cap / settings.re_step);
  const long best = search_largest(cap, settings.search, [&](long i) {
    return kh_probe(variant, n, settings.re_ma, 1.0 / (static_cast<double>(i) * settings.re_step), settings);
  });
  return TableCell::of(static_cast<double>(best) * settings.re_step);
}

namespace {

std::vector<std::pair<std::string, std::string>> kh_metadata(const std::string& experiment,
                                                             const KhSettings& s) {
  return {
      {"experiment", experiment},
      {"relaxation.type", "trt1"},
      {"viscosity.mu", fmt(s.mu, 10)},
      {"viscosity.nu", fmt(s.nu, 10)},
      {"lambda", fmt(s.lambda, 10)},
      {"kh.k", fmt(s.k, 10)},
      {"kh.delta", fmt(s.delta, 10)},
      {"iterations", std::to_string(s.iterations)},
      {"u_max", fmt(s.u_max_factor, 10) + "*lambda"},
      {"search", s.search == SearchMode::Bisect ? "bisect" : "scan"},
      {"version", kCodeVersion},
  };
}

std::string variant_description(const std::vector<KhVariant>& variants) {
  std::vector<std::string> items;
  for (const auto& v : variants) {
    items.push_back(v.label + " [family=" + to_string(v.basis.family) + " alpha=" + fmt(v.basis.alpha) +
                    " equilibrium=" + to_string(v.kind) + " utilde=" + to_string(v.policy) + "]");
  }
  return join(items);
}

std::string mesh_label(int n) { return "1/" + std::to_string(n); }

}  // namespace

TableResult kh_ma_scan(const std::vector<int>& meshes, const std::vector<KhVariant>& variants,
                       const KhSettings& settings, int threads) {
  if (meshes.empty() || variants.empty()) throw std::invalid_argument("kh_ma_scan: empty sweep range");
  const auto start = std::chrono::steady_clock::now();
  TableResult table;
  table.title = "maximum stable Ma according to the mesh";
  table.corner = "variant\\dx";
  for (const auto& v : variants) table.row_labels.push_back(v.label);
  for (int n : meshes) table.col_labels.push_back(mesh_label(n));
  table.cells.assign(variants.size(), std::vector<TableCell>(meshes.size()));
  table.metadata = kh_metadata("kh scan-ma", settings);
  table.metadata.emplace_back("ma_step", fmt(settings.ma_step, 10));
  table.metadata.emplace_back("ma_cap", fmt(settings.ma_cap, 10));
  table.metadata.emplace_back("meshes", join_numbers(meshes));
  table.metadata.emplace_back("variants", variant_description(variants));
  const std::size_t cols = meshes.size();
  parallel_for(variants.size() * cols, threads, [&](std::size_t idx) {
    const std::size_t r = idx / cols;
    const std::size_t c = idx % cols;
    try {
      table.cells[r][c] = TableCell::of(kh_max_mach(variants[r], meshes[c], settings));
    } catch (const std::exception&) {
      table.cells[r][c] = TableCell::nan();
    }
  });
  table.runtime_seconds = elapsed_since(start);
  return table;
}

TableResult kh_re_scan(const std::vector<int>& meshes, const std::vector<KhVariant>& variants,
                       const KhSettings& settings, int threads) {
  if (meshes.empty() || variants.empty()) throw std::invalid_argument("kh_re_scan: empty sweep range");
  const auto start = std::chrono::steady_clock::now();
  TableResult table;
  table.title = "maximum stable Reynolds number according to the mesh";
  table.corner = "variant\\dx";
  for (const auto& v : variants) table.row_labels.push_back(v.label);
  for (int n : meshes) table.col_labels.push_back(mesh_label(n));
  table.cells.assign(variants.size(), std::vector<TableCell>(meshes.size()));
  table.metadata = kh_metadata("kh scan-re", settings);
  table.metadata.emplace_back("mach", fmt(settings.re_ma, 10));
  table.metadata.emplace_back("re_step", fmt(settings.re_step, 10));
  table.metadata.emplace_back("re_cap", fmt(settings.re_cap, 10));
  table.metadata.emplace_back("meshes", join_numbers(meshes));
  table.metadata.emplace_back("variants", variant_description(variants));
  const std::size_t cols = meshes.size();
  parallel_for(variants.size() * cols, threads, [&](std::size_t idx) {
    const std::size_t r = idx / cols;
    const std::size_t c = idx % cols;
    try {
      table.cells[r][c] = kh_max_reynolds(variants[r], meshes[c], settings);
    } catch (const std::exception&) {
      table.cells[r][c] = TableCell::nan();
    }
  });
  table.runtime_seconds = elapsed_since(start);
  return table;
}

TableResult kh_utilde_scan(const std::vector<double>& scales, const std::vector<KhVariant>& variants, int n,
                           const KhSettings& settings, int threads) {
  if (scales.empty() || variants.empty()) throw std::invalid_argument("kh_utilde_scan: empty sweep range");
  const auto start = std::chrono::steady_clock::now();
  TableResult table;
  table.title = "maximum stable Ma according to utilde = c u";
  table.corner = "variant\\c";
  for (const auto& v : variants) table.row_labels.push_back(v.label);
  for (double c : scales) table.col_labels.push_back(fmt(c));
  table.cells.assign(variants.size(), std::vector<TableCell>(scales.size()));
  table.metadata = kh_metadata("kh scan-utilde", settings);
  table.metadata.emplace_back("ma_step", fmt(settings.ma_step, 10));
  table.metadata.emplace_back("ma_cap", fmt(settings.ma_cap, 10));
  table.metadata.emplace_back("grid.n", std::to_string(n));
  table.metadata.emplace_back("scales", join_numbers(scales));
  table.metadata.emplace_back("variants", variant_description(variants));
  const std::size_t cols = scales.size();
  parallel_for(variants.size() * cols, threads, [&](std::size_t idx) {
    const std::size_t r = idx / cols;
    const std::size_t c = idx % cols;
    KhVariant variant = variants[r];
    variant.policy = UtildePolicy::scaled_fluid(scales[c]);
    try {
      table.cells[r][c] = TableCell::of(kh_max_mach(variant, n, settings));
    } catch (const std::exception&) {
      table.cells[r][c] = TableCell::nan();
    }
  });
  table.runtime_seconds = elapsed_since(start);
  return table;
}

TableResult rate_header(const std::vector<int>& meshes, const KhSettings& settings) {
  TableResult table;
  table.title = "relaxation rates from (mu, nu) per mesh";
  table.corner = "rate\\dx";
  table.row_labels = {"s_e", "s_nu"};
  for (int n : meshes) table.col_labels.push_back(mesh_label(n));
  table.cells.assign(2, std::vector<TableCell>(meshes.size()));
  table.metadata = kh_metadata("kh rates", settings);
  table.metadata.emplace_back("meshes", join_numbers(meshes));
  for (std::size_t c = 0; c < meshes.size(); ++c) {
    const Grid grid = Grid::unit_square(meshes[c], meshes[c], settings.lambda);
    const RatePair r = viscosity_to_rates(settings.mu, settings.nu, settings.lambda, grid.dt);
    table.cells[0][c] = TableCell::of(r.s_e);
    table.cells[1][c] = TableCell::of(r.s_nu);
  }
  return table;
}

VorticityRun kh_vorticity_run(double mach, int n, const KhVariant& variant, const KhSettings& settings,
                              const std::vector<double>& dump_times, const std::string& prefix) {
  const SchemeConfig cfg = kh_scheme(variant, n, settings.mu, settings.nu, settings);
  const KelvinHelmholtz setup{shear_speed(mach, settings.lambda), settings.k, settings.delta};
  FieldState initial = init_kelvin_helmholtz(cfg.grid, setup, cfg.kind, cfg.consts, cfg.vset);

  std::vector<long> dump_iters;
  for (double t : dump_times) {
    if (!(t >= 0.0)) throw std::invalid_argument("kh_vorticity_run: dump times must be non-negative");
    dump_iters.push_back(std::lround(t / cfg.grid.dt));
  }
  std::sort(dump_iters.begin(), dump_iters.end());
  dump_iters.erase(std::unique(dump_iters.begin(), dump_iters.end()), dump_iters.end());

  VorticityRun result;
  const double u_max = settings.u_max_factor * settings.lambda;
  Simulation sim(cfg, std::move(initial));
  std::size_t next = 0;
  const long last = dump_iters.empty() ? 0 : dump_iters.back();
  result.outcome = RunOutcome::stable_after(last);
  for (long it = 0;; ++it) {
    while (next < dump_iters.size() && dump_iters[next] == it) {
      result.files.push_back(write_field_csv(prefix, sim.state(), cfg.vset).string());
      ++next;
    }
    if (it >= last) break;
    if (auto bad = sim.step(u_max)) {
      result.outcome = RunOutcome::blew_up(it, *bad);
      break;
    }
  }
  return result;
}

}  // namespace rvlbm
