#include "rvlbm/simulation.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rvlbm {

SchemeConfig SchemeConfig::make(const MomentBasis& basis, EquilibriumKind kind,
                                const RelaxationVector& s, const UtildePolicy& policy, int n,
                                double lambda) {
  SchemeConfig cfg;
  cfg.basis = basis;
  cfg.kind = kind;
  cfg.s = s;
  cfg.policy = policy;
  cfg.grid = Grid::unit_square(n, n, lambda);
  cfg.vset = d2q9(lambda);
  cfg.consts = LatticeConstants::d2q9(lambda);
  return cfg;
}

double FieldState::density(std::size_t c) const {
  const double* p = cell(c);
  double rho = 0.0;
  for (int j = 0; j < kQ; ++j) rho += p[j];
  return rho;
}

Vec2 FieldState::momentum(std::size_t c, const VelocitySet& vset) const {
  const double* p = cell(c);
  Vec2 q = Vec2::Zero();
  for (int j = 0; j < kQ; ++j) q += p[j] * vset.v[j];
  return q;
}

double FieldState::total_mass() const {
  double m = 0.0;
  for (double v : f) m += v;
  return m;
}

Vec2 FieldState::total_momentum(const VelocitySet& vset) const {
  Vec2 q = Vec2::Zero();
  for (std::size_t c = 0; c < grid.cells(); ++c) q += momentum(c, vset);
  return q;
}

std::string to_string(BlowupReason reason) {
  switch (reason) {
    case BlowupReason::NonFinite: return "non-finite value";
    case BlowupReason::NonPositiveDensity: return "density <= 0";
    case BlowupReason::VelocityLimit: return "|u| > u_max";
  }
  return "?";
}

namespace {

// Pull-streaming from `post` into `next`: next(x, j) = post(x - c_j, j).
void stream(const Grid& grid, const VelocitySet& vset, const std::vector<double>& post,
            std::vector<double>& next) {
  for (int j = 0; j < kQ; ++j) {
    const int cx = vset.c[static_cast<std::size_t>(j)][0];
    const int cy = vset.c[static_cast<std::size_t>(j)][1];
    for (int y = 0; y < grid.ny; ++y) {
      const int sy = grid.wrap_y(y - cy);
      const std::size_t row = grid.index(0, y);
      const std::size_t src_row = grid.index(0, sy);
      for (int x = 0; x < grid.nx; ++x) {
        const int sx = grid.wrap_x(x - cx);
        next[(row + static_cast<std::size_t>(x)) * kQ + j] =
            post[(src_row + static_cast<std::size_t>(sx)) * kQ + j];
      }
    }
  }
}

struct CellMacros {
  double rho;
  Vec2 u;
};

inline CellMacros cell_macros(const double* p, const VelocitySet& vset) {
  double rho = 0.0;
  double qx = 0.0;
  double qy = 0.0;
  for (int j = 0; j < kQ; ++j) {
    rho += p[j];
    qx += p[j] * vset.v[static_cast<std::size_t>(j)].x();
    qy += p[j] * vset.v[static_cast<std::size_t>(j)].y();
  }
  return {rho, Vec2(qx / rho, qy / rho)};
}

std::optional<BlowupReason> check_cell(const double* p, const CellMacros& m, double u_max) {
  for (int j = 0; j < kQ; ++j) {
    if (!std::isfinite(p[j])) return BlowupReason::NonFinite;
  }
  if (!(m.rho > 0.0)) return BlowupReason::NonPositiveDensity;
  if (!(m.u.squaredNorm() <= u_max * u_max)) return BlowupReason::VelocityLimit;
  return std::nullopt;
}

}  // namespace

Simulation::Simulation(SchemeConfig cfg, FieldState initial)
    : cfg_(std::move(cfg)),
      state_(std::move(initial)),
      buffer_(state_.f.size()),
      collider_(cfg_.basis, cfg_.vset, cfg_.consts, cfg_.s, cfg_.kind, cfg_.policy) {
  if (state_.grid.nx != cfg_.grid.nx || state_.grid.ny != cfg_.grid.ny) {
    throw std::invalid_argument("Simulation: state and config grids differ");
  }
}

std::optional<BlowupReason> Simulation::step(double u_max) {
  const std::size_t n = state_.grid.cells();
  std::optional<BlowupReason> failure;
  for (std::size_t c = 0; c < n; ++c) {
    double* p = state_.cell(c);
    const CellMacros m = cell_macros(p, cfg_.vset);
    if (auto bad = check_cell(p, m, u_max)) {
      failure = bad;
      break;
    }
    collider_.collide(p, m.rho, m.u);
  }
  stream(state_.grid, cfg_.vset, state_.f, buffer_);
  state_.f.swap(buffer_);
  state_.iteration += 1;
  state_.time += state_.grid.dt;
  return failure;
}

FieldState step(const FieldState& state, const SchemeConfig& cfg) {
  Simulation sim(cfg, state);
  sim.step(INFINITY);
  return sim.state();
}

RunOutcome run_until(FieldState& state, const SchemeConfig& cfg, long n_iters, double u_max) {
  if (n_iters < 1) {
    throw std::invalid_argument("run_until: n_iters must be at least 1");
  }
  Simulation sim(cfg, std::move(state));
  RunOutcome outcome = RunOutcome::stable_after(n_iters);
  for (long it = 0; it < n_iters; ++it) {
    if (auto bad = sim.step(u_max)) {
      outcome = RunOutcome::blew_up(it, *bad);
      break;
    }
  }
  state = sim.state();
  if (outcome.stable()) {
    for (std::size_t c = 0; c < state.grid.cells(); ++c) {
      const double* p = state.cell(c);
      if (auto bad = check_cell(p, cell_macros(p, cfg.vset), u_max)) {
        outcome = RunOutcome::blew_up(n_iters, *bad);
        break;
      }
    }
  }
  return outcome;
}

RunOutcome run_until(FieldState& state, const SchemeConfig& cfg, long n_iters) {
  return run_until(state, cfg, n_iters, kDefaultVelocityLimitFactor * cfg.vset.lambda);
}

Vec2 KelvinHelmholtz::velocity(double x, double y) const {
  const double ux = y <= 0.5 ? U * std::tanh(k * (y - 0.25)) : U * std::tanh(k * (0.75 - y));
  const double uy = U * delta * std::sin(2.0 * std::numbers::pi * (x + 0.25));
  return {ux, uy};
}

FieldState init_kelvin_helmholtz(const Grid& grid, const KelvinHelmholtz& setup, EquilibriumKind kind,
                                 const LatticeConstants& consts, const VelocitySet& vset) {
  if (!(setup.U >= 0.0)) {
    throw std::invalid_argument("init_kelvin_helmholtz: U must be non-negative");
  }
  FieldState state(grid);
  for (int j = 0; j < grid.ny; ++j) {
    const double y = (j + 0.5) * grid.dx;
    for (int i = 0; i < grid.nx; ++i) {
      const double x = (i + 0.5) * grid.dx;
      const Vec9 eq = feq(kind, 1.0, setup.velocity(x, y), consts, vset);
      Eigen::Map<Vec9>(state.cell(grid.index(i, j))) = eq;
    }
  }
  return state;
}

MacroFields macroscopic(const FieldState& state, const VelocitySet& vset) {
  const std::size_t n = state.grid.cells();
  MacroFields out{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t c = 0; c < n; ++c) {
    const CellMacros m = cell_macros(state.cell(c), vset);
    out.rho[c] = m.rho;
    out.ux[c] = m.u.x();
    out.uy[c] = m.u.y();
  }
  return out;
}

std::vector<double> vorticity(const Grid& grid, const std::vector<double>& ux,
                              const std::vector<double>& uy) {
  std::vector<double> omega(grid.cells());
  const double inv = 1.0 / (2.0 * grid.dx);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double duy_dx = uy[grid.index(grid.wrap_x(i + 1), j)] - uy[grid.index(grid.wrap_x(i - 1), j)];
      const double dux_dy = ux[grid.index(i, grid.wrap_y(j + 1))] - ux[grid.index(i, grid.wrap_y(j - 1))];
      omega[grid.index(i, j)] = (duy_dx - dux_dy) * inv;
    }
  }
  return omega;
}

std::vector<double> vorticity(const FieldState& state, const VelocitySet& vset) {
  const MacroFields m = macroscopic(state, vset);
  return vorticity(state.grid, m.ux, m.uy);
}

std::filesystem::path write_field_csv(const std::string& prefix, const FieldState& state,
                                      const VelocitySet& vset) {
  const std::filesystem::path path = prefix + "_t" + std::to_string(state.iteration) + ".csv";
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  const MacroFields m = macroscopic(state, vset);
  const std::vector<double> omega = vorticity(state.grid, m.ux, m.uy);
  out.precision(17);
  out << "x,y,rho,ux,uy,omega\n";
  const Grid& g = state.grid;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t c = g.index(i, j);
      out << (i + 0.5) * g.dx << ',' << (j + 0.5) * g.dx << ',' << m.rho[c] << ',' << m.ux[c] << ','
          << m.uy[c] << ',' << omega[c] << '\n';
    }
  }
  return path;
}

}  // namespace rvlbm
