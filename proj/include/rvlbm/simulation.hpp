#ifndef RVLBM_SIMULATION_HPP_
#define RVLBM_SIMULATION_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rvlbm/collision.hpp"
#include "rvlbm/equilibrium.hpp"
#include "rvlbm/lattice.hpp"
#include "rvlbm/moment_basis.hpp"

namespace rvlbm {

struct SchemeConfig {
  MomentBasis basis;
  EquilibriumKind kind = EquilibriumKind::Truncated2;
  RelaxationVector s;
  UtildePolicy policy;
  Grid grid;
  VelocitySet vset;
  LatticeConstants consts;

  /// Builds a consistent config on an n x n unit-square grid.
  static SchemeConfig make(const MomentBasis& basis, EquilibriumKind kind, const RelaxationVector& s,
                           const UtildePolicy& policy, int n, double lambda);
};

/// Distributions on a periodic grid, nine contiguous values per cell.
struct FieldState {
  Grid grid;
  std::vector<double> f;
  double time = 0.0;
  long iteration = 0;

  explicit FieldState(const Grid& g) : grid(g), f(g.cells() * kQ, 0.0) {}

  double* cell(std::size_t c) { return f.data() + c * kQ; }
  const double* cell(std::size_t c) const { return f.data() + c * kQ; }

  double density(std::size_t c) const;
  Vec2 momentum(std::size_t c, const VelocitySet& vset) const;
  double total_mass() const;
  Vec2 total_momentum(const VelocitySet& vset) const;
};

enum class BlowupReason { NonFinite, NonPositiveDensity, VelocityLimit };
std::string to_string(BlowupReason reason);

struct RunOutcome {
  enum class Status { Stable, BlewUp };

  Status status = Status::Stable;
  long iterations = 0;
  BlowupReason reason = BlowupReason::NonFinite;

  bool stable() const { return status == Status::Stable; }
  static RunOutcome stable_after(long n) { return {Status::Stable, n, BlowupReason::NonFinite}; }
  static RunOutcome blew_up(long at, BlowupReason why) { return {Status::BlewUp, at, why}; }
};

/// Time stepper owning the state and a transport buffer.
class Simulation {
public:
  Simulation(SchemeConfig cfg, FieldState initial);

  /// Collision then periodic transport. Checks every cell before relaxing it
  /// and reports the first failure; the state is not usable after a report.
  std::optional<BlowupReason> step(double u_max);

  const FieldState& state() const { return state_; }
  const SchemeConfig& config() const { return cfg_; }

private:
  SchemeConfig cfg_;
  FieldState state_;
  std::vector<double> buffer_;
  CellCollider collider_;
};

/// One step without blow-up checks.
FieldState step(const FieldState& state, const SchemeConfig& cfg);

inline constexpr double kDefaultVelocityLimitFactor = 10.0;

/// Steps until n_iters or blow-up (non-finite f, rho <= 0 or |u| > u_max).
/// The final state is checked as well.
RunOutcome run_until(FieldState& state, const SchemeConfig& cfg, long n_iters, double u_max);
RunOutcome run_until(FieldState& state, const SchemeConfig& cfg, long n_iters);

/// Doubly periodic shear layers with a sinusoidal transverse perturbation.
struct KelvinHelmholtz {
  double U = 0.0;
  double k = 80.0;
  double delta = 0.05;

  Vec2 velocity(double x, double y) const;
};

FieldState init_kelvin_helmholtz(const Grid& grid, const KelvinHelmholtz& setup, EquilibriumKind kind,
                                 const LatticeConstants& consts, const VelocitySet& vset);

struct MacroFields {
  std::vector<double> rho;
  std::vector<double> ux;
  std::vector<double> uy;
};

MacroFields macroscopic(const FieldState& state, const VelocitySet& vset);

/// Centered periodic curl d_x u^y - d_y u^x of a velocity field.
std::vector<double> vorticity(const Grid& grid, const std::vector<double>& ux, const std::vector<double>& uy);
std::vector<double> vorticity(const FieldState& state, const VelocitySet& vset);

/// Writes x,y,rho,ux,uy,omega (cell centers) to `{prefix}_t{iteration}.csv`.
std::filesystem::path write_field_csv(const std::string& prefix, const FieldState& state,
                                      const VelocitySet& vset);

}  // namespace rvlbm

#endif  // RVLBM_SIMULATION_HPP_
