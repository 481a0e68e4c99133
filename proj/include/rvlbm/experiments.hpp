#ifndef RVLBM_EXPERIMENTS_HPP_
#define RVLBM_EXPERIMENTS_HPP_

#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rvlbm/collision.hpp"
#include "rvlbm/simulation.hpp"
#include "rvlbm/von_neumann.hpp"

namespace rvlbm {

inline constexpr const char* kCodeVersion = "rvlbm 1.0.0";

struct TableCell {
  enum class Kind { Value, Unbounded, Nan };

  Kind kind = Kind::Nan;
  double value = 0.0;

  static TableCell of(double v) { return {Kind::Value, v}; }
  static TableCell unbounded() { return {Kind::Unbounded, 0.0}; }
  static TableCell nan() { return {Kind::Nan, 0.0}; }
  bool is_value() const { return kind == Kind::Value; }
};

struct TableResult {
  std::string title;
  /// Label of the first header cell, e.g. "n\\m" or "alpha".
  std::string corner;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<TableCell>> cells;
  std::vector<std::pair<std::string, std::string>> metadata;
  double runtime_seconds = 0.0;

  const TableCell& at(std::size_t row, std::size_t col) const { return cells.at(row).at(col); }
  /// FNV-1a over the metadata lines.
  std::string config_hash() const;
  /// `#`-prefixed metadata, header row, data rows. Runtime is omitted unless
  /// requested so that serial reruns are byte-identical.
  void write_csv(std::ostream& out, bool include_runtime = false) const;
};

/// Runs body(i) for i in [0, count) on up to `threads` workers; results are
/// collected by index so the output does not depend on scheduling.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);
int default_threads();

// ---------------------------------------------------------------- linear ---

struct LinearTableSpec {
  MomentBasis basis;
  EquilibriumKind kind = EquilibriumKind::Truncated2;
  LinearShift shift = LinearShift::Zero;
  RelaxationType relaxation = RelaxationType::Trt1;
  double theta = 0.0;
  SpeedScan scan;
};

/// Rates s_e = 2 - 2^{-m} and s_nu (or s_p) = 2 - 2^{-n}.
RelaxationVector table_rates(RelaxationType type, int m, int n);

/// Rows are n, columns m; each cell holds max_stable_speed.
TableResult linear_table(const std::vector<int>& m_range, const std::vector<int>& n_range,
                         const LinearTableSpec& spec, int threads);

struct AlphaCurve {
  int m = 0;
  int n = 0;
  RelaxationType relaxation = RelaxationType::Trt1;
  LinearShift shift = LinearShift::Zero;
  Family family = Family::A;
  EquilibriumKind kind = EquilibriumKind::Truncated2;

  std::string label() const;
};

/// Rows are alpha values, one column per curve.
TableResult alpha_sweep(const std::vector<double>& alphas, const std::vector<AlphaCurve>& curves,
                        const SpeedScan& scan, int threads);

// -------------------------------------------------------- Kelvin-Helmholtz ---

struct KhVariant {
  std::string label;
  MomentBasis basis;
  EquilibriumKind kind = EquilibriumKind::Truncated2;
  UtildePolicy policy;
};

/// The six schemes compared on the shear-layer benchmark.
std::vector<KhVariant> default_kh_variants();

enum class SearchMode { Scan, Bisect };

struct KhSettings {
  double mu = 0.0366;
  double nu = 1e-4;
  double lambda = 1.0;
  double k = 80.0;
  double delta = 0.05;
  long iterations = 2000;
  double u_max_factor = kDefaultVelocityLimitFactor;
  SearchMode search = SearchMode::Bisect;
  double ma_step = 0.01;
  double ma_cap = 1.2;
  double re_ma = 0.09;
  double re_step = 1000.0;
  double re_cap = 60000.0;
};

/// Shear speed for a Mach number: U = Ma * lambda / sqrt(3).
double shear_speed(double mach, double lambda);

/// Builds the TRT1 scheme from (mu, nu) on an n x n mesh.
SchemeConfig kh_scheme(const KhVariant& variant, int n, double mu, double nu, const KhSettings& settings);

/// One stability probe: true when the run survives settings.iterations steps.
bool kh_probe(const KhVariant& variant, int n, double mach, double nu, const KhSettings& settings);

/// Largest Ma on the ma_step grid that passes kh_probe; 0 when the first
/// grid value already fails.
double kh_max_mach(const KhVariant& variant, int n, const KhSettings& settings);

/// Largest Re = 1/nu on the re_step grid at Ma = re_ma, unbounded when nu = 0
/// (s_nu = 2) is stable.
TableCell kh_max_reynolds(const KhVariant& variant, int n, const KhSettings& settings);

/// Rows are variants, columns meshes.
TableResult kh_ma_scan(const std::vector<int>& meshes, const std::vector<KhVariant>& variants,
                       const KhSettings& settings, int threads);
TableResult kh_re_scan(const std::vector<int>& meshes, const std::vector<KhVariant>& variants,
                       const KhSettings& settings, int threads);
/// Rows are variants, columns the scale c of u~ = c u; the variants' own
/// policies are replaced.
TableResult kh_utilde_scan(const std::vector<double>& scales, const std::vector<KhVariant>& variants, int n,
                           const KhSettings& settings, int threads);

/// Header rows of the mesh tables: s_e and s_nu per mesh.
TableResult rate_header(const std::vector<int>& meshes, const KhSettings& settings);

struct VorticityRun {
  RunOutcome outcome;
  std::vector<std::string> files;
};

/// Runs the shear layer and dumps fields at the iterations nearest to
/// `dump_times`. A blow-up stops the run and keeps the dumps already written.
VorticityRun kh_vorticity_run(double mach, int n, const KhVariant& variant, const KhSettings& settings,
                              const std::vector<double>& dump_times, const std::string& prefix);

/// The lambda for which U = 1 at the given Mach number.
double lambda_for_unit_shear(double mach);

}  // namespace rvlbm

#endif  // RVLBM_EXPERIMENTS_HPP_
