#pragma once

// The adaptive SOLVE -> ESTIMATE -> MARK -> REFINE loop and the three run
// modes exposed by the command line tool: the edge-crack benchmark, the
// manufactured-solution convergence study, and the (alpha, beta) sweep.

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpcrack/adaptivity.hpp"
#include "hpcrack/postproc.hpp"
#include "hpcrack/solver.hpp"

namespace hpcrack {

class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

enum class Mode { crack, manufactured, sweep };

Mode parse_mode(const std::string& name);
std::string to_string(Mode mode);

/// Environment variable that overrides the default output directory.
inline constexpr const char* output_dir_env = "HPCRACK_OUTPUT_DIR";

struct RunConfig
{
  Mode mode = Mode::crack;
  double alpha = 1.0;
  double beta = 1.0;
  double mu = 1.0;
  int max_cycles = 10;
  int p_init = 2;
  int p_max = 7;
  int max_level = 8;  // h-refinement levels above the initial 8 x 8 grid
  double theta_h = 0.2;
  double theta_p = 0.1;
  double tau_smooth = 0.15;
  double tol_newton = 1e-10;
  int max_newton_iters = 25;
  double tol_adapt = 0.0;  // 0 runs all cycles
  int n_samples = 200;
  bool write_vtu = true;
  std::filesystem::path output_dir = "output";
  std::vector<double> sweep_values = {0.5, 1.0, 2.0, 5.0, 10.0};

  /// Throws ConfigError with a message naming the offending field.
  void validate() const;

  [[nodiscard]] ModelParams model() const;
  [[nodiscard]] NewtonConfig newton() const;
  [[nodiscard]] MarkingParams marking() const;
};

/// Read-only view handed to a cycle observer after ESTIMATE and MARK.
struct CycleState
{
  int cycle;
  const HpSpace& space;
  const SolutionField& phi;
  const ErrorIndicators& eta;
  const RefinementPlan& plan;
  const NewtonLog& newton;
};

using CycleObserver = std::function<void(const CycleState&)>;

struct CrackRun
{
  std::vector<CycleRecord> records;
  std::optional<HpSpace> space;  // final space
  SolutionField phi;             // final converged solution
  std::vector<LineSample> profile;
  bool converged = false;
  std::string failure;
};

/// Runs the adaptive loop on the edge-crack problem. Newton failure ends the
/// run early with `converged == false`; artifacts written so far are kept.
CrackRun run_crack(const RunConfig& config, const CycleObserver& observer = {}, bool write_outputs = true);

struct ConvergenceRow
{
  int p = 1;
  double h = 0.0;
  std::size_t n_dofs = 0;
  double l2 = 0.0;
  double h1_semi = 0.0;
  double eta_total = 0.0;
  double rate_l2 = 0.0;  // NaN on the coarsest mesh
  double rate_h1 = 0.0;
  int newton_iterations = 0;
};

/// -Laplace u = 2 pi^2 sin(pi x) sin(pi y) on uniform meshes h = 1/8 .. 1/64
/// for p = 1, 2, 3.
std::vector<ConvergenceRow> run_manufactured(const RunConfig& config, bool write_outputs = true);

struct SweepPoint
{
  std::string family;  // "alpha" or "beta"
  double alpha = 1.0;
  double beta = 1.0;
  CrackRun run;
  bool ok = false;
  std::string error;
  /// Sample closest to the tip with x < 0.5.
  LineSample nearest_tip;
};

/// (alpha in values, beta = 1) followed by (alpha = 1, beta in values), mu = 1.
std::vector<SweepPoint> run_sweep(const RunConfig& config, bool write_outputs = true);

/// Summary rows sorted by (alpha, beta): alpha,beta,family,ok,T23,eps23,W.
void write_sweep_summary(const std::vector<SweepPoint>& points, const std::filesystem::path& path);

std::string short_number(double v);

}  // namespace hpcrack
