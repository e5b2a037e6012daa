#pragma once

// Derived mechanical fields, line sampling ahead of the crack tip, error
// norms against a known solution, and the CSV / VTU / JSON writers.

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpcrack/adaptivity.hpp"
#include "hpcrack/constitutive.hpp"
#include "hpcrack/hp_space.hpp"

namespace hpcrack {

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct LineSample
{
  double x = 0.0;
  StressStrain average;
  StressStrain below;  // evaluated at y = 0.5 - delta
  StressStrain above;  // evaluated at y = 0.5 + delta
};

/// n_points uniformly spaced samples on {x0 <= x <= x1, y = 0.5}; each value
/// is the average of the one-sided limits at y = 0.5 -/+ delta.
std::vector<LineSample> sample_line(const HpSpace& space, const ModelParams& params, const SolutionField& phi,
                                    double x0, double x1, int n_points, double delta = 1e-8);

struct ErrorNorms
{
  double l2 = 0.0;
  double h1_semi = 0.0;
};

struct ExactSolution
{
  std::function<double(double, double)> value;
  std::function<Eigen::Vector2d(double, double)> gradient;
};

/// Errors by (p+3)-point Gauss quadrature on every active cell.
ErrorNorms error_norms(const HpSpace& space, const SolutionField& phi, const ExactSolution& exact);

/// Largest strain norm Psi1(r) r over the (p+2)^2 Gauss points of every cell.
double max_strain_norm(const HpSpace& space, const ModelParams& params, const SolutionField& phi);

/// Smallest energy density over the same points.
double min_energy_density(const HpSpace& space, const ModelParams& params, const SolutionField& phi);

struct FieldSnapshot
{
  std::vector<std::array<double, 2>> points;
  std::vector<double> phi;
  std::vector<std::array<std::size_t, 4>> cells;  // counter-clockwise corners
  std::vector<int> degree;
  std::vector<int> level;
  std::vector<double> eta;
};

FieldSnapshot make_snapshot(const HpSpace& space, const SolutionField& phi, const ErrorIndicators* eta = nullptr);

struct CycleRecord
{
  int cycle = 0;
  std::size_t n_cells = 0;
  std::size_t n_dofs = 0;
  double eta_total = 0.0;
  std::vector<double> newton_residuals;
  bool newton_converged = false;
  std::size_t n_h = 0;
  std::size_t n_p = 0;
  double wall_time = 0.0;  // seconds; not written to the log
};

/// Header x,T13,T23,eps13,eps23,W followed by side_lo_* and side_hi_* columns.
void write_csv(const std::vector<LineSample>& samples, const std::filesystem::path& path);
void write_vtu(const FieldSnapshot& snapshot, const std::filesystem::path& path);
void write_log(const std::vector<CycleRecord>& records, const std::filesystem::path& path);

/// Shortest round-trip decimal representation used by every text writer.
std::string format_double(double v);

}  // namespace hpcrack
