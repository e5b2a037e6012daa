#pragma once

// Damped Newton iteration with backtracking line search on the residual norm.

#include <stdexcept>
#include <string>
#include <vector>

#include "hpcrack/assembly.hpp"

namespace hpcrack {

struct NewtonConfig
{
  double tol_newton = 1e-10;  // absolute, Euclidean norm of the condensed residual
  int max_iters = 25;
  double gamma = 1e-4;         // sufficient-decrease constant
  double rho_min = 1.0 / 1024;  // smallest damping factor tried

  void validate() const;
};

struct NewtonRecord
{
  int iteration = 0;
  double residual_norm = 0.0;
  double rho = 1.0;
  /// False when no trial step met the sufficient-decrease test.
  bool sufficient_decrease = true;
};

struct NewtonLog
{
  double initial_residual = 0.0;
  std::vector<NewtonRecord> records;
  bool converged = false;

  [[nodiscard]] int iterations() const { return static_cast<int>(records.size()); }
  /// Initial residual followed by the residual after every accepted step.
  [[nodiscard]] std::vector<double> residual_history() const;
};

class LinearSolveError : public std::runtime_error
{
public:
  LinearSolveError(const std::string& what, double achieved) : std::runtime_error(what), achieved_residual(achieved) {}
  double achieved_residual;
};

class NonConvergenceError : public std::runtime_error
{
public:
  NonConvergenceError(const std::string& what, NewtonLog l) : std::runtime_error(what), log(std::move(l)) {}
  NewtonLog log;
};

/// Solves the symmetric positive definite system A x = b to
/// |A x - b| <= 1e-12 max(1, |b|), or throws LinearSolveError.
Eigen::VectorXd solve_linear(const SparseMatrix& a, const Eigen::VectorXd& b);

struct LineSearchResult
{
  double rho = 1.0;
  SolutionField phi;
  double residual_norm = 0.0;
  bool sufficient_decrease = true;
};

/// Tries rho = 1, 1/2, ..., rho_min and returns the first step with
/// |l(phi + rho delta)| < (1 - gamma rho) |l(phi)|. If none qualifies, the
/// trial with the smallest residual is returned and flagged.
LineSearchResult line_search(const HpSpace& space, const ModelParams& params, const SolutionField& phi,
                             const SolutionField& delta, double current_norm, double gamma, double rho_min);

struct NewtonResult
{
  SolutionField phi;
  NewtonLog log;
};

/// Throws NonConvergenceError (carrying the log) if the tolerance is not met
/// within max_iters or the iteration stagnates.
NewtonResult newton_solve(const HpSpace& space, const ModelParams& params, const SolutionField& phi0,
                          const NewtonConfig& config);

}  // namespace hpcrack
