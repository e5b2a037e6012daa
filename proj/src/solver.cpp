#include "hpcrack/solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

namespace hpcrack {

void NewtonConfig::validate() const
{
  if (!(tol_newton > 0.0))
    throw std::invalid_argument("tol_newton must be positive");
  if (max_iters < 1)
    throw std::invalid_argument("max_iters must be at least 1");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(rho_min > 0.0 && rho_min <= 1.0))
    throw std::invalid_argument("rho_min must lie in (0, 1]");
}

std::vector<double> NewtonLog::residual_history() const
{
  std::vector<double> out{initial_residual};
  for (const auto& r : records)
    out.push_back(r.residual_norm);
  return out;
}

Eigen::VectorXd solve_linear(const SparseMatrix& a, const Eigen::VectorXd& b)
{
  if (b.size() == 0)
    return b;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success)
    throw LinearSolveError("sparse LDL^T factorization failed", std::numeric_limits<double>::infinity());

  const double target = 1e-12 * std::max(1.0, b.norm());
  Eigen::VectorXd x = ldlt.solve(b);
  Eigen::VectorXd r = b - a * x;
  for (int sweep = 0; sweep < 3 && r.norm() > target; ++sweep) {
    x += ldlt.solve(r);
    r = b - a * x;
  }
  const double achieved = r.norm();
  if (!std::isfinite(achieved) || achieved > target)
    throw LinearSolveError("linear solve residual " + std::to_string(achieved) + " above tolerance " +
                               std::to_string(target),
                           achieved);
  return x;
}

LineSearchResult line_search(const HpSpace& space, const ModelParams& params, const SolutionField& phi,
                             const SolutionField& delta, double current_norm, double gamma, double rho_min)
{
  LineSearchResult best;
  best.residual_norm = std::numeric_limits<double>::infinity();
  for (double rho = 1.0; rho >= rho_min; rho *= 0.5) {
    SolutionField trial = phi + rho * delta;
    space.constraints().distribute(trial);
    const double norm = assemble_residual(space, params, trial).norm();
    if (norm < (1.0 - gamma * rho) * current_norm)
      return {rho, std::move(trial), norm, true};
    if (norm < best.residual_norm) {
      best.rho = rho;
      best.phi = std::move(trial);
      best.residual_norm = norm;
    }
  }
  best.sufficient_decrease = false;
  return best;
}

NewtonResult newton_solve(const HpSpace& space, const ModelParams& params, const SolutionField& phi0,
                          const NewtonConfig& config)
{
  config.validate();
  NewtonResult out;
  out.phi = phi0;
  space.constraints().distribute(out.phi);

  SparseMatrix jacobian;
  Eigen::VectorXd residual = assemble_residual(space, params, out.phi);
  double norm = residual.norm();
  out.log.initial_residual = norm;

  while (!(norm < config.tol_newton)) {
    if (out.log.iterations() >= config.max_iters)
      throw NonConvergenceError("Newton did not reach tolerance in " + std::to_string(config.max_iters) +
                                    " iterations (residual " + std::to_string(norm) + ")",
                                out.log);
    residual = assemble_system(space, params, out.phi, &jacobian);
    const Eigen::VectorXd step = solve_linear(jacobian, residual);
    const SolutionField delta = space.constraints().expand(step, true);
    LineSearchResult ls = line_search(space, params, out.phi, delta, norm, config.gamma, config.rho_min);

    NewtonRecord rec;
    rec.iteration = out.log.iterations() + 1;
    rec.residual_norm = ls.residual_norm;
    rec.rho = ls.rho;
    rec.sufficient_decrease = ls.sufficient_decrease;
    if (!(ls.residual_norm < norm)) {
      out.log.records.push_back(rec);
      throw NonConvergenceError("Newton stagnated at residual " + std::to_string(norm), out.log);
    }
    out.log.records.push_back(rec);
    out.phi = std::move(ls.phi);
    norm = ls.residual_norm;
  }
  out.log.converged = true;
  return out;
}

}  // namespace hpcrack
