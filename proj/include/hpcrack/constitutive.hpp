#pragma once

// Strain-limiting response for anti-plane shear written in terms of the
// stress potential u: T13 = du/dy, T23 = -du/dx and eps = Psi1(|T|) T with
//
//   Psi1(r) = 1 / (2 mu (1 + (beta r)^alpha)^(1/alpha)).
//
// All functions are pure and evaluated in a form that stays finite for large
// beta * r.

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Core>

namespace hpcrack {

struct ModelParams
{
  double mu = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  /// Gradient norm below which the rank-one Jacobian coefficient is zeroed.
  double eps_reg = 1e-12;

  void validate() const
  {
    if (!(mu > 0.0))
      throw std::invalid_argument("mu must be positive");
    if (!(alpha > 0.0))
      throw std::invalid_argument("alpha must be positive");
    if (!(beta >= 0.0))
      throw std::invalid_argument("beta must be non-negative");
    if (!(eps_reg > 0.0))
      throw std::invalid_argument("eps_reg must be positive");
  }
};

inline double psi1(double r, const ModelParams& m)
{
  const double x = m.beta * r;
  if (x == 0.0)
    return 0.5 / m.mu;
  // (1 + x^a)^(1/a), factored for x > 1 so that x^a cannot overflow.
  const double a = m.alpha;
  const double s = x <= 1.0 ? std::pow(1.0 + std::pow(x, a), 1.0 / a) : x * std::pow(1.0 + std::pow(x, -a), 1.0 / a);
  return 0.5 / (m.mu * s);
}

/// d Psi1 / dr. Diverges at r = 0 for alpha < 1.
inline double dpsi1(double r, const ModelParams& m)
{
  const double x = m.beta * r;
  if (m.beta == 0.0)
    return 0.0;
  const double a = m.alpha;
  if (x <= 1.0)
    return -m.beta * std::pow(x, a - 1.0) / (2.0 * m.mu * std::pow(1.0 + std::pow(x, a), 1.0 / a + 1.0));
  return -m.beta / (2.0 * m.mu * x * x * std::pow(1.0 + std::pow(x, -a), 1.0 / a + 1.0));
}

/// Coefficients of the linearised flux  c0 grad(w) + c1 (g . grad w) g.
struct FluxCoefficients
{
  double c0 = 0.0;
  double c1 = 0.0;
  double r = 0.0;
};

inline FluxCoefficients flux_coeffs(const Eigen::Vector2d& grad, const ModelParams& m)
{
  FluxCoefficients f;
  f.r = std::hypot(grad.x(), grad.y());
  f.c0 = psi1(f.r, m);
  // c1 r^2 -> 0 as r -> 0 for every alpha > 0.
  f.c1 = f.r < m.eps_reg ? 0.0 : dpsi1(f.r, m) / f.r;
  return f;
}

struct StressStrain
{
  double T13 = 0.0;
  double T23 = 0.0;
  double eps13 = 0.0;
  double eps23 = 0.0;
  double energy_density = 0.0;
};

/// Stress, strain and energy density T:eps from the potential gradient.
/// `pair_factor` counts the symmetric off-diagonal pairs of the contraction.
inline StressStrain stress_strain(const Eigen::Vector2d& grad_phi, const ModelParams& m, double pair_factor = 2.0)
{
  StressStrain out;
  out.T13 = grad_phi.y();
  out.T23 = -grad_phi.x();
  const double psi = psi1(std::hypot(grad_phi.x(), grad_phi.y()), m);
  out.eps13 = psi * out.T13;
  out.eps23 = psi * out.T23;
  out.energy_density = pair_factor * (out.T13 * out.eps13 + out.T23 * out.eps23);
  return out;
}

/// sup_r r Psi1(r) = 1 / (2 mu beta); infinite for the linear model.
inline double strain_bound(const ModelParams& m)
{
  if (m.beta == 0.0)
    return std::numeric_limits<double>::infinity();
  return 1.0 / (2.0 * m.mu * m.beta);
}

}  // namespace hpcrack
