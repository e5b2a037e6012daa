#pragma once

// Residual and Jacobian of the quasilinear problem
//
//   find u:  (Psi1(|grad u|) grad u, grad v) = (s, v)   for all v in V_0
//
// condensed onto the free (unconstrained) DOFs of an HpSpace. The residual is
// l_u(v) = -(Psi1 grad u, grad v) + (s, v) and the Jacobian is the symmetric
// form a_u(w, v) = (c0 grad w, grad v) + (c1 (grad u . grad w), grad u . grad v),
// so that a Newton update solves a_u(du, v) = l_u(v).

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hpcrack/constitutive.hpp"
#include "hpcrack/hp_space.hpp"

namespace hpcrack {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct LinearSystem
{
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};

/// Condensed residual vector (length n_free). `phi` must be constraint-consistent.
Eigen::VectorXd assemble_residual(const HpSpace& space, const ModelParams& params, const SolutionField& phi);

/// Condensed Jacobian (n_free x n_free).
SparseMatrix assemble_jacobian(const HpSpace& space, const ModelParams& params, const SolutionField& phi);

/// Both at once; the matrix is skipped when `matrix` is null.
Eigen::VectorXd assemble_system(const HpSpace& space, const ModelParams& params, const SolutionField& phi,
                                SparseMatrix* matrix);

/// Linear (beta = 0) system for the correction of the Dirichlet lift. The
/// field lift() + expand(x) solves the linear problem.
LinearSystem assemble_linear_initial(const HpSpace& space, const ModelParams& params);

}  // namespace hpcrack
