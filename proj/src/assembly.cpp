#include "hpcrack/assembly.hpp"

#include <vector>

#include <Eigen/Dense>

namespace hpcrack {

namespace {

/// Reference-cell tables for degree p with p+2 Gauss points per axis.
struct CellTables
{
  Eigen::MatrixXd values;  // quadrature point x local node
  Eigen::MatrixXd grad_s;
  Eigen::MatrixXd grad_t;
  Eigen::VectorXd weights;
  std::vector<std::array<double, 2>> points;
};

CellTables make_tables(int p)
{
  const int nq = p + 2;
  const auto& tab = tabulate(p, nq);
  const auto& rule = gauss_1d(nq);
  const int n = (p + 1) * (p + 1);
  CellTables t;
  t.values.resize(nq * nq, n);
  t.grad_s.resize(nq * nq, n);
  t.grad_t.resize(nq * nq, n);
  t.weights.resize(nq * nq);
  for (int qj = 0; qj < nq; ++qj)
    for (int qi = 0; qi < nq; ++qi) {
      const int q = qi + nq * qj;
      const auto ui = static_cast<std::size_t>(qi);
      const auto uj = static_cast<std::size_t>(qj);
      t.weights[q] = rule.weights[ui] * rule.weights[uj];
      t.points.push_back({rule.points[ui], rule.points[uj]});
      for (int b = 0; b <= p; ++b)
        for (int a = 0; a <= p; ++a) {
          const int k = a + (p + 1) * b;
          const auto ua = static_cast<std::size_t>(a);
          const auto ub = static_cast<std::size_t>(b);
          t.values(q, k) = tab.values[ui][ua] * tab.values[uj][ub];
          t.grad_s(q, k) = tab.derivatives[ui][ua] * tab.values[uj][ub];
          t.grad_t(q, k) = tab.values[ui][ua] * tab.derivatives[uj][ub];
        }
    }
  return t;
}

const CellTables& cell_tables(int p)
{
  static const auto all = [] {
    std::vector<CellTables> v(max_degree + 1);
    for (int q = 1; q <= max_degree; ++q)
      v[static_cast<std::size_t>(q)] = make_tables(q);
    return v;
  }();
  return all.at(static_cast<std::size_t>(p));
}

using Expansion = std::vector<std::pair<Eigen::Index, double>>;

/// Free-DOF expansion of every test function (homogeneous part only).
std::vector<Expansion> condensation(const ConstraintSet& cs)
{
  std::vector<Expansion> out(cs.n_dofs());
  for (std::size_t i = 0; i < cs.n_dofs(); ++i) {
    const auto dof = static_cast<DofIndex>(i);
    if (!cs.is_constrained(dof)) {
      out[i].emplace_back(cs.free_index(dof), 1.0);
      continue;
    }
    for (const auto& [m, w] : cs.entry(dof).masters)
      out[i].emplace_back(cs.free_index(m), w);
  }
  return out;
}

}  // namespace

Eigen::VectorXd assemble_system(const HpSpace& space, const ModelParams& params, const SolutionField& phi,
                                SparseMatrix* matrix)
{
  const auto& mesh = space.mesh();
  const auto& cs = space.constraints();
  const auto expansion = condensation(cs);
  const auto n_free = static_cast<Eigen::Index>(cs.n_free());

  Eigen::VectorXd residual = Eigen::VectorXd::Zero(n_free);
  std::vector<Eigen::Triplet<double>> triplets;

  for (CellId id : mesh.active()) {
    const int p = space.degree(id);
    const CellTables& t = cell_tables(p);
    const auto& local = space.dofs().cell_dofs[id.value];
    const auto n = static_cast<Eigen::Index>(local.size());
    const double h = mesh.h(id);
    const auto o = mesh.origin(id);

    Eigen::VectorXd c(n);
    for (Eigen::Index k = 0; k < n; ++k)
      c[k] = phi[local[static_cast<std::size_t>(k)]];

    const Eigen::MatrixXd gx_basis = t.grad_s / h;
    const Eigen::MatrixXd gy_basis = t.grad_t / h;
    const Eigen::VectorXd gx = gx_basis * c;
    const Eigen::VectorXd gy = gy_basis * c;
    const Eigen::Index nq = t.weights.size();

    Eigen::VectorXd flux_w(nq);
    Eigen::VectorXd d0(nq);
    Eigen::VectorXd d1(nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const double jxw = t.weights[q] * h * h;
      const FluxCoefficients f = flux_coeffs(Eigen::Vector2d(gx[q], gy[q]), params);
      flux_w[q] = jxw * f.c0;
      d0[q] = jxw * f.c0;
      d1[q] = jxw * f.c1;
    }

    Eigen::VectorXd r_local =
        -(gx_basis.transpose() * flux_w.cwiseProduct(gx) + gy_basis.transpose() * flux_w.cwiseProduct(gy));
    if (space.problem().source) {
      Eigen::VectorXd s(nq);
      for (Eigen::Index q = 0; q < nq; ++q) {
        const auto& pt = t.points[static_cast<std::size_t>(q)];
        s[q] = t.weights[q] * h * h * space.problem().source(o[0] + h * pt[0], o[1] + h * pt[1]);
      }
      r_local += t.values.transpose() * s;
    }

    for (Eigen::Index i = 0; i < n; ++i)
      for (const auto& [fi, wi] : expansion[local[static_cast<std::size_t>(i)]])
        residual[fi] += wi * r_local[i];

    if (matrix) {
      const Eigen::MatrixXd mixed = gx.asDiagonal() * gx_basis + gy.asDiagonal() * gy_basis;
      const Eigen::MatrixXd a_local = gx_basis.transpose() * d0.asDiagonal() * gx_basis +
                                      gy_basis.transpose() * d0.asDiagonal() * gy_basis +
                                      mixed.transpose() * d1.asDiagonal() * mixed;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& ei = expansion[local[static_cast<std::size_t>(i)]];
        for (Eigen::Index j = 0; j < n; ++j) {
          const double aij = a_local(i, j);
          for (const auto& [fi, wi] : ei)
            for (const auto& [fj, wj] : expansion[local[static_cast<std::size_t>(j)]])
              triplets.emplace_back(fi, fj, wi * wj * aij);
        }
      }
    }
  }

  if (matrix) {
    matrix->resize(n_free, n_free);
    matrix->setFromTriplets(triplets.begin(), triplets.end());
  }
  return residual;
}

Eigen::VectorXd assemble_residual(const HpSpace& space, const ModelParams& params, const SolutionField& phi)
{
  return assemble_system(space, params, phi, nullptr);
}

SparseMatrix assemble_jacobian(const HpSpace& space, const ModelParams& params, const SolutionField& phi)
{
  SparseMatrix a;
  assemble_system(space, params, phi, &a);
  return a;
}

LinearSystem assemble_linear_initial(const HpSpace& space, const ModelParams& params)
{
  ModelParams linear = params;
  linear.beta = 0.0;
  LinearSystem sys;
  sys.rhs = assemble_system(space, linear, space.lift(), &sys.matrix);
  return sys;
}

}  // namespace hpcrack
