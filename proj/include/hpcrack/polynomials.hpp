#pragma once

// One-dimensional building blocks on the unit interval [0, 1]: Gauss-Legendre
// rules, Gauss-Lobatto-Legendre nodes, nodal Lagrange bases on those nodes,
// and tabulations of the bases at quadrature points.

#include <array>
#include <vector>

namespace hpcrack {

inline constexpr int max_degree = 7;
inline constexpr int max_gauss_points = 16;

struct GaussRule1D
{
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [0,1], exact for degree 2n-1.
const GaussRule1D& gauss_1d(int n);

/// p+1 Gauss-Lobatto-Legendre nodes on [0,1], ascending, endpoints included.
const std::vector<double>& gll_nodes(int p);

/// Legendre polynomial P_k on [-1,1] and its derivative.
std::array<double, 2> legendre(int k, double x);

/// Interpolatory basis of degree p on the GLL nodes.
class LagrangeBasis1D
{
public:
  explicit LagrangeBasis1D(int p);

  [[nodiscard]] int degree() const { return p_; }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  [[nodiscard]] double value(int k, double s) const;
  [[nodiscard]] double derivative(int k, double s) const;

private:
  int p_;
  std::vector<double> nodes_;
  std::vector<double> denominators_;
};

const LagrangeBasis1D& lagrange_basis(int p);

/// Basis of degree p tabulated at the n-point Gauss rule: values[q][k], derivs[q][k].
struct Tabulation
{
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> derivatives;
};

const Tabulation& tabulate(int p, int n);

}  // namespace hpcrack
