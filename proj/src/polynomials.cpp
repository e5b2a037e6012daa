#include "hpcrack/polynomials.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hpcrack {

namespace {

void check_degree(int p)
{
  if (p < 1 || p > max_degree)
    throw std::invalid_argument("polynomial degree " + std::to_string(p) + " outside [1, 7]");
}

void check_points(int n)
{
  if (n < 1 || n > max_gauss_points)
    throw std::invalid_argument("Gauss rule size " + std::to_string(n) + " outside [1, 16]");
}

GaussRule1D make_gauss(int n)
{
  GaussRule1D rule;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, dpn] = legendre(n, x);
      const double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double dpn = legendre(n, x)[1];
    // Map from [-1,1] to [0,1]; store ascending.
    const auto k = static_cast<std::size_t>(n - 1 - i);
    rule.points[k] = 0.5 * (1.0 + x);
    rule.weights[k] = 1.0 / ((1.0 - x * x) * dpn * dpn);
  }
  return rule;
}

std::vector<double> make_gll(int p)
{
  std::vector<double> nodes(static_cast<std::size_t>(p + 1));
  nodes.front() = 0.0;
  nodes.back() = 1.0;
  // Interior nodes are the roots of P_p'. Newton on P_p' using
  // (1 - x^2) P_p'' = 2x P_p' - p(p+1) P_p.
  for (int i = 1; 2 * i <= p; ++i) {
    if (2 * i == p) {
      nodes[static_cast<std::size_t>(i)] = 0.5;
      continue;
    }
    double x = -std::cos(std::numbers::pi * i / p);
    for (int it = 0; it < 100; ++it) {
      const auto [pp, dp] = legendre(p, x);
      const double d2p = (2.0 * x * dp - p * (p + 1.0) * pp) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 + x);
    nodes[static_cast<std::size_t>(p - i)] = 1.0 - nodes[static_cast<std::size_t>(i)];
  }
  return nodes;
}

}  // namespace

std::array<double, 2> legendre(int k, double x)
{
  if (k == 0)
    return {1.0, 0.0};
  double p0 = 1.0;
  double p1 = x;
  double d0 = 0.0;
  double d1 = 1.0;
  for (int n = 2; n <= k; ++n) {
    const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
    const double d2 = d0 + (2.0 * n - 1.0) * p1;
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  return {p1, d1};
}

const GaussRule1D& gauss_1d(int n)
{
  check_points(n);
  static const auto rules = [] {
    std::array<GaussRule1D, max_gauss_points + 1> r{};
    for (int m = 1; m <= max_gauss_points; ++m)
      r[static_cast<std::size_t>(m)] = make_gauss(m);
    return r;
  }();
  return rules[static_cast<std::size_t>(n)];
}

const std::vector<double>& gll_nodes(int p)
{
  check_degree(p);
  static const auto table = [] {
    std::array<std::vector<double>, max_degree + 1> t{};
    for (int q = 1; q <= max_degree; ++q)
      t[static_cast<std::size_t>(q)] = make_gll(q);
    return t;
  }();
  return table[static_cast<std::size_t>(p)];
}

LagrangeBasis1D::LagrangeBasis1D(int p) : p_(p), nodes_(gll_nodes(p)), denominators_(nodes_.size(), 1.0)
{
  for (std::size_t k = 0; k < nodes_.size(); ++k)
    for (std::size_t m = 0; m < nodes_.size(); ++m)
      if (m != k)
        denominators_[k] *= nodes_[k] - nodes_[m];
}

double LagrangeBasis1D::value(int k, double s) const
{
  double num = 1.0;
  for (std::size_t m = 0; m < nodes_.size(); ++m)
    if (static_cast<int>(m) != k)
      num *= s - nodes_[m];
  return num / denominators_[static_cast<std::size_t>(k)];
}

double LagrangeBasis1D::derivative(int k, double s) const
{
  double sum = 0.0;
  for (std::size_t skip = 0; skip < nodes_.size(); ++skip) {
    if (static_cast<int>(skip) == k)
      continue;
    double prod = 1.0;
    for (std::size_t m = 0; m < nodes_.size(); ++m)
      if (static_cast<int>(m) != k && m != skip)
        prod *= s - nodes_[m];
    sum += prod;
  }
  return sum / denominators_[static_cast<std::size_t>(k)];
}

const LagrangeBasis1D& lagrange_basis(int p)
{
  check_degree(p);
  static const auto table = [] {
    std::vector<LagrangeBasis1D> t;
    t.reserve(max_degree + 1);
    t.emplace_back(1);  // placeholder for p = 0
    for (int q = 1; q <= max_degree; ++q)
      t.emplace_back(q);
    return t;
  }();
  return table[static_cast<std::size_t>(p)];
}

const Tabulation& tabulate(int p, int n)
{
  check_degree(p);
  check_points(n);
  static const auto table = [] {
    std::vector<Tabulation> t(static_cast<std::size_t>((max_degree + 1) * (max_gauss_points + 1)));
    for (int q = 1; q <= max_degree; ++q)
      for (int m = 1; m <= max_gauss_points; ++m) {
        const auto& basis = lagrange_basis(q);
        const auto& rule = gauss_1d(m);
        Tabulation& tab = t[static_cast<std::size_t>(q * (max_gauss_points + 1) + m)];
        for (double s : rule.points) {
          std::vector<double> v;
          std::vector<double> d;
          for (int k = 0; k <= q; ++k) {
            v.push_back(basis.value(k, s));
            d.push_back(basis.derivative(k, s));
          }
          tab.values.push_back(std::move(v));
          tab.derivatives.push_back(std::move(d));
        }
      }
    return t;
  }();
  return table[static_cast<std::size_t>(p * (max_gauss_points + 1) + n)];
}

}  // namespace hpcrack
