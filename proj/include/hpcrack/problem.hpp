#pragma once

// Boundary value problems for the stress potential on the unit square.

#include <cmath>
#include <functional>
#include <numbers>

namespace hpcrack {

/// Part of the Dirichlet set a node lies on.
enum class DirichletPart { left, right, bottom, top, slit };

struct Problem
{
  /// Boundary value of the potential at (x, y) on the given part.
  std::function<double(double, double, DirichletPart)> dirichlet;
  /// Whether the segment {y = 1/2, 1/2 <= x <= 1} is a Dirichlet line.
  bool slit = false;
  /// Optional right-hand side s in  -div(Psi1(|grad u|) grad u) = s.
  std::function<double(double, double)> source;
};

/// Edge crack benchmark: u(0,y) = 1, u(1,y) = 0, u(x,0) = u(x,1) = 1 - x and
/// u = 0 on the slit.
inline Problem crack_problem()
{
  Problem p;
  p.slit = true;
  p.dirichlet = [](double x, double, DirichletPart part) {
    switch (part) {
      case DirichletPart::left: return 1.0;
      case DirichletPart::right: return 0.0;
      case DirichletPart::bottom:
      case DirichletPart::top: return 1.0 - x;
      case DirichletPart::slit: return 0.0;
    }
    return 0.0;
  };
  return p;
}

/// Same outer boundary data as the crack benchmark but without the slit. The
/// exact solution is 1 - x.
inline Problem unslit_problem()
{
  Problem p = crack_problem();
  p.slit = false;
  return p;
}

/// -Laplace(u) = 2 pi^2 sin(pi x) sin(pi y) with homogeneous data; the source
/// carries the 1/(2 mu) factor of the linear constitutive law.
inline Problem manufactured_problem(double mu)
{
  Problem p;
  p.dirichlet = [](double, double, DirichletPart) { return 0.0; };
  p.source = [mu](double x, double y) {
    constexpr double pi = std::numbers::pi;
    return 2.0 * pi * pi * std::sin(pi * x) * std::sin(pi * y) / (2.0 * mu);
  };
  return p;
}

}  // namespace hpcrack
