#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Dense>

#include "hpcrack/adaptivity.hpp"
#include "hpcrack/solver.hpp"
#include "test_support.hpp"

using namespace hpcrack;
using hpcrack::testing::random_field;
using hpcrack::testing::random_hp_mesh;

namespace {

ModelParams params(double mu, double alpha, double beta)
{
  ModelParams m;
  m.mu = mu;
  m.alpha = alpha;
  m.beta = beta;
  return m;
}

Problem problem_from(std::function<double(double, double)> f)
{
  Problem p;
  p.dirichlet = [f](double x, double y, DirichletPart) { return f(x, y); };
  return p;
}

CellId at(const QuadMesh& mesh, int level, int i, int j) { return *mesh.find(level, i, j); }

ErrorIndicators indicators(const QuadMesh& mesh, const std::map<CellId, double>& values)
{
  ErrorIndicators e;
  e.eta.assign(mesh.cells().size(), 0.0);
  double total = 0.0;
  for (const auto& [id, v] : values) {
    e.eta[id.value] = v;
    total += v * v;
  }
  e.eta_total = std::sqrt(total);
  return e;
}

/// sigma computed by brute force: L2 projections onto monomial tensor spaces
/// with composite Simpson quadrature on a fine grid.
double sigma_oracle(const std::function<double(double, double)>& u, int p)
{
  const int n = 200;
  std::vector<double> x(n + 1);
  std::vector<double> w(n + 1);
  for (int k = 0; k <= n; ++k) {
    x[k] = static_cast<double>(k) / n;
    w[k] = (k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0)) / (3.0 * n);
  }
  auto residual_norm = [&](int q) {
    const int m = (q + 1) * (q + 1);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    auto basis = [q](double s, double t, int k) { return std::pow(s, k % (q + 1)) * std::pow(t, k / (q + 1)); };
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const double ww = w[i] * w[j];
        for (int a = 0; a < m; ++a) {
          rhs[a] += ww * u(x[i], x[j]) * basis(x[i], x[j], a);
          for (int b = 0; b < m; ++b)
            gram(a, b) += ww * basis(x[i], x[j], a) * basis(x[i], x[j], b);
        }
      }
    const Eigen::VectorXd c = gram.ldlt().solve(rhs);
    double err = 0.0;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        double proj = 0.0;
        for (int a = 0; a < m; ++a)
          proj += c[a] * basis(x[i], x[j], a);
        err += w[i] * w[j] * std::pow(u(x[i], x[j]) - proj, 2);
      }
    return std::sqrt(err);
  };
  return residual_norm(p - 1) / residual_norm(0);
}

}  // namespace

TEST(Kelly, ConstantFieldHasNoIndicator)
{
  const auto [mesh, degrees] = random_hp_mesh(1, 3, 1, 5);
  const HpSpace space(mesh, degrees, problem_from([](double, double) { return 2.0; }));
  const ErrorIndicators e = kelly_indicators(space, params(1, 1, 1), space.interpolate([](double, double) {
                                               return 2.0;
                                             }));
  EXPECT_LE(e.eta_total, 1e-13);
}

TEST(Kelly, GloballyLinearFieldHasNoIndicator)
{
  const QuadMesh mesh = QuadMesh::create_initial();
  const HpSpace uniform(mesh, DegreeMap(mesh, 1), unslit_problem());
  const auto f = [](double x, double) { return 1.0 - x; };
  EXPECT_LE(kelly_indicators(uniform, params(1, 1, 0), uniform.interpolate(f)).eta_total, 1e-13);

  const auto [hp_mesh, degrees] = random_hp_mesh(3, 4, 1, 6);
  const HpSpace hp(hp_mesh, degrees, unslit_problem());
  EXPECT_LE(kelly_indicators(hp, params(1, 2, 5), hp.interpolate(f)).eta_total, 1e-13);
}

TEST(Kelly, TotalIsRootSumOfSquares)
{
  const auto [mesh, degrees] = random_hp_mesh(5, 4, 1, 5);
  const HpSpace space(mesh, degrees, crack_problem());
  const ErrorIndicators e = kelly_indicators(space, params(1, 1, 1), random_field(space, 7));
  double sum = 0.0;
  for (CellId id : mesh.active())
    sum += e[id] * e[id];
  EXPECT_NEAR(e.eta_total * e.eta_total, sum, 1e-12 * sum);
  for (std::size_t k = 0; k < e.eta.size(); ++k) {
    if (!mesh.cells()[k].active) {
      EXPECT_EQ(e.eta[k], 0.0);
    }
  }
}

TEST(Kelly, SlitFacesDoNotContribute)
{
  // u = |y - 1/2| has a kink only along y = 1/2. With the slit that line is
  // ignored except ahead of the tip.
  const QuadMesh mesh = QuadMesh::create_initial();
  const auto f = [](double, double y) { return std::abs(y - 0.5); };
  Problem slit = problem_from(f);
  slit.slit = true;
  const HpSpace space(mesh, DegreeMap(mesh, 1), slit);
  const ErrorIndicators e = kelly_indicators(space, params(1, 1, 0), space.interpolate(f));
  for (CellId id : mesh.active()) {
    const Cell& c = mesh.cell(id);
    const bool ahead = (c.j == 3 || c.j == 4) && c.i < 4;
    if (ahead)
      EXPECT_GT(e[id], 0.0);
    else
      EXPECT_EQ(e[id], 0.0) << c.i << "," << c.j;
  }
}

TEST(Smoothness, Examples)
{
  const QuadMesh mesh = QuadMesh::create_uniform(1);
  const CellId cell = mesh.active()[0];
  const auto x = [](double s, double) { return s; };
  const HpSpace lin(mesh, DegreeMap(mesh, 2), problem_from(x));
  EXPECT_NEAR(smoothness_indicators(lin, lin.interpolate(x), {cell})[cell], 0.0, 1e-14);

  const auto one = [](double, double) { return 1.0; };
  const HpSpace cst(mesh, DegreeMap(mesh, 3), problem_from(one));
  EXPECT_EQ(smoothness_indicators(cst, cst.interpolate(one), {cell})[cell], 0.0);

  const HpSpace p1(mesh, DegreeMap(mesh, 1), problem_from(x));
  EXPECT_EQ(smoothness_indicators(p1, p1.interpolate(x), {cell})[cell], 0.0);
}

TEST(Smoothness, MatchesBruteForceProjection)
{
  const QuadMesh mesh = QuadMesh::create_uniform(1);
  const CellId cell = mesh.active()[0];
  const auto bubble = [](double s, double t) { return s * t * (1 - s) * (1 - t); };
  const HpSpace space(mesh, DegreeMap(mesh, 2), problem_from(bubble));
  const double sigma = smoothness_indicators(space, space.interpolate(bubble), {cell})[cell];
  EXPECT_NEAR(sigma, sigma_oracle(bubble, 2), 1e-8);

  const auto cubic = [](double s, double t) { return s * s * s - 2 * s * t * t + t; };
  const HpSpace space3(mesh, DegreeMap(mesh, 3), problem_from(cubic));
  const double sigma3 = smoothness_indicators(space3, space3.interpolate(cubic), {cell})[cell];
  EXPECT_NEAR(sigma3, sigma_oracle(cubic, 3), 1e-8);
}

TEST(Smoothness, RatioStaysInUnitInterval)
{
  const auto [mesh, degrees] = random_hp_mesh(4, 3, 1, 7);
  const HpSpace space(mesh, degrees, crack_problem());
  const SmoothnessIndicators s = smoothness_indicators(space, random_field(space, 3), mesh.active());
  for (CellId id : mesh.active()) {
    EXPECT_GE(s[id], 0.0);
    EXPECT_LE(s[id], 1.0 + 1e-12);
  }
}

TEST(Marking, DorflerExample)
{
  const QuadMesh mesh = QuadMesh::create_initial();
  const HpSpace space(mesh, DegreeMap(mesh, 1), crack_problem());
  const auto ids = mesh.active();
  const ErrorIndicators e = indicators(mesh, {{ids[10], 3.0}, {ids[3], 2.0}, {ids[5], 1.0}, {ids[6], 1.0},
                                              {ids[40], 1.0}});
  MarkingParams mp;
  mp.theta_h = 0.3;
  mp.theta_p = 0.2;
  SmoothnessIndicators sigma;
  sigma.sigma.assign(mesh.cells().size(), 0.0);
  const RefinementPlan plan = mark(space, e, sigma, mp);
  EXPECT_EQ(plan.h_set, std::set<CellId>{ids[10]});
  EXPECT_TRUE(plan.p_set.empty());
}

TEST(Marking, RoutingRules)
{
  const QuadMesh mesh = QuadMesh::create_initial();
  DegreeMap degrees(mesh, 3);
  const auto ids = mesh.active();
  degrees.set(ids[1], 7);
  const HpSpace space(mesh, degrees, crack_problem());
  const ErrorIndicators e = indicators(mesh, {{ids[0], 5.0}, {ids[1], 5.0}, {ids[2], 5.0}, {ids[9], 0.1}});
  SmoothnessIndicators sigma;
  sigma.sigma.assign(mesh.cells().size(), 0.0);
  sigma.sigma[ids[0].value] = 1.0;
  sigma.sigma[ids[1].value] = 1.0;
  sigma.sigma[ids[2].value] = 0.1;
  const RefinementPlan plan = mark(space, e, sigma, MarkingParams{});
  EXPECT_EQ(plan.p_set, std::set<CellId>{ids[0]});
  EXPECT_EQ(plan.h_set, (std::set<CellId>{ids[1], ids[2]}));

  // With h-refinement capped at level 0 the smooth cell goes to p instead.
  MarkingParams capped;
  capped.max_level = 0;
  const RefinementPlan cap_plan = mark(space, e, sigma, capped);
  EXPECT_EQ(cap_plan.p_set, (std::set<CellId>{ids[0], ids[2]}));
  EXPECT_TRUE(cap_plan.h_set.empty());
}

TEST(Marking, FlaggedSetIsMinimalPrefix)
{
  const auto [mesh, degrees] = random_hp_mesh(6, 3, 1, 4);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::map<CellId, double> values;
  for (CellId id : mesh.active())
    values[id] = u(rng);
  const ErrorIndicators e = indicators(mesh, values);
  for (double fraction : {0.1, 0.3, 0.6, 0.9}) {
    const auto flagged = bulk_flag(mesh, e, fraction, 0.0);
    double sum = 0.0;
    for (CellId id : flagged)
      sum += e[id] * e[id];
    const double target = fraction * fraction * e.eta_total * e.eta_total;
    EXPECT_GE(sum, target);
    EXPECT_LT(sum - e[flagged.back()] * e[flagged.back()], target);
    for (std::size_t k = 1; k < flagged.size(); ++k)
      EXPECT_GE(e[flagged[k - 1]], e[flagged[k]]);
  }
}

TEST(Marking, TiedIndicatorsAreMarkedTogether)
{
  const QuadMesh mesh = QuadMesh::create_initial();
  const auto ids = mesh.active();
  const ErrorIndicators e = indicators(mesh, {{ids[0], 2.0}, {ids[1], 2.0 * (1 + 1e-9)}, {ids[2], 1.0}});
  EXPECT_EQ(bulk_flag(mesh, e, 0.5, 1e-6).size(), 2u);
  EXPECT_EQ(bulk_flag(mesh, e, 0.5, 0.0).size(), 1u);
}

TEST(Marking, ValidationRejectsLargeFractions)
{
  MarkingParams mp;
  mp.theta_h = 0.6;
  mp.theta_p = 0.4;
  EXPECT_THROW(mp.validate(), std::invalid_argument);
}

TEST(Execute, EmptyPlanKeepsSpace)
{
  const auto [mesh, degrees] = random_hp_mesh(2, 3, 1, 4);
  const auto [m2, d2] = execute(mesh, degrees, RefinementPlan{});
  EXPECT_EQ(m2.active(), mesh.active());
  const HpSpace a(mesh, degrees, crack_problem());
  const HpSpace b(m2, d2, crack_problem());
  EXPECT_EQ(a.dofs(), b.dofs());
}

TEST(Execute, DegreeIncreaseAndInheritance)
{
  const QuadMesh mesh = QuadMesh::create_initial();
  const DegreeMap degrees(mesh, 1);
  RefinementPlan plan;
  plan.p_set.insert(at(mesh, 0, 2, 5));
  const auto [m1, d1] = execute(mesh, degrees, plan);
  EXPECT_EQ(d1[at(m1, 0, 2, 5)], 2);
  EXPECT_EQ(HpSpace(m1, d1, crack_problem()).n_dofs(), 86u);

  RefinementPlan split;
  split.h_set.insert(at(m1, 0, 2, 5));
  const auto [m2, d2] = execute(m1, d1, split);
  for (CellId c : *m2.cell(at(m2, 0, 2, 5)).children)
    EXPECT_EQ(d2[c], 2);
}

TEST(Transfer, NestedSpacesReproduceField)
{
  const auto [mesh, degrees] = random_hp_mesh(13, 3, 1, 5);
  const HpSpace old_space(mesh, degrees, crack_problem());
  const SolutionField phi = random_field(old_space, 5);
  std::mt19937 rng(2);
  for (int which = 0; which < 2; ++which) {
    RefinementPlan plan;
    std::uniform_int_distribution<std::size_t> pick(0, mesh.n_active() - 1);
    for (int k = 0; k < 6; ++k) {
      const CellId id = mesh.active()[pick(rng)];
      if (which == 0 && degrees[id] < 7)
        plan.p_set.insert(id);
      else if (which == 1)
        plan.h_set.insert(id);
    }
    const auto [m2, d2] = execute(mesh, degrees, plan);
    const HpSpace new_space(m2, d2, crack_problem());
    const SolutionField moved = transfer(old_space, phi, new_space);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
      const double x = u(rng);
      const double y = u(rng);
      EXPECT_NEAR(new_space.evaluate_at(moved, x, y).value, old_space.evaluate_at(phi, x, y).value, 1e-12);
    }
    for (const auto& [dof, e] : new_space.constraints().entries()) {
      if (e.dirichlet) {
        EXPECT_EQ(moved[dof], e.inhomogeneity);
      }
    }
  }
}
