#include <gtest/gtest.h>

#include <cmath>

#include "hpcrack/solver.hpp"

using namespace hpcrack;

namespace {

ModelParams params(double mu, double alpha, double beta)
{
  ModelParams m;
  m.mu = mu;
  m.alpha = alpha;
  m.beta = beta;
  return m;
}

SolutionField linear_start(const HpSpace& space, const ModelParams& m)
{
  const LinearSystem sys = assemble_linear_initial(space, m);
  return space.lift() + space.constraints().expand(solve_linear(sys.matrix, sys.rhs), true);
}

}  // namespace

TEST(Solver, IdentityAndDiagonalSystems)
{
  const int n = 12;
  SparseMatrix eye(n, n);
  eye.setIdentity();
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, -3.0, 5.0);
  EXPECT_LE((solve_linear(eye, b) - b).norm(), 1e-15);

  SparseMatrix diag(n, n);
  for (int i = 0; i < n; ++i)
    diag.insert(i, i) = i + 1.0;
  const Eigen::VectorXd x = solve_linear(diag, b);
  for (int i = 0; i < n; ++i)
    EXPECT_NEAR(x[i], b[i] / (i + 1.0), 1e-15);
}

TEST(Solver, CrackSystemMeetsResidualContract)
{
  const QuadMesh mesh = QuadMesh::create_initial();
  const HpSpace space(mesh, DegreeMap(mesh, 1), crack_problem());
  const LinearSystem sys = assemble_linear_initial(space, params(1, 1, 0));
  const Eigen::VectorXd x = solve_linear(sys.matrix, sys.rhs);
  EXPECT_LE((sys.matrix * x - sys.rhs).norm(), 1e-12 * std::max(1.0, sys.rhs.norm()));
}

TEST(Solver, SingularSystemIsReported)
{
  SparseMatrix a(3, 3);
  a.insert(0, 0) = 1.0;
  a.insert(1, 1) = 1.0;
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(3);
  EXPECT_THROW((void)solve_linear(a, b), LinearSolveError);
}

TEST(Solver, LineSearchHalvesAnOvershootingStep)
{
  // Single free DOF with a linear law: the residual is affine in the DOF, so a
  // step of twice the Newton update lands at the mirror image of the start.
  const QuadMesh mesh = QuadMesh::create_uniform(2);
  const HpSpace space(mesh, DegreeMap(mesh, 1), unslit_problem());
  const ModelParams m = params(1, 1, 0);
  const SolutionField phi0 = space.lift();
  SparseMatrix a;
  const Eigen::VectorXd r0 = assemble_system(space, m, phi0, &a);
  const SolutionField delta = 2.0 * space.constraints().expand(solve_linear(a, r0), true);

  // Brute-force scan of the schedule.
  double expected = 0.0;
  for (double rho = 1.0; rho >= 1.0 / 1024; rho /= 2) {
    if (assemble_residual(space, m, phi0 + rho * delta).norm() < (1 - 1e-4 * rho) * r0.norm()) {
      expected = rho;
      break;
    }
  }
  ASSERT_EQ(expected, 0.5);

  const LineSearchResult ls = line_search(space, m, phi0, delta, r0.norm(), 1e-4, 1.0 / 1024);
  EXPECT_EQ(ls.rho, 0.5);
  EXPECT_TRUE(ls.sufficient_decrease);
  EXPECT_LE(ls.residual_norm, 1e-14);
}

TEST(Solver, LineSearchFlagsAscentDirection)
{
  const QuadMesh mesh = QuadMesh::create_uniform(2);
  const HpSpace space(mesh, DegreeMap(mesh, 1), unslit_problem());
  const ModelParams m = params(1, 1, 0);
  const SolutionField phi0 = space.lift();
  SparseMatrix a;
  const Eigen::VectorXd r0 = assemble_system(space, m, phi0, &a);
  const SolutionField delta = -space.constraints().expand(solve_linear(a, r0), true);
  const LineSearchResult ls = line_search(space, m, phi0, delta, r0.norm(), 1e-4, 1.0 / 1024);
  EXPECT_FALSE(ls.sufficient_decrease);
  EXPECT_EQ(ls.rho, 1.0 / 1024);
}

TEST(Solver, LinearProblemTakesOneIteration)
{
  const QuadMesh mesh = QuadMesh::create_initial();
  const HpSpace space(mesh, DegreeMap(mesh, 2), crack_problem());
  const NewtonResult res = newton_solve(space, params(1, 1, 0), space.lift(), NewtonConfig{});
  EXPECT_TRUE(res.log.converged);
  EXPECT_EQ(res.log.iterations(), 1);
  EXPECT_EQ(res.log.records[0].rho, 1.0);
}

TEST(Solver, ConvergedStartTakesNoIterations)
{
  const QuadMesh mesh = QuadMesh::create_initial();
  const HpSpace space(mesh, DegreeMap(mesh, 1), unslit_problem());
  const SolutionField exact = space.interpolate([](double x, double) { return 1.0 - x; });
  const NewtonResult res = newton_solve(space, params(1, 1, 1), exact, NewtonConfig{});
  EXPECT_TRUE(res.log.converged);
  EXPECT_EQ(res.log.iterations(), 0);
  EXPECT_EQ((res.phi - exact).norm(), 0.0);
}

TEST(Solver, NonlinearSolveDecreasesResidualMonotonically)
{
  const QuadMesh mesh = QuadMesh::create_initial();
  const HpSpace space(mesh, DegreeMap(mesh, 2), crack_problem());
  const ModelParams m = params(1, 1, 1);
  const NewtonResult res = newton_solve(space, m, linear_start(space, m), NewtonConfig{});
  ASSERT_TRUE(res.log.converged);
  const auto hist = res.log.residual_history();
  ASSERT_GE(hist.size(), 3u);
  for (std::size_t k = 1; k < hist.size(); ++k)
    EXPECT_LT(hist[k], hist[k - 1]);
  EXPECT_LT(hist.back(), 1e-10);
  EXPECT_LE(assemble_residual(space, m, res.phi).norm(), 1e-10);
  // Dirichlet values survive every update.
  for (const auto& [dof, e] : space.constraints().entries())
    if (e.dirichlet) {
      EXPECT_EQ(res.phi[dof], e.inhomogeneity);
    }
}

TEST(Solver, SuperlinearTail)
{
  const QuadMesh mesh = QuadMesh::create_initial();
  const HpSpace space(mesh, DegreeMap(mesh, 3), crack_problem());
  const ModelParams m = params(1, 2, 2);
  const NewtonResult res = newton_solve(space, m, linear_start(space, m), NewtonConfig{});
  const auto hist = res.log.residual_history();
  ASSERT_GE(hist.size(), 4u);
  // r_{k+1} <= C r_k^1.5 over the final three steps with one C.
  const std::size_t n = hist.size();
  const double c = hist[n - 3] / std::pow(hist[n - 4], 1.5);
  EXPECT_LE(hist[n - 2], 10 * c * std::pow(hist[n - 3], 1.5) + 1e-13);
  EXPECT_LE(hist[n - 1], 10 * c * std::pow(hist[n - 2], 1.5) + 1e-13);
}

TEST(Solver, IterationCapRaisesWithLog)
{
  const QuadMesh mesh = QuadMesh::create_initial();
  const HpSpace space(mesh, DegreeMap(mesh, 2), crack_problem());
  NewtonConfig cfg;
  cfg.max_iters = 1;
  try {
    (void)newton_solve(space, params(1, 1, 10), space.lift(), cfg);
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_FALSE(e.log.converged);
    EXPECT_EQ(e.log.iterations(), 1);
  }
}

TEST(Solver, ConfigValidation)
{
  NewtonConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.gamma = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = NewtonConfig{};
  cfg.rho_min = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
