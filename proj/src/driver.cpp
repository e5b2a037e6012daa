#include "hpcrack/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>

namespace hpcrack {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string cycle_file(int cycle)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "cycle_%02d.vtu", cycle);
  return buf;
}

}  // namespace

Mode parse_mode(const std::string& name)
{
  if (name == "crack")
    return Mode::crack;
  if (name == "manufactured")
    return Mode::manufactured;
  if (name == "sweep")
    return Mode::sweep;
  throw ConfigError("unknown mode '" + name + "' (expected crack, manufactured or sweep)");
}

std::string to_string(Mode mode)
{
  switch (mode) {
    case Mode::crack: return "crack";
    case Mode::manufactured: return "manufactured";
    case Mode::sweep: return "sweep";
  }
  return "crack";
}

std::string short_number(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void RunConfig::validate() const
{
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(mu > 0.0))
    fail("mu must be positive");
  if (!(alpha > 0.0))
    fail("alpha must be positive");
  if (!(beta >= 0.0))
    fail("beta must be non-negative");
  if (!(theta_h > 0.0 && theta_h < 1.0))
    fail("theta_h must lie in (0, 1)");
  if (!(theta_p > 0.0 && theta_p < 1.0))
    fail("theta_p must lie in (0, 1)");
  if (!(theta_h + theta_p < 1.0))
    fail("theta_h + theta_p must be less than 1 (got " + short_number(theta_h + theta_p) + ")");
  if (!(tau_smooth >= 0.0))
    fail("tau_smooth must be non-negative");
  if (!(tol_newton > 0.0))
    fail("tol_newton must be positive");
  if (!(tol_adapt >= 0.0))
    fail("tol_adapt must be non-negative");
  if (max_cycles < 1)
    fail("max_cycles must be at least 1");
  if (max_newton_iters < 1)
    fail("max_newton_iters must be at least 1");
  if (p_max < 1 || p_max > max_degree)
    fail("p_max must lie in [1, 7]");
  if (p_init < 1 || p_init > p_max)
    fail("p_init must lie in [1, p_max]");
  if (max_level < 0 || max_level > 20)
    fail("max_level must lie in [0, 20]");
  if (n_samples < 2)
    fail("n_samples must be at least 2");
  if (sweep_values.empty())
    fail("sweep_values must not be empty");
  for (double v : sweep_values)
    if (!(v > 0.0))
      fail("sweep_values must be positive");
}

ModelParams RunConfig::model() const
{
  ModelParams m;
  m.mu = mu;
  m.alpha = alpha;
  m.beta = beta;
  return m;
}

NewtonConfig RunConfig::newton() const
{
  NewtonConfig n;
  n.tol_newton = tol_newton;
  n.max_iters = max_newton_iters;
  return n;
}

MarkingParams RunConfig::marking() const
{
  MarkingParams m;
  m.theta_h = theta_h;
  m.theta_p = theta_p;
  m.tau_smooth = tau_smooth;
  m.p_max = p_max;
  m.max_level = max_level;
  return m;
}

CrackRun run_crack(const RunConfig& config, const CycleObserver& observer, bool write_outputs)
{
  config.validate();
  const ModelParams params = config.model();
  const NewtonConfig newton = config.newton();
  const MarkingParams marking = config.marking();
  if (write_outputs)
    std::filesystem::create_directories(config.output_dir);

  CrackRun run;
  QuadMesh mesh = QuadMesh::create_initial();
  DegreeMap degrees(mesh, config.p_init);
  auto space = std::make_unique<HpSpace>(mesh, degrees, crack_problem());

  // Initial iterate: the linear (beta = 0) solution. For beta = 0 that solve
  // is Newton's first step, so start from the Dirichlet lift instead.
  SolutionField phi = space->lift();
  if (params.beta > 0.0) {
    const LinearSystem sys = assemble_linear_initial(*space, params);
    phi += space->constraints().expand(solve_linear(sys.matrix, sys.rhs), true);
  }

  for (int cycle = 0; cycle < config.max_cycles; ++cycle) {
    const auto t0 = std::chrono::steady_clock::now();
    CycleRecord rec;
    rec.cycle = cycle;
    rec.n_cells = space->mesh().n_active();
    rec.n_dofs = space->n_dofs();

    NewtonResult solved;
    try {
      solved = newton_solve(*space, params, phi, newton);
    } catch (const NonConvergenceError& e) {
      rec.newton_residuals = e.log.residual_history();
      rec.wall_time = seconds_since(t0);
      run.records.push_back(rec);
      run.failure = "cycle " + std::to_string(cycle) + ": " + e.what();
      if (write_outputs)
        write_log(run.records, config.output_dir / "run_log.json");
      run.space.emplace(*space);
      run.phi = phi;
      return run;
    }
    phi = std::move(solved.phi);
    rec.newton_residuals = solved.log.residual_history();
    rec.newton_converged = true;

    const ErrorIndicators eta = kelly_indicators(*space, params, phi);
    rec.eta_total = eta.eta_total;
    const bool last = cycle + 1 == config.max_cycles || eta.eta_total < config.tol_adapt;

    RefinementPlan plan;
    if (!last) {
      const auto flagged = bulk_flag(space->mesh(), eta, marking.theta_h + marking.theta_p, marking.tie_tolerance);
      const SmoothnessIndicators sigma = smoothness_indicators(*space, phi, flagged);
      plan = mark(*space, eta, sigma, marking);
    }
    rec.n_h = plan.h_set.size();
    rec.n_p = plan.p_set.size();

    if (write_outputs && config.write_vtu)
      write_vtu(make_snapshot(*space, phi, &eta), config.output_dir / cycle_file(cycle));
    if (observer)
      observer(CycleState{cycle, *space, phi, eta, plan, solved.log});

    if (!last) {
      auto [next_mesh, next_degrees] = execute(space->mesh(), space->degrees(), plan);
      auto next = std::make_unique<HpSpace>(std::move(next_mesh), std::move(next_degrees), crack_problem());
      phi = transfer(*space, phi, *next);
      space = std::move(next);
    }
    rec.wall_time = seconds_since(t0);
    run.records.push_back(rec);
    if (last)
      break;
  }

  run.converged = true;
  run.profile = sample_line(*space, params, phi, 0.3, 0.5, config.n_samples);
  run.space.emplace(*space);
  run.phi = phi;
  if (write_outputs) {
    write_csv(run.profile, config.output_dir / "profile.csv");
    write_log(run.records, config.output_dir / "run_log.json");
  }
  return run;
}

std::vector<ConvergenceRow> run_manufactured(const RunConfig& config, bool write_outputs)
{
  config.validate();
  ModelParams params = config.model();
  params.beta = 0.0;
  const NewtonConfig newton = config.newton();
  constexpr double pi = std::numbers::pi;
  const ExactSolution exact{
      [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); },
      [](double x, double y) {
        return Eigen::Vector2d(pi * std::cos(pi * x) * std::sin(pi * y), pi * std::sin(pi * x) * std::cos(pi * y));
      }};

  std::vector<ConvergenceRow> rows;
  for (int p = 1; p <= 3; ++p) {
    QuadMesh mesh = QuadMesh::create_initial();
    for (int level = 0; level < 4; ++level) {
      if (level > 0)
        mesh = mesh.refine(std::set<CellId>(mesh.active().begin(), mesh.active().end()));
      const HpSpace space(mesh, DegreeMap(mesh, p), manufactured_problem(params.mu));
      const NewtonResult solved = newton_solve(space, params, space.lift(), newton);
      const ErrorNorms err = error_norms(space, solved.phi, exact);
      ConvergenceRow row;
      row.p = p;
      row.h = mesh.cell_size(level);
      row.n_dofs = space.n_dofs();
      row.l2 = err.l2;
      row.h1_semi = err.h1_semi;
      row.eta_total = kelly_indicators(space, params, solved.phi).eta_total;
      row.newton_iterations = solved.log.iterations();
      if (level == 0) {
        row.rate_l2 = std::numeric_limits<double>::quiet_NaN();
        row.rate_h1 = std::numeric_limits<double>::quiet_NaN();
      } else {
        const ConvergenceRow& prev = rows.back();
        row.rate_l2 = std::log2(prev.l2 / row.l2);
        row.rate_h1 = std::log2(prev.h1_semi / row.h1_semi);
      }
      rows.push_back(row);
    }
  }

  if (write_outputs) {
    std::filesystem::create_directories(config.output_dir);
    const auto path = config.output_dir / "convergence.csv";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot open '" + path.string() + "' for writing");
    out << "p,h,n_dofs,l2_error,h1_semi_error,eta_total,rate_l2,rate_h1\n";
    for (const auto& r : rows)
      out << r.p << ',' << format_double(r.h) << ',' << r.n_dofs << ',' << format_double(r.l2) << ','
          << format_double(r.h1_semi) << ',' << format_double(r.eta_total) << ','
          << format_double(r.rate_l2) << ',' << format_double(r.rate_h1) << '\n';
    if (!out)
      throw IoError("write to '" + path.string() + "' failed");
  }
  return rows;
}

std::vector<SweepPoint> run_sweep(const RunConfig& config, bool write_outputs)
{
  config.validate();
  std::vector<SweepPoint> points;
  for (double v : config.sweep_values) {
    SweepPoint sp;
    sp.family = "alpha";
    sp.alpha = v;
    sp.beta = 1.0;
    points.push_back(sp);
  }
  for (double v : config.sweep_values) {
    SweepPoint sp;
    sp.family = "beta";
    sp.alpha = 1.0;
    sp.beta = v;
    points.push_back(sp);
  }

  for (SweepPoint& sp : points) {
    const std::string tag = sp.family + "_a" + short_number(sp.alpha) + "_b" + short_number(sp.beta);
    RunConfig rc = config;
    rc.mode = Mode::crack;
    rc.alpha = sp.alpha;
    rc.beta = sp.beta;
    rc.mu = 1.0;
    rc.output_dir = config.output_dir / "runs" / tag;
    try {
      sp.run = run_crack(rc, {}, write_outputs);
      sp.ok = sp.run.converged;
      sp.error = sp.run.failure;
    } catch (const std::exception& e) {
      sp.ok = false;
      sp.error = e.what();
    }
    if (sp.ok) {
      // The last sample sits on the tip itself, where the gradient is
      // singular; report the closest one ahead of it.
      const auto& prof = sp.run.profile;
      sp.nearest_tip = prof.size() > 1 ? prof[prof.size() - 2] : prof.back();
      if (write_outputs)
        write_csv(sp.run.profile, config.output_dir / ("profile_" + tag + ".csv"));
    }
  }
  if (write_outputs)
    write_sweep_summary(points, config.output_dir / "summary.csv");
  return points;
}

void write_sweep_summary(const std::vector<SweepPoint>& points, const std::filesystem::path& path)
{
  std::vector<const SweepPoint*> order;
  for (const auto& p : points)
    order.push_back(&p);
  std::stable_sort(order.begin(), order.end(), [](const SweepPoint* a, const SweepPoint* b) {
    if (a->alpha != b->alpha)
      return a->alpha < b->alpha;
    return a->beta < b->beta;
  });
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  out << "alpha,beta,family,ok,T23,eps23,W\n";
  for (const SweepPoint* p : order) {
    out << format_double(p->alpha) << ',' << format_double(p->beta) << ',' << p->family << ','
        << (p->ok ? 1 : 0);
    if (p->ok)
      out << ',' << format_double(p->nearest_tip.average.T23) << ',' << format_double(p->nearest_tip.average.eps23)
          << ',' << format_double(p->nearest_tip.average.energy_density);
    else
      out << ",,,";
    out << '\n';
  }
  if (!out)
    throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace hpcrack
