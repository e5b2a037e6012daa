// Command line front end: hpcrack --mode crack|manufactured|sweep [options]
//
// Exit codes: 0 success, 2 configuration error, 3 Newton non-convergence,
// 4 I/O error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hpcrack/driver.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_nonconvergence = 3;
constexpr int exit_io = 4;

void print_cycle(const hpcrack::CycleRecord& r)
{
  std::printf("cycle %2d  cells %6zu  dofs %7zu  eta %.6e  newton %2zu  h %4zu  p %4zu  %.2fs\n", r.cycle, r.n_cells,
              r.n_dofs, r.eta_total, r.newton_residuals.empty() ? 0 : r.newton_residuals.size() - 1, r.n_h, r.n_p,
              r.wall_time);
}

int run(const hpcrack::RunConfig& config)
{
  using namespace hpcrack;
  switch (config.mode) {
    case Mode::crack: {
      const CrackRun result = run_crack(config);
      for (const auto& r : result.records)
        print_cycle(r);
      if (!result.converged) {
        std::cerr << "error: " << result.failure << '\n';
        return exit_nonconvergence;
      }
      std::cout << "wrote " << (config.output_dir / "profile.csv").string() << " and "
                << (config.output_dir / "run_log.json").string() << '\n';
      return exit_ok;
    }
    case Mode::manufactured: {
      const auto rows = run_manufactured(config);
      std::printf("%2s %10s %8s %14s %14s %8s %8s\n", "p", "h", "dofs", "L2", "H1-semi", "rate L2", "rate H1");
      for (const auto& r : rows)
        std::printf("%2d %10.6f %8zu %14.6e %14.6e %8.3f %8.3f\n", r.p, r.h, r.n_dofs, r.l2, r.h1_semi, r.rate_l2,
                    r.rate_h1);
      return exit_ok;
    }
    case Mode::sweep: {
      const auto points = run_sweep(config);
      int status = exit_ok;
      for (const auto& p : points) {
        if (p.ok) {
          std::printf("%-5s alpha %-5s beta %-5s  T23 %.6e  eps23 %.6e  W %.6e\n", p.family.c_str(),
                      short_number(p.alpha).c_str(), short_number(p.beta).c_str(), p.nearest_tip.average.T23,
                      p.nearest_tip.average.eps23, p.nearest_tip.average.energy_density);
        } else {
          std::printf("%-5s alpha %-5s beta %-5s  FAILED: %s\n", p.family.c_str(), short_number(p.alpha).c_str(),
                      short_number(p.beta).c_str(), p.error.c_str());
          status = exit_nonconvergence;
        }
      }
      return status;
    }
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv)
{
  hpcrack::RunConfig config;
  std::string mode = "crack";
  std::string output_dir = config.output_dir.string();
  bool no_vtu = false;

  CLI::App app{"hp-adaptive solver for anti-plane shear of a strain-limiting body with an edge crack"};
  app.set_config("--config", "", "key=value configuration file; command line flags take precedence");
  app.add_option("--mode", mode, "crack, manufactured or sweep")->capture_default_str();
  app.add_option("--alpha", config.alpha, "exponent of the constitutive law")->capture_default_str();
  app.add_option("--beta", config.beta, "strain-limiting parameter (0 gives linear elasticity)")
      ->capture_default_str();
  app.add_option("--mu", config.mu, "shear modulus")->capture_default_str();
  app.add_option("--max-cycles", config.max_cycles, "adaptive cycles")->capture_default_str();
  app.add_option("--p-init", config.p_init, "initial polynomial degree")->capture_default_str();
  app.add_option("--p-max", config.p_max, "largest polynomial degree (at most 7)")->capture_default_str();
  app.add_option("--max-level", config.max_level, "h-refinement levels above the initial grid")
      ->capture_default_str();
  app.add_option("--theta-h", config.theta_h, "h part of the bulk marking fraction")->capture_default_str();
  app.add_option("--theta-p", config.theta_p, "p part of the bulk marking fraction")->capture_default_str();
  app.add_option("--tau-smooth", config.tau_smooth, "smoothness threshold for p-refinement")
      ->capture_default_str();
  app.add_option("--tol-newton", config.tol_newton, "absolute Newton residual tolerance")->capture_default_str();
  app.add_option("--max-newton-iters", config.max_newton_iters, "Newton iteration cap")->capture_default_str();
  app.add_option("--tol-adapt", config.tol_adapt, "stop once the global estimate drops below this (0: never)")
      ->capture_default_str();
  app.add_option("--n-samples", config.n_samples, "sample points on the line ahead of the tip")
      ->capture_default_str();
  app.add_option("--sweep-values", config.sweep_values, "parameter values used by the sweep")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--output-dir", output_dir, "artifact directory")
      ->envname(hpcrack::output_dir_env)
      ->capture_default_str();
  app.add_flag("--no-vtu", no_vtu, "skip the per-cycle VTU snapshots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  try {
    config.mode = hpcrack::parse_mode(mode);
    config.output_dir = output_dir;
    config.write_vtu = !no_vtu;
    config.validate();
    return run(config);
  } catch (const hpcrack::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const hpcrack::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_nonconvergence;
  } catch (const hpcrack::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return exit_io;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return exit_io;
  }
}
