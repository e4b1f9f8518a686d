// riccati: command-line front end over the header library.
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "riccati/cli.hpp"

int main(int argc, char** argv) {
  using namespace riccati::cli;
  CLI::App app{"Matrix Riccati solver and global-existence certificate checker"};
  app.require_subcommand(1);
  CommandOptions o;
  double grid_density = 0, tol = 0, horizon = 0;

  auto common = [&](CLI::App* sub, bool cert_opts) {
    sub->add_option("--config", o.config_path, "JSON problem file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_path, "output file (default: stdout)");
    sub->add_option("--horizon", horizon, "override the problem horizon");
    if (cert_opts) {
      sub->add_option("--grid-density", grid_density, "check points per unit time")->check(CLI::PositiveNumber);
      sub->add_option("--tol", tol, "hypothesis tolerance")->check(CLI::PositiveNumber);
    }
  };

  CLI::App* solve = app.add_subcommand("solve", "integrate Z' + ZPZ + QZ + ZR + S = 0");
  common(solve, false);
  CLI::App* certify = app.add_subcommand("certify", "check the certificate hypotheses and monitor the invariant");
  common(certify, true);
  certify->add_flag("--no-solve", o.no_solve, "only check the hypotheses");
  CLI::App* scan = app.add_subcommand("scan", "sweep the initial value Z0 = base + alpha*direction");
  common(scan, false);
  scan->add_option("--values", o.values, "comma-separated parameter values (overrides the config)")->delimiter(',');
  CLI::App* lemmas = app.add_subcommand("check-lemmas", "randomized trace/congruence checks");
  lemmas->add_option("--seed", o.seed, "RNG seed");
  lemmas->add_option("--trials", o.trials, "trials per check");
  CLI::App* compare = app.add_subcommand("compare", "comparison with the Lyapunov solution (real S <= 0, P >= 0)");
  common(compare, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  auto set = [](CLI::App* sub, const char* name, double v, std::optional<double>& dst) {
    if (sub->count(name) > 0) dst = v;
  };
  for (CLI::App* sub : {solve, certify, scan, compare}) {
    if (!sub->parsed()) continue;
    set(sub, "--horizon", horizon, o.horizon);
    if (sub != solve && sub != scan) {
      set(sub, "--grid-density", grid_density, o.grid_density);
      set(sub, "--tol", tol, o.tol);
    }
  }

  if (solve->parsed()) return cmd_solve(o, std::cout, std::cerr);
  if (certify->parsed()) return cmd_certify(o, std::cout, std::cerr);
  if (scan->parsed()) return cmd_scan(o, std::cout, std::cerr);
  if (lemmas->parsed()) return cmd_check_lemmas(o, std::cout, std::cerr);
  return cmd_compare(o, std::cout, std::cerr);
}
