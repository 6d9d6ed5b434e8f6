#include "CLI11.hpp"
#include "hcm/cli.hpp"
#include "hcm/output.hpp"

int main(int argc, char** argv) {
  CLI::App app{"heralded hybrid cloning machine: analytic oracle and Monte Carlo simulator"};
  app.set_version_flag("--version", hcm::kToolVersion);
  app.require_subcommand(1);

  hcm::cli::CommonOptions opt;

  auto add_common = [&](CLI::App* cmd, bool with_config) {
    if (with_config) {
      cmd->add_option("--config", opt.config_path, "run configuration (JSON)");
    }
    cmd->add_option("--seed", opt.seed, "override the config seed");
    cmd->add_option("--shots", opt.shots, "override the per-quadrature shot count");
    cmd->add_option("--threads", opt.threads,
                    "worker count (default: HCM_THREADS or all cores)");
    cmd->add_option("--out", opt.out_dir, "output directory");
  };

  CLI::App* analytic = app.add_subcommand("analytic", "closed-form report for a config");
  add_common(analytic, true);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo run, writes stats.json");
  add_common(simulate, true);
  simulate->add_flag("--samples", opt.write_samples, "also write shot-level samples.csv");

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep, writes sweep.csv");
  sweep->add_option("--spec", opt.sweep_path, "sweep specification (JSON)")->required();
  add_common(sweep, false);

  CLI::App* reproduce =
      app.add_subcommand("reproduce", "regenerate figure data (fig2, fig3a, fig3b, figS1)");
  reproduce->add_option("figure", opt.figure, "figure id")->required();
  add_common(reproduce, false);

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "solve the unity-gain filter gain for a config");
  add_common(calibrate, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  if (analytic->parsed()) return hcm::cli::cmd_analytic(opt);
  if (simulate->parsed()) return hcm::cli::cmd_simulate(opt);
  if (sweep->parsed()) return hcm::cli::cmd_sweep(opt);
  if (reproduce->parsed()) return hcm::cli::cmd_reproduce(opt);
  if (calibrate->parsed()) return hcm::cli::cmd_calibrate(opt);
  return 2;
}
