#include <iostream>

#include <CLI11.hpp>

#include "iet/error.hpp"
#include "iet/experiment.hpp"

namespace {

void instance_flags(CLI::App* app, iet::ExperimentConfig& cfg) {
  app->add_option("--instance", cfg.instance,
                  "builtin name (golden, sqrt2, genus2-loop, unbounded-quotients, euclid), "
                  "inline JSON or a JSON file")
      ->capture_default_str();
  app->add_option("--out", cfg.out, "output directory")->capture_default_str();
}

void roof_flags(CLI::App* app, iet::ExperimentConfig& cfg) {
  app->add_option("--roof", cfg.roof, "\"symmetric\", inline JSON or a JSON file")->capture_default_str();
  app->add_option("--seed", cfg.seed)->capture_default_str();
  app->add_option("--precision-bits", cfg.precision_bits)->capture_default_str();
  app->add_option("--samples", cfg.samples, "cancellation-audit samples per stage")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interval exchanges: induction, bounded-type certificates and drift sweeps"};
  app.set_version_flag("--version", iet::kVersion);
  app.require_subcommand(1);
  iet::ExperimentConfig cfg;

  auto* induct = app.add_subcommand("induct", "Rauzy-Veech trace and block matrices");
  instance_flags(induct, cfg);
  induct->add_option("--schedule", cfg.schedule, "raw, zorich or mmy")->capture_default_str();
  induct->add_option("--depth", cfg.depth, "number of blocks")->capture_default_str();

  auto* certify = app.add_subcommand("certify", "bounded-type certificate and balance audit");
  instance_flags(certify, cfg);
  certify->add_option("--K", cfg.K, "number of MMY blocks")->capture_default_str();

  auto* gaps = app.add_subcommand("gaps", "partition gap extremes for n = 1..n_max");
  instance_flags(gaps, cfg);
  gaps->add_option("--n-max", cfg.n_max)->capture_default_str();

  auto* audit = app.add_subcommand("audit", "cancellation audit of the roof derivative");
  instance_flags(audit, cfg);
  roof_flags(audit, cfg);
  audit->add_option("--K", cfg.K, "deepest MMY stage")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "drift certificates for sampled pairs");
  instance_flags(sweep, cfg);
  roof_flags(sweep, cfg);
  sweep->add_option("--scales", cfg.scales, "pair distances eta")->capture_default_str();
  sweep->add_option("--pairs", cfg.pairs, "pairs per scale")->capture_default_str();
  sweep->add_option("--mode", cfg.mode, "strict or adaptive")->capture_default_str();
  sweep->add_option("--jobs", cfg.jobs)->capture_default_str();
  sweep->add_option("--constants", cfg.constants, "\"measure\", inline JSON or a JSON file")
      ->capture_default_str();
  sweep->add_option("--eps", cfg.eps)->capture_default_str();
  sweep->add_option("--N", cfg.N)->capture_default_str();
  sweep->add_option("--n-max", cfg.n_max, "horizon for measuring the balance constant")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : iet::kExitUsage;
  }

  try {
    if (*induct) return iet::cmd_induct(cfg, std::cerr);
    if (*certify) return iet::cmd_certify(cfg, std::cerr);
    if (*gaps) return iet::cmd_gaps(cfg, std::cerr);
    if (*audit) return iet::cmd_audit(cfg, std::cerr);
    return iet::cmd_sweep(cfg, std::cerr);
  } catch (const iet::Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == iet::Errc::parse_error || e.code() == iet::Errc::bad_argument ||
                   e.code() == iet::Errc::bad_inputs
               ? iet::kExitUsage
               : 1;
  }
}
