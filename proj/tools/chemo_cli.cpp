#include <CLI11.hpp>

#include <iostream>

#include "chemo/config.hpp"
#include "chemo/error.hpp"
#include "chemo/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Radial chemotaxis blow-up experiments"};
  std::string config_path, out_dir, scenario;
  long long seed = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "key = value config file")->required();
  app.add_option("--out", out_dir, "output directory (overrides 'out')");
  app.add_option("--scenario", scenario, "blowup | subcritical-probe | certify-only | sweep");
  app.add_option("--seed", seed, "reserved; the pipeline is deterministic");
  app.add_flag("--verbose", verbose, "progress on stderr");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    auto kv = chemo::KeyValueConfig::load(config_path);
    if (!out_dir.empty()) kv.set("out", out_dir);
    if (!scenario.empty()) kv.set("scenario", scenario);
    chemo::ExperimentConfig cfg = chemo::parse_experiment(kv);
    cfg.verbose = verbose;
    const chemo::ExperimentResult r = chemo::run_experiment(cfg);
    std::cout << r.summary << "\n";
    return r.exit_code;
  } catch (const chemo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    using chemo::Errc;
    switch (e.code()) {
      case Errc::ConfigError:
      case Errc::NonpositiveParameter:
      case Errc::MassBoundsInverted:
      case Errc::DimensionOutOfRange:
      case Errc::SubcriticalExponent:
      case Errc::LatticeTooCoarse:
      case Errc::TooFewNodes:
        return 1;
      case Errc::SelectionInfeasible:
        return 2;
      default:
        return 3;  // the run itself failed: no verdict
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
