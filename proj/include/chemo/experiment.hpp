#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chemo/config.hpp"
#include "chemo/model.hpp"
#include "chemo/radial_solver.hpp"
#include "chemo/subsolution.hpp"
#include "chemo/verifier.hpp"

namespace chemo {

enum class Scenario { Blowup, SubcriticalProbe, CertifyOnly, Sweep };
Scenario parse_scenario(const std::string& s);
std::string to_string(Scenario s);

enum class GridKind { Auto, Uniform, Graded };

struct ExperimentConfig {
  ModelParams p;
  Mode mode = Mode::Blowup;
  Scenario scenario = Scenario::Blowup;
  std::size_t M = 512;
  std::size_t Ns = 512;
  std::size_t Nt = 256;
  std::optional<double> t_end;     ///< default: T (blow-up) or probe_horizon
  double dt_init = 1e308;          ///< first step is then set by the stability limits
  double dt_min = 1e-300;
  double blowup_factor = 1e6;
  double T_star = 1.0;
  std::filesystem::path out = "out";
  std::vector<double> sigma_list;
  GridKind grid = GridKind::Auto;
  std::optional<double> grid_h0;   ///< default: kink radius * blowup_factor^(-1/n) / 8
  double c_adv = 0.5;
  std::size_t record_every = 1;
  std::size_t max_steps = 20'000'000;
  double probe_horizon = 1.0;
  double probe_mass = 10.0;
  std::vector<double> checkpoints;
  bool verbose = false;
};

/// All keys accepted in a config file.
const std::vector<std::string>& experiment_keys();

/// Validates every key before returning; model validation runs in the mode
/// the scenario needs (sweeps validate per sigma).
ExperimentConfig parse_experiment(const KeyValueConfig& kv);

/// Exact key = value echo of the resolved configuration.
std::string serialize_experiment(const ExperimentConfig& cfg);

struct BlowupOutcome {
  SubsolutionSpec spec;
  Certificate certificate;
  InitialData data;
  RadialGrid grid;
  RunReport run;
  std::optional<OrderingReport> ordering;
  std::string ordering_error;
  BlowupVerdict verdict;
  double grid_h0 = 0.0;
  std::vector<RadialState> checkpoint_states;  ///< one per requested time reached
};

/// select -> certify -> generate data -> simulate -> compare -> verdict.
BlowupOutcome run_blowup_pipeline(const ExperimentConfig& cfg);

struct ExperimentResult {
  int exit_code = 0;
  std::string summary;  ///< one machine-readable line per run
};

/// Runs the scenario and writes all artifacts below cfg.out.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes the plotting script referencing the CSVs in `dir`.
void emit_plot_script(const std::filesystem::path& dir);

}  // namespace chemo
