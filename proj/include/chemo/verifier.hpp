#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "chemo/mass_system.hpp"
#include "chemo/radial_solver.hpp"
#include "chemo/subsolution.hpp"

namespace chemo {

enum class RegionKind { Inner, IntermediateP, IntermediateQ, OuterP, OuterQ };
std::string to_string(RegionKind k);

struct Lattice {
  std::size_t Ns = 512;
  std::size_t Nt = 256;
};

inline constexpr std::size_t kMinNs = 256;
inline constexpr std::size_t kMinNt = 128;
inline constexpr double kCertTol = 1e-9;

struct RegionReport {
  RegionKind kind = RegionKind::Inner;
  bool checks_p = false;
  bool checks_q = false;
  /// Largest residual divided by its term scale; NaN when not certified here.
  double max_p = 0.0;
  double max_q = 0.0;
  double raw_p = 0.0;  ///< residual value at the worst P point
  double raw_q = 0.0;
  double s_worst = 0.0;
  double t_worst = 0.0;
  std::size_t samples = 0;
  bool pass = true;
};

struct Certificate {
  std::vector<RegionReport> regions;
  std::vector<InequalityCheck> checks;
  std::vector<std::string> notes;
  SubsolutionSpec spec;
  Lattice lattice;
  double tol = kCertTol;
  bool coverage_ok = false;
  bool pass = false;
};

/// Evaluates both operators on closed-form derivatives of the damped pair over
/// a lattice covering every region. `rows`, when given, receives a thinned set
/// of sampled residuals for plotting.
Certificate certify_subsolution(const SubsolutionSpec& spec, const Lattice& lattice,
                                std::vector<OperatorResidual>* rows = nullptr);

std::string certificate_text(const Certificate& c);
std::string certificate_csv(const Certificate& c);

/// One recorded time of a simulation, seen through the mass transform.
struct SimSnapshot {
  MassState ms;
  double mu_w = 0.0;
  double sup_w = 0.0;
  double u_center = 0.0;
};

struct OrderingReport {
  std::size_t snapshots = 0;
  std::size_t in_window = 0;
  std::optional<double> window_closed_at;  ///< first recorded time outside the window
  std::string window_close_reason;
  double min_margin = 0.0;       ///< min over window of min_s (U - uU)
  double min_margin_rel = 0.0;   ///< same, divided by max U at that time
  double t_min_margin = 0.0;
  double s_min_margin = 0.0;
  std::optional<double> first_violation_t;
  std::optional<double> first_violation_s;
  bool boundary_ok = true;       ///< uU(0) <= U(0), uU(R^n) <= mu_lo R^n/n <= U(R^n)
  bool initial_ok = false;       ///< U >= uU at t = 0
  double w_min_margin_rel = 0.0; ///< informational W - uW ordering
  double tol_rel = 1e-4;
  bool pass = false;
  // After the window closes (still t < T) the ordering is only recorded,
  // not asserted: nothing guarantees it there.
  std::size_t after_window = 0;
  double after_min_margin_rel = 0.0;
  std::optional<double> after_first_violation_t;
};

/// Incremental form of the ordering check: feed snapshots in time order.
class OrderingMonitor {
 public:
  OrderingMonitor(const SubsolutionSpec& spec, double sup_w0, double tol_rel = 1e-4);
  void observe(const SimSnapshot& snap);
  /// Throws HypothesisWindowEmpty when no snapshot fell inside the window.
  OrderingReport report() const;

 private:
  SubsolutionSpec spec_;
  double sup_w0_;
  bool open_ = true;
  bool first_ = true;
  OrderingReport rep_;
};

OrderingReport compare_orderings(const std::vector<SimSnapshot>& sim, const SubsolutionSpec& spec, double sup_w0);

struct BlowupVerdict {
  bool blew_up_before = false;
  std::optional<double> t_trigger;
  bool lower_envelope_check = false;
  std::size_t envelope_points = 0;
  double envelope_worst = 0.0;  ///< min over checked times of (u(0,t) - env(t)) / scale
};

/// Envelope e^{-theta t} a y^{1-alpha}(t) is checked at recorded times t < min(T, window_end).
BlowupVerdict detect_blowup(const RunReport& report, const SubsolutionSpec& spec, double window_end);

double envelope(const SubsolutionSpec& spec, double t);

enum class ProbeData { Bump, Constant };

struct ProbeReport {
  bool bounded = false;
  double sup_initial = 0.0;
  double sup_max = 0.0;
  double horizon = 0.0;
  RunReport run;
};

/// Smooth data of mass `mass` (u0 = w0), run to controls.t_end.
ProbeReport boundedness_probe(const ModelParams& p, std::size_t M, double mass, ProbeData data,
                              const RunControls& controls, double c_adv = 0.5);

/// Same verdict for caller-supplied data on a caller-supplied grid.
ProbeReport boundedness_probe(const ModelParams& p, const RadialGrid& g, const std::vector<double>& u0,
                              const std::vector<double>& w0, const RunControls& controls, double c_adv = 0.5);

}  // namespace chemo
