#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "urn/law.hpp"
#include "urn/meanfield.hpp"
#include "urn/trajectory.hpp"

namespace urn {

// Minimum of |z_n|/n over the trailing tail_fraction of the run; proxy for
// the asymptotic growth rate. Empty for extinct trajectories.
std::optional<double> growth_rate_estimate(const Trajectory& traj, double tail_fraction);

// Exact integral average of the recorded piecewise-constant process over
// [0, min(T, tau_max)]; *partial is set when tau_max < T.
std::vector<double> time_average_process(const Trajectory& traj, double T,
                                         bool* partial = nullptr);

// At each checkpoint t, integrates the field from X_t for duration T and
// returns sup over the recorded clock grid in [t, t+T] of the distance to
// the flow. Checkpoints beyond tau_max - T are dropped.
std::vector<std::pair<double, double>> pseudotrajectory_defect(
    const Trajectory& traj, const VectorField& field, double T,
    const std::vector<double>& checkpoints, double h = 1e-3);

// Index into `equilibria` if every record in the tail window lies within tol
// of that equilibrium; -1 otherwise.
int limit_classification(const Trajectory& traj,
                         const std::vector<EquilibriumReport>& equilibria, double tol,
                         double tail_fraction);

// True iff min_i x^i dips below tol somewhere in each of the last three
// quarters of the recorded trajectory (recurrent boundary approach proxy).
bool exclusion_check(const Trajectory& traj, double tol = 1e-3);

struct HwDecayReport {
  bool void_report = false;  // extinct replicate
  double initial = 0.0;
  double head_median = 0.0;
  double tail_median = 0.0;
  bool decayed = false;
  double tail_over_initial = 0.0;
};

// Hardy-Weinberg defect norm along a genotype trajectory: tail median versus
// head median over the recorded grid.
HwDecayReport hw_decay_check(const Trajectory& traj, int alleles);

struct EnsembleConfig {
  TransitionLaw law;
  CountVector z0;
  StopCondition stop;
  int replicates = 100;
  double growth_threshold = 0.0;  // growth declared when |z_n|/n >= threshold at stop
  double tail_fraction = 0.2;
  std::uint64_t seed = 1;
  int threads = 1;
  std::int64_t record_stride = 0;  // 0: pick ~2000 records automatically

  // optional per-replicate analyses
  std::vector<EquilibriumReport> equilibria;
  double classify_tol = 0.05;
  std::optional<VectorField> field;
  std::vector<double> defect_checkpoints;
  double defect_T = 5.0;
  std::optional<double> time_average_T;
  bool hw_decay = false;
  int hw_alleles = 0;
  double exclusion_tol = 0.0;  // > 0 enables the boundary-approach check
};

enum class Outcome { Growth, Extinct, Other };
std::string outcome_name(Outcome o);

struct ReplicateSummary {
  int index = 0;
  Outcome outcome = Outcome::Other;
  std::optional<double> rate;
  int limit_id = -1;  // -1: unclassified / not requested
  std::int64_t steps = 0;
  std::int64_t final_size = 0;
  double tau_max = 0.0;
  bool truncated = false;
  std::optional<std::vector<double>> time_average;
  bool time_average_partial = false;
  std::vector<std::pair<double, double>> defects;
  std::optional<HwDecayReport> hw;
  bool excluded_boundary = false;
};

struct EnsembleReport {
  int replicates = 0;
  std::uint64_t seed = 0;
  int growth_count = 0;
  int extinct_count = 0;
  double growth_fraction = 0.0;
  double growth_se = 0.0;  // binomial Wald standard error
  double extinct_fraction = 0.0;
  std::map<int, int> limit_histogram;  // limit_id (-1 = unclassified) -> count, growth replicates only
  std::vector<double> mean_time_average;
  std::vector<std::pair<double, double>> mean_defect_curve;
  std::vector<ReplicateSummary> summaries;
};

// Order-independent parallel map over replicate indices with streams derived
// from the root seed, then a deterministic sequential reduction; the report
// is identical for every worker count.
EnsembleReport run_ensemble(const EnsembleConfig& cfg);

struct MassPoint {
  std::int64_t mass = 0;
  double growth_fraction = 0.0;
  double se = 0.0;
};

struct MassStudy {
  std::vector<MassPoint> points;
  bool nondecreasing = false;  // within 2 sigma binomial slack
};

// Scales z0 to each target mass with fixed composition and reruns the
// ensemble; checks the growth-fraction trend.
MassStudy mass_monotonicity_study(const EnsembleConfig& base, const CountVector& shape,
                                  const std::vector<std::int64_t>& masses);

}  // namespace urn
