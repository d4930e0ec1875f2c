#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "urn/law.hpp"
#include "urn/types.hpp"

namespace urn {

struct TrajectoryRecord {
  std::int64_t n = 0;
  double tau = 0.0;
  CountVector z;
  SimplexPoint x;
};

// Per-step (n, |z_n|, tau_n) sample. Kept for every step up to a cap, then
// geometrically decimated; the last step is always present exactly.
struct ScalarSample {
  std::int64_t n = 0;
  std::int64_t size = 0;
  double tau = 0.0;
};

struct StopCondition {
  enum class Kind { MaxSteps, MaxClock, Extinction };
  Kind kind = Kind::MaxSteps;
  std::int64_t max_steps = 0;
  double max_clock = 0.0;
  std::int64_t hard_cap = 50'000'000;

  static StopCondition steps(std::int64_t n);
  static StopCondition clock(double t);
  static StopCondition extinction(std::int64_t cap = 50'000'000);
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;  // every record_stride-th state plus the final one
  std::vector<ScalarSample> scalars;
  std::int64_t scalar_stride = 1;
  bool extinct = false;
  bool truncated = false;  // hard cap hit before the stop condition
  std::uint64_t seed = 0;
  std::string model;
  int dimension = 0;
  int jump_bound = 0;

  const TrajectoryRecord& front() const { return records.front(); }
  const TrajectoryRecord& back() const { return records.back(); }
  std::int64_t final_step() const { return records.back().n; }
  double final_tau() const { return records.back().tau; }
};

// One kernel update plus the clock tick: tau' = tau + 1/|z| for z != 0,
// tau + 1 for the absorbing empty state (which maps to itself).
std::pair<CountVector, double> step(const TransitionLaw& law, const CountVector& z,
                                    double tau, RngStream& rng);

// Deterministic given (law, z0, stop, seed). Simulation halts at extinction
// since the empty state is absorbing. record_stride = 0 records adaptively
// (stride doubles whenever ~4096 records accumulate).
Trajectory simulate(const TransitionLaw& law, const CountVector& z0,
                    const StopCondition& stop, std::uint64_t seed,
                    std::int64_t record_stride = 1);

// Same loop with a caller-provided stream; used by ensembles, where the
// stream for replicate r derives from the root seed as RngStream(root, r).
Trajectory simulate_stream(const TransitionLaw& law, const CountVector& z0,
                           const StopCondition& stop, RngStream& rng,
                           std::int64_t record_stride = 1, std::uint64_t seed_label = 0);

// Piecewise-constant, right-open interpolation over the recorded grid:
// X_t = x_n for tau_n <= t < tau_{n+1}. Throws std::out_of_range outside
// [0, final recorded tau].
SimplexPoint interpolate(const Trajectory& traj, double t);

// Newline-delimited JSON: one header record, then one record per line.
void write_ndjson(const Trajectory& traj, std::ostream& os);
Trajectory read_ndjson(std::istream& is);

}  // namespace urn
