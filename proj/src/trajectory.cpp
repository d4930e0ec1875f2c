#include "urn/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace urn {

StopCondition StopCondition::steps(std::int64_t n) {
  StopCondition s;
  s.kind = Kind::MaxSteps;
  s.max_steps = n;
  return s;
}

StopCondition StopCondition::clock(double t) {
  StopCondition s;
  s.kind = Kind::MaxClock;
  s.max_clock = t;
  return s;
}

StopCondition StopCondition::extinction(std::int64_t cap) {
  StopCondition s;
  s.kind = Kind::Extinction;
  s.hard_cap = cap;
  return s;
}

std::pair<CountVector, double> step(const TransitionLaw& law, const CountVector& z,
                                    double tau, RngStream& rng) {
  std::int64_t s = total_count(z);
  if (s == 0) return {z, tau + 1.0};
  CountVector next = law.exact_sampler(z, rng);
  return {std::move(next), tau + 1.0 / static_cast<double>(s)};
}

namespace {

constexpr size_t kScalarCap = size_t{1} << 18;

void push_scalar(Trajectory& traj, std::int64_t n, std::int64_t size, double tau) {
  if (n % traj.scalar_stride != 0) return;
  traj.scalars.push_back({n, size, tau});
  if (traj.scalars.size() >= kScalarCap) {
    std::vector<ScalarSample> kept;
    kept.reserve(traj.scalars.size() / 2 + 1);
    for (size_t i = 0; i < traj.scalars.size(); i += 2) kept.push_back(traj.scalars[i]);
    traj.scalars.swap(kept);
    traj.scalar_stride *= 2;
  }
}

}  // namespace

Trajectory simulate_stream(const TransitionLaw& law, const CountVector& z0,
                           const StopCondition& stop, RngStream& rng,
                           std::int64_t record_stride, std::uint64_t seed_label) {
  if (static_cast<int>(z0.size()) != law.dimension)
    throw std::invalid_argument("initial state dimension mismatch");
  for (auto v : z0)
    if (v < 0) throw std::invalid_argument("negative initial count");
  if (record_stride < 0) throw std::invalid_argument("record stride must be >= 0");

  const bool adaptive = record_stride == 0;
  std::int64_t stride = adaptive ? 1 : record_stride;
  constexpr size_t kRecordCap = 4096;

  Trajectory traj;
  traj.seed = seed_label;
  traj.model = law.name;
  traj.dimension = law.dimension;
  traj.jump_bound = law.jump_bound;

  CountVector z = z0;
  double tau = 0.0;
  std::int64_t n = 0;

  traj.records.push_back({n, tau, z, normalize(z)});
  push_scalar(traj, n, total_count(z), tau);
  if (total_count(z) == 0) {
    traj.extinct = true;
    return traj;
  }

  auto done = [&]() {
    switch (stop.kind) {
      case StopCondition::Kind::MaxSteps: return n >= stop.max_steps;
      case StopCondition::Kind::MaxClock: return tau >= stop.max_clock;
      case StopCondition::Kind::Extinction: return false;  // handled at extinction
    }
    return true;
  };

  bool recorded_last = true;
  while (!done()) {
    if (n >= stop.hard_cap) {
      traj.truncated = true;
      break;
    }
    auto [znext, taunext] = step(law, z, tau, rng);
    z = std::move(znext);
    tau = taunext;
    ++n;
    push_scalar(traj, n, total_count(z), tau);
    recorded_last = false;
    if (n % stride == 0) {
      traj.records.push_back({n, tau, z, normalize(z)});
      recorded_last = true;
      if (adaptive && traj.records.size() >= kRecordCap) {
        std::vector<TrajectoryRecord> kept;
        kept.reserve(traj.records.size() / 2 + 1);
        for (size_t i = 0; i < traj.records.size(); i += 2) kept.push_back(traj.records[i]);
        traj.records.swap(kept);
        stride *= 2;
        recorded_last = traj.records.back().n == n;
      }
    }
    if (total_count(z) == 0) {
      traj.extinct = true;
      break;
    }
  }

  if (!recorded_last) traj.records.push_back({n, tau, z, normalize(z)});
  if (traj.scalars.empty() || traj.scalars.back().n != n)
    traj.scalars.push_back({n, total_count(z), tau});
  return traj;
}

Trajectory simulate(const TransitionLaw& law, const CountVector& z0,
                    const StopCondition& stop, std::uint64_t seed,
                    std::int64_t record_stride) {
  RngStream rng(seed);
  return simulate_stream(law, z0, stop, rng, record_stride, seed);
}

SimplexPoint interpolate(const Trajectory& traj, double t) {
  if (traj.records.empty()) throw std::out_of_range("empty trajectory");
  if (t < 0.0 || t > traj.final_tau())
    throw std::out_of_range("interpolation time outside recorded clock range");
  auto it = std::upper_bound(traj.records.begin(), traj.records.end(), t,
                             [](double v, const TrajectoryRecord& r) { return v < r.tau; });
  if (it == traj.records.begin()) return it->x;
  return std::prev(it)->x;
}

void write_ndjson(const Trajectory& traj, std::ostream& os) {
  nlohmann::json header;
  header["k"] = traj.dimension;
  header["m"] = traj.jump_bound;
  header["seed"] = traj.seed;
  header["model"] = traj.model;
  os << header.dump() << '\n';
  for (const auto& r : traj.records) {
    nlohmann::json rec;
    rec["n"] = r.n;
    rec["tau"] = r.tau;
    rec["z"] = r.z;
    rec["x"] = r.x.coords();
    os << rec.dump() << '\n';
  }
}

Trajectory read_ndjson(std::istream& is) {
  Trajectory traj;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("missing trajectory header");
  nlohmann::json header = nlohmann::json::parse(line);
  traj.dimension = header.at("k").get<int>();
  traj.jump_bound = header.at("m").get<int>();
  traj.seed = header.at("seed").get<std::uint64_t>();
  traj.model = header.at("model").get<std::string>();
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::json rec = nlohmann::json::parse(line);
    TrajectoryRecord r;
    r.n = rec.at("n").get<std::int64_t>();
    r.tau = rec.at("tau").get<double>();
    r.z = rec.at("z").get<CountVector>();
    std::vector<double> x = rec.at("x").get<std::vector<double>>();
    r.x = std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })
              ? SimplexPoint::null_point(traj.dimension)
              : SimplexPoint(std::move(x), true);
    traj.records.push_back(std::move(r));
  }
  if (traj.records.empty()) throw std::runtime_error("trajectory without records");
  traj.extinct = total_count(traj.records.back().z) == 0;
  for (const auto& r : traj.records)
    traj.scalars.push_back({r.n, total_count(r.z), r.tau});
  return traj;
}

}  // namespace urn
