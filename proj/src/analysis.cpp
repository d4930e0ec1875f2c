#include "urn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

namespace urn {

std::optional<double> growth_rate_estimate(const Trajectory& traj, double tail_fraction) {
  if (traj.extinct) return std::nullopt;
  std::int64_t n_final = traj.final_step();
  if (n_final <= 0) return std::nullopt;
  auto cutoff = static_cast<std::int64_t>(std::floor((1.0 - tail_fraction) *
                                                     static_cast<double>(n_final)));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.scalars) {
    if (s.n < std::max<std::int64_t>(1, cutoff)) continue;
    best = std::min(best, static_cast<double>(s.size) / static_cast<double>(s.n));
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

std::vector<double> time_average_process(const Trajectory& traj, double T, bool* partial) {
  if (traj.records.empty()) throw std::invalid_argument("empty trajectory");
  double horizon = std::min(T, traj.final_tau());
  if (partial != nullptr) *partial = traj.final_tau() < T;
  size_t k = static_cast<size_t>(traj.dimension);
  std::vector<double> acc(k, 0.0);
  if (horizon <= 0.0) return traj.records.front().x.coords();
  for (size_t i = 0; i + 1 < traj.records.size(); ++i) {
    double t0 = std::min(traj.records[i].tau, horizon);
    double t1 = std::min(traj.records[i + 1].tau, horizon);
    if (t1 <= t0) continue;
    const auto& x = traj.records[i].x.coords();
    for (size_t c = 0; c < k; ++c) acc[c] += (t1 - t0) * x[c];
  }
  for (double& v : acc) v /= horizon;
  return acc;
}

std::vector<std::pair<double, double>> pseudotrajectory_defect(
    const Trajectory& traj, const VectorField& field, double T,
    const std::vector<double>& checkpoints, double h) {
  std::vector<std::pair<double, double>> out;
  for (double t : checkpoints) {
    if (t < 0.0 || t + T > traj.final_tau()) continue;  // insufficient clock span
    SimplexPoint start = interpolate(traj, t);
    if (start.is_null()) continue;
    IntegrationResult flow = integrate(field, start.coords(), T, h);
    auto lo = std::lower_bound(traj.records.begin(), traj.records.end(), t,
                               [](const TrajectoryRecord& r, double v) { return r.tau < v; });
    double defect = 0.0;
    for (auto it = lo; it != traj.records.end() && it->tau <= t + T; ++it) {
      double off = it->tau - t;
      auto idx = static_cast<size_t>(std::llround(off / h));
      idx = std::min(idx, flow.states.size() - 1);
      defect = std::max(defect, euclid_dist(flow.states[idx], it->x.coords()));
    }
    out.emplace_back(t, defect);
  }
  return out;
}

int limit_classification(const Trajectory& traj,
                         const std::vector<EquilibriumReport>& equilibria, double tol,
                         double tail_fraction) {
  if (equilibria.empty()) return -1;
  std::int64_t n_final = traj.final_step();
  auto cutoff = static_cast<std::int64_t>(std::floor((1.0 - tail_fraction) *
                                                     static_cast<double>(n_final)));
  for (size_t q = 0; q < equilibria.size(); ++q) {
    bool ok = true;
    bool seen = false;
    for (const auto& r : traj.records) {
      if (r.n < cutoff) continue;
      seen = true;
      if (euclid_dist(r.x.coords(), equilibria[q].x) > tol) {
        ok = false;
        break;
      }
    }
    if (ok && seen) return static_cast<int>(q);
  }
  return -1;
}

bool exclusion_check(const Trajectory& traj, double tol) {
  size_t n = traj.records.size();
  if (n == 0) return false;
  size_t quarter = std::max<size_t>(1, n / 4);
  size_t starts[3] = {n - std::min(n, 3 * quarter), n - std::min(n, 2 * quarter),
                      n - std::min(n, quarter)};
  for (int seg = 0; seg < 3; ++seg) {
    size_t lo = starts[seg];
    size_t hi = seg < 2 ? starts[seg + 1] : n;
    bool hit = false;
    for (size_t i = lo; i < hi && !hit; ++i) {
      const auto& x = traj.records[i].x.coords();
      double mn = *std::min_element(x.begin(), x.end());
      if (mn < tol) hit = true;
    }
    if (!hit) return false;
  }
  return true;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

HwDecayReport hw_decay_check(const Trajectory& traj, int alleles) {
  HwDecayReport rep;
  if (traj.extinct) {
    rep.void_report = true;
    return rep;
  }
  std::vector<double> norms;
  norms.reserve(traj.records.size());
  for (const auto& r : traj.records) {
    if (r.x.is_null()) break;
    norms.push_back(hw_defect_norm(alleles, r.x.coords()));
  }
  if (norms.empty()) {
    rep.void_report = true;
    return rep;
  }
  rep.initial = norms.front();
  size_t window = std::max<size_t>(1, norms.size() / 5);
  rep.head_median = median({norms.begin(), norms.begin() + static_cast<std::ptrdiff_t>(window)});
  rep.tail_median = median({norms.end() - static_cast<std::ptrdiff_t>(window), norms.end()});
  rep.decayed = rep.tail_median < rep.head_median;
  rep.tail_over_initial = rep.initial > 0.0 ? rep.tail_median / rep.initial : 0.0;
  return rep;
}

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Growth: return "growth";
    case Outcome::Extinct: return "extinct";
    case Outcome::Other: return "other";
  }
  return "unknown";
}

namespace {

ReplicateSummary run_replicate(const EnsembleConfig& cfg, int index) {
  RngStream rng(cfg.seed, static_cast<std::uint64_t>(index));
  std::int64_t stride = cfg.record_stride;
  if (stride == 0 && cfg.stop.kind == StopCondition::Kind::MaxSteps)
    stride = std::max<std::int64_t>(1, cfg.stop.max_steps / 2000);
  Trajectory traj = simulate_stream(cfg.law, cfg.z0, cfg.stop, rng, stride, cfg.seed);

  ReplicateSummary s;
  s.index = index;
  s.steps = traj.final_step();
  s.final_size = total_count(traj.back().z);
  s.tau_max = traj.final_tau();
  s.truncated = traj.truncated;

  if (traj.extinct) {
    s.outcome = Outcome::Extinct;
  } else if (s.steps > 0 && static_cast<double>(s.final_size) / static_cast<double>(s.steps) >=
                                cfg.growth_threshold) {
    s.outcome = Outcome::Growth;
  } else {
    s.outcome = Outcome::Other;
  }

  s.rate = growth_rate_estimate(traj, cfg.tail_fraction);
  if (!cfg.equilibria.empty() && s.outcome == Outcome::Growth)
    s.limit_id = limit_classification(traj, cfg.equilibria, cfg.classify_tol, cfg.tail_fraction);
  if (cfg.time_average_T) {
    bool partial = false;
    s.time_average = time_average_process(traj, *cfg.time_average_T, &partial);
    s.time_average_partial = partial;
  }
  if (cfg.field && !cfg.defect_checkpoints.empty() && s.outcome == Outcome::Growth)
    s.defects = pseudotrajectory_defect(traj, *cfg.field, cfg.defect_T, cfg.defect_checkpoints);
  if (cfg.hw_decay) s.hw = hw_decay_check(traj, cfg.hw_alleles);
  if (cfg.exclusion_tol > 0.0 && s.outcome == Outcome::Growth)
    s.excluded_boundary = exclusion_check(traj, cfg.exclusion_tol);
  return s;
}

}  // namespace

EnsembleReport run_ensemble(const EnsembleConfig& cfg) {
  if (cfg.replicates < 1) throw std::invalid_argument("ensemble needs at least one replicate");
  if (cfg.growth_threshold <= 0.0)
    throw std::invalid_argument("ensemble needs a positive growth threshold");
  if (cfg.tail_fraction <= 0.0 || cfg.tail_fraction >= 1.0)
    throw std::invalid_argument("tail fraction must lie in (0,1)");

  std::vector<ReplicateSummary> summaries(static_cast<size_t>(cfg.replicates));
  int workers = std::max(1, std::min(cfg.threads, cfg.replicates));
  if (workers == 1) {
    for (int r = 0; r < cfg.replicates; ++r)
      summaries[static_cast<size_t>(r)] = run_replicate(cfg, r);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&cfg, &summaries, w, workers]() {
        for (int r = w; r < cfg.replicates; r += workers)
          summaries[static_cast<size_t>(r)] = run_replicate(cfg, r);
      });
    }
    for (auto& t : pool) t.join();
  }

  EnsembleReport rep;
  rep.replicates = cfg.replicates;
  rep.seed = cfg.seed;
  std::vector<double> ta_acc;
  int ta_count = 0;
  std::map<double, std::pair<double, int>> defect_acc;
  for (const auto& s : summaries) {
    if (s.outcome == Outcome::Growth) rep.growth_count += 1;
    if (s.outcome == Outcome::Extinct) rep.extinct_count += 1;
    if (!cfg.equilibria.empty() && s.outcome == Outcome::Growth)
      rep.limit_histogram[s.limit_id] += 1;
    if (s.time_average && s.outcome == Outcome::Growth) {
      if (ta_acc.empty()) ta_acc.assign(s.time_average->size(), 0.0);
      for (size_t c = 0; c < ta_acc.size(); ++c) ta_acc[c] += (*s.time_average)[c];
      ++ta_count;
    }
    for (const auto& [t, d] : s.defects) {
      defect_acc[t].first += d;
      defect_acc[t].second += 1;
    }
  }
  double r = static_cast<double>(cfg.replicates);
  rep.growth_fraction = static_cast<double>(rep.growth_count) / r;
  rep.extinct_fraction = static_cast<double>(rep.extinct_count) / r;
  rep.growth_se = std::sqrt(std::max(0.0, rep.growth_fraction * (1.0 - rep.growth_fraction) / r));
  if (ta_count > 0) {
    for (double v : ta_acc) rep.mean_time_average.push_back(v / ta_count);
  }
  for (const auto& [t, acc] : defect_acc)
    rep.mean_defect_curve.emplace_back(t, acc.first / acc.second);
  rep.summaries = std::move(summaries);
  return rep;
}

MassStudy mass_monotonicity_study(const EnsembleConfig& base, const CountVector& shape,
                                  const std::vector<std::int64_t>& masses) {
  std::int64_t shape_total = total_count(shape);
  if (shape_total <= 0) throw std::invalid_argument("mass study needs a nonempty shape");
  for (size_t i = 1; i < masses.size(); ++i)
    if (masses[i] <= masses[i - 1])
      throw std::invalid_argument("mass list must be strictly increasing");

  MassStudy study;
  for (std::int64_t mass : masses) {
    CountVector z0(shape.size(), 0);
    std::int64_t assigned = 0;
    size_t largest = 0;
    for (size_t i = 0; i < shape.size(); ++i) {
      z0[i] = shape[i] * mass / shape_total;
      assigned += z0[i];
      if (shape[i] > shape[largest]) largest = i;
    }
    z0[largest] += mass - assigned;  // exact total with fixed composition
    EnsembleConfig cfg = base;
    cfg.z0 = z0;
    EnsembleReport rep = run_ensemble(cfg);
    study.points.push_back({mass, rep.growth_fraction, rep.growth_se});
  }
  study.nondecreasing = true;
  for (size_t i = 1; i < study.points.size(); ++i) {
    double slack = 2.0 * std::sqrt(study.points[i - 1].se * study.points[i - 1].se +
                                   study.points[i].se * study.points[i].se);
    if (study.points[i].growth_fraction < study.points[i - 1].growth_fraction - slack)
      study.nondecreasing = false;
  }
  return study;
}

}  // namespace urn
