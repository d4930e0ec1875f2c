#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "urn/analysis.hpp"
#include "urn/fertility.hpp"
#include "urn/law.hpp"
#include "urn/meanfield.hpp"
#include "urn/replicator.hpp"
#include "urn/report_io.hpp"

using namespace urn;

namespace {

// hand-built trajectory for the pure estimator tests
Trajectory synthetic(const std::vector<std::vector<double>>& xs, double dt) {
  Trajectory t;
  t.dimension = static_cast<int>(xs.front().size());
  t.jump_bound = 1;
  double tau = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    CountVector z(xs[i].size());
    for (size_t c = 0; c < z.size(); ++c)
      z[c] = static_cast<std::int64_t>(std::llround(xs[i][c] * 1000));
    t.records.push_back({static_cast<std::int64_t>(i), tau, z, SimplexPoint(xs[i])});
    t.scalars.push_back({static_cast<std::int64_t>(i), total_count(z), tau});
    tau += dt;
  }
  return t;
}

ReplicatorSpec coordination_spec() {
  auto diag = IntLaw::table({{1, 0.025}});
  auto off = IntLaw::table({{1, 0.0025}});
  ReplicatorSpec spec;
  spec.strategies = 2;
  spec.max_progeny = 1;
  spec.progeny_first = {{diag, off}, {off, diag}};
  spec.progeny_second = spec.progeny_first;
  spec.self_progeny = {IntLaw::constant(0), IntLaw::constant(0)};
  spec.validate();
  return spec;
}

}  // namespace

TEST_CASE("growth rate estimate of the deterministic add-one chain") {
  TransitionLaw polya = birth_death_law(2, 1.0, 0.0);
  Trajectory traj = simulate(polya, CountVector{1, 1}, StopCondition::steps(10000), 1, 100);
  auto rate = growth_rate_estimate(traj, 0.2);
  REQUIRE(rate.has_value());
  CHECK(*rate == doctest::Approx(1.0).epsilon(1e-3));

  TransitionLaw death = birth_death_law(1, 0.0, 1.0);
  Trajectory gone = simulate(death, CountVector{4}, StopCondition::extinction(100), 2);
  CHECK(!growth_rate_estimate(gone, 0.2).has_value());
}

TEST_CASE("process time average: constant, alternating and partial") {
  Trajectory constant = synthetic({{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}}, 1.0);
  bool partial = false;
  std::vector<double> avg = time_average_process(constant, 2.0, &partial);
  CHECK(!partial);
  CHECK(avg[0] == doctest::Approx(0.3));

  Trajectory alternating =
      synthetic({{0.2, 0.8}, {0.6, 0.4}, {0.2, 0.8}, {0.6, 0.4}, {0.2, 0.8}}, 1.0);
  avg = time_average_process(alternating, 4.0, &partial);
  CHECK(avg[0] == doctest::Approx(0.4));

  avg = time_average_process(constant, 50.0, &partial);
  CHECK(partial);
  CHECK(avg[0] == doctest::Approx(0.3));
}

TEST_CASE("limit classification: settled, oscillating, and tolerance misses") {
  std::vector<EquilibriumReport> eqs(2);
  eqs[0].x = {1.0, 0.0};
  eqs[1].x = {0.0, 1.0};

  Trajectory settled = synthetic({{0.9, 0.1}, {0.97, 0.03}, {0.99, 0.01}, {1.0, 0.0}}, 1.0);
  CHECK(limit_classification(settled, eqs, 0.05, 0.5) == 0);

  Trajectory oscillating =
      synthetic({{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}}, 1.0);
  CHECK(limit_classification(oscillating, eqs, 0.05, 0.8) == -1);

  Trajectory near_middle = synthetic({{0.5, 0.5}, {0.52, 0.48}, {0.5, 0.5}}, 1.0);
  CHECK(limit_classification(near_middle, eqs, 0.05, 0.9) == -1);
}

TEST_CASE("boundary approach flag") {
  Trajectory vertex =
      synthetic({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}, 1.0);
  CHECK(exclusion_check(vertex, 1e-3));

  Trajectory centered = synthetic(std::vector<std::vector<double>>(
                                      8, std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}),
                                  1.0);
  CHECK(!exclusion_check(centered, 1e-3));
}

TEST_CASE("mixing-defect decay report marks extinct replicates void") {
  FertilitySpec spec = FertilitySpec::additive({{0.4, 0.4}, {0.4, 0.4}});  // subcritical mating
  TransitionLaw law = fertility_law(spec);
  GenotypeLayout lay{2};
  Trajectory traj = simulate(law, lay.state({0, 3, 0}), StopCondition::extinction(100000), 3, 1);
  REQUIRE(traj.extinct);
  HwDecayReport rep = hw_decay_check(traj, 2);
  CHECK(rep.void_report);
}

TEST_CASE("ensemble: pure death and pure growth endpoints") {
  EnsembleConfig death;
  death.law = birth_death_law(1, 0.0, 1.0);
  death.z0 = {8};
  death.stop = StopCondition::steps(100);
  death.replicates = 50;
  death.growth_threshold = 0.1;
  death.seed = 5;
  EnsembleReport rep = run_ensemble(death);
  CHECK(rep.growth_fraction == 0.0);
  CHECK(rep.extinct_fraction == 1.0);

  EnsembleConfig grow;
  grow.law = birth_death_law(1, 1.0, 0.0);
  grow.z0 = {2};
  grow.stop = StopCondition::steps(2000);
  grow.replicates = 20;
  grow.growth_threshold = 0.5;
  grow.seed = 6;
  EnsembleReport rep2 = run_ensemble(grow);
  CHECK(rep2.growth_fraction == 1.0);
  for (const auto& s : rep2.summaries) CHECK(*s.rate == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("ensemble growth probability matches the ruin formula") {
  EnsembleConfig cfg;
  cfg.law = birth_death_law(1, 0.6, 0.4);
  cfg.z0 = {10};
  cfg.stop = StopCondition::steps(5000);
  cfg.replicates = 400;
  cfg.growth_threshold = 0.1;
  cfg.seed = 7;
  cfg.threads = 2;
  EnsembleReport rep = run_ensemble(cfg);
  double expected = 1.0 - std::pow(2.0 / 3.0, 10);
  double sigma = std::sqrt(expected * (1.0 - expected) / cfg.replicates);
  CHECK(std::abs(rep.growth_fraction - expected) <= 3.0 * sigma);
}

TEST_CASE("ensemble report bytes do not depend on the worker count") {
  TransitionLaw law = replicator_law(coordination_spec());
  auto run_with = [&](int threads) {
    EnsembleConfig cfg;
    cfg.law = law;
    cfg.z0 = {50, 50};
    cfg.stop = StopCondition::steps(5000);
    cfg.replicates = 24;
    cfg.growth_threshold = 0.025;
    cfg.seed = 11;
    cfg.threads = threads;
    cfg.time_average_T = 5.0;
    return ensemble_json(run_ensemble(cfg), true).dump();
  };
  std::string one = run_with(1);
  CHECK(one == run_with(3));
  CHECK(one == run_with(8));
}

TEST_CASE("classification histogram counts only growth replicates") {
  TransitionLaw law = replicator_law(coordination_spec());
  VectorField field = replicator_field(replicator_mean_matrix(coordination_spec()));
  EnsembleConfig cfg;
  cfg.law = law;
  cfg.z0 = {50, 50};
  cfg.stop = StopCondition::steps(20000);
  cfg.replicates = 30;
  cfg.growth_threshold = 0.025;
  cfg.seed = 12;
  cfg.threads = 2;
  cfg.equilibria = find_equilibria(field, MeanFieldOptions{}, &law);
  EnsembleReport rep = run_ensemble(cfg);
  int hist_total = 0;
  for (const auto& [id, count] : rep.limit_histogram) hist_total += count;
  CHECK(hist_total == rep.growth_count);
}

TEST_CASE("flow-shadowing defect vanishes for a frozen law") {
  ReplicatorSpec frozen = ReplicatorSpec::uniform_entries(2, IntLaw::constant(0));
  TransitionLaw law = replicator_law(frozen);
  // the chain never moves, but the clock never advances past tau = n/|z0|;
  // use a long run so the checkpoints fit
  Trajectory traj = simulate(law, CountVector{20, 30}, StopCondition::steps(2000), 3, 1);
  VectorField field = mean_vector_field(law);
  auto defects = pseudotrajectory_defect(traj, field, 2.0, {0.0, 10.0});
  REQUIRE(defects.size() == 2);
  CHECK(defects[0].second <= 1e-12);
  CHECK(defects[1].second <= 1e-12);
}

TEST_CASE("mass study reproduces the ruin curve and its monotonicity") {
  EnsembleConfig base;
  base.law = birth_death_law(1, 0.6, 0.4);
  base.z0 = {1};
  base.stop = StopCondition::steps(4000);
  base.replicates = 300;
  base.growth_threshold = 0.1;
  base.seed = 9;
  base.threads = 2;
  MassStudy study = mass_monotonicity_study(base, CountVector{1}, {3, 8, 20});
  REQUIRE(study.points.size() == 3);
  for (const auto& p : study.points) {
    double expected = 1.0 - std::pow(2.0 / 3.0, static_cast<double>(p.mass));
    double sigma = std::sqrt(expected * (1.0 - expected) / base.replicates);
    CHECK(std::abs(p.growth_fraction - expected) <= 4.0 * sigma);
  }
  CHECK(study.nondecreasing);
}

TEST_CASE("ensemble validates its configuration") {
  EnsembleConfig cfg;
  cfg.law = birth_death_law(1, 0.5, 0.2);
  cfg.z0 = {5};
  cfg.replicates = 0;
  cfg.growth_threshold = 0.1;
  CHECK_THROWS_AS(run_ensemble(cfg), std::invalid_argument);
  cfg.replicates = 5;
  cfg.growth_threshold = 0.0;
  CHECK_THROWS_AS(run_ensemble(cfg), std::invalid_argument);
}
