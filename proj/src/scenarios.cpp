#include "urn/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "urn/analysis.hpp"
#include "urn/config.hpp"
#include "urn/diagnostics.hpp"
#include "urn/meanfield.hpp"
#include "urn/report_io.hpp"

namespace urn {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// least-squares slope of y against t
double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  return (n * sty - st * sy) / (n * stt - st * st);
}

struct Ctx {
  int threads = 1;
  std::uint64_t seed = 0;  // 0 keeps preset seeds

  std::uint64_t pick(std::uint64_t preset_seed) const { return seed ? seed : preset_seed; }
};

// ---- bundled preset configurations -----------------------------------------

const std::map<std::string, std::string>& preset_map() {
  static const std::map<std::string, std::string> presets = {
      {"keystone-replicator-field",
       "[verify]\npreset = keystone-replicator-field\n"},
      {"additive-fertility-identity",
       "[verify]\npreset = additive-fertility-identity\n"},
      {"rps-time-average",
       "[model]\n"
       "type = replicator\n"
       "k = 3\n"
       "R = table 1:0.005 | table -1:0.495 | table 1:0.505 ; "
       "table 1:0.505 | table 1:0.005 | table -1:0.495 ; "
       "table -1:0.495 | table 1:0.505 | table 1:0.005\n"
       "\n"
       "[simulation]\n"
       "z0 = 40 30 30\n"
       "clock = 500\n"
       "hard_cap = 8000000\n"
       "seed = 3\n"
       "stride = 0\n"
       "\n"
       "[ensemble]\n"
       "replicates = 64\n"
       "threshold = 0.005\n"
       "tail = 0.2\n"
       "timeavg_T = 500\n"
       "\n"
       "[verify]\n"
       "preset = rps-time-average\n"},
      {"coordination-growth-rate",
       "[model]\n"
       "type = replicator\n"
       "k = 2\n"
       "R = table 1:0.025 | table 1:0.0025 ; table 1:0.0025 | table 1:0.025\n"
       "\n"
       "[simulation]\n"
       "z0 = 50 50\n"
       "steps = 100000\n"
       "seed = 4\n"
       "stride = 0\n"
       "\n"
       "[ensemble]\n"
       "replicates = 220\n"
       "threshold = auto\n"
       "tail = 0.2\n"
       "classify_tol = 0.05\n"
       "\n"
       "[verify]\n"
       "preset = coordination-growth-rate\n"},
      {"coordination-nonconvergence",
       "[model]\n"
       "type = replicator\n"
       "k = 2\n"
       "R = table 1:0.025 | table 1:0.0025 ; table 1:0.0025 | table 1:0.025\n"
       "\n"
       "[simulation]\n"
       "z0 = 50 50\n"
       "steps = 600000\n"
       "seed = 5\n"
       "stride = 0\n"
       "\n"
       "[ensemble]\n"
       "replicates = 240\n"
       "threshold = auto\n"
       "tail = 0.2\n"
       "classify_tol = 0.05\n"
       "\n"
       "[verify]\n"
       "preset = coordination-nonconvergence\n"},
      {"extinction-negative-drift",
       "[model]\n"
       "type = birth-death\n"
       "k = 2\n"
       "up = 0.2\n"
       "down = 0.35\n"
       "\n"
       "[simulation]\n"
       "z0 = 10 10\n"
       "steps = 10000\n"
       "seed = 6\n"
       "stride = 0\n"
       "\n"
       "[ensemble]\n"
       "replicates = 500\n"
       "threshold = 0.05\n"
       "\n"
       "[verify]\n"
       "preset = extinction-negative-drift\n"},
      {"birth-death-monotonicity",
       "[model]\n"
       "type = birth-death\n"
       "k = 1\n"
       "up = 0.6\n"
       "down = 0.4\n"
       "\n"
       "[simulation]\n"
       "z0 = 5\n"
       "steps = 10000\n"
       "seed = 7\n"
       "stride = 0\n"
       "\n"
       "[ensemble]\n"
       "replicates = 2000\n"
       "threshold = 0.1\n"
       "masses = 5 20 100\n"
       "\n"
       "[verify]\n"
       "preset = birth-death-monotonicity\n"},
      {"hardy-weinberg-decay",
       "[model]\n"
       "type = fertility\n"
       "k = 2\n"
       "gamma = 1.1 1.1 ; 1.1 1.1\n"
       "\n"
       "[simulation]\n"
       "z0 = 0 20 ; 20 0\n"
       "steps = 10000\n"
       "seed = 8\n"
       "stride = 0\n"
       "\n"
       "[ensemble]\n"
       "replicates = 60\n"
       "threshold = 0.2\n"
       "\n"
       "[verify]\n"
       "preset = hardy-weinberg-decay\n"},
      {"pseudotrajectory-decay",
       "[model]\n"
       "type = replicator\n"
       "k = 2\n"
       "R = table 1:0.01 | table 1:0.0025 ; table 1:0.0025 | table 1:0.01\n"
       "\n"
       "[simulation]\n"
       "z0 = 50 50\n"
       "clock = 206\n"
       "hard_cap = 2000000\n"
       "seed = 9\n"
       "stride = 0\n"
       "\n"
       "[ensemble]\n"
       "replicates = 50\n"
       "threshold = 0.01\n"
       "checkpoints = 20 200\n"
       "defect_T = 5\n"
       "\n"
       "[verify]\n"
       "preset = pseudotrajectory-decay\n"},
      {"dominated-exclusion",
       "[model]\n"
       "type = replicator\n"
       "k = 2\n"
       "R = table 1:0.2 | table 1:0.2 ; const 0 | const 0\n"
       "\n"
       "[simulation]\n"
       "z0 = 50 50\n"
       "steps = 1000000\n"
       "seed = 10\n"
       "stride = 0\n"
       "\n"
       "[ensemble]\n"
       "replicates = 200\n"
       "threshold = 0.2\n"
       "exclusion_tol = 0.001\n"
       "\n"
       "[verify]\n"
       "preset = dominated-exclusion\n"},
      {"noise-bounds",
       "[verify]\npreset = noise-bounds\n"},
      {"determinism-parallel",
       "[verify]\npreset = determinism-parallel\n"},
  };
  return presets;
}

RunConfig preset_runconfig(const std::string& name) {
  const auto& text = preset_map().at(name);
  return RunConfig::resolve(ConfigFile::parse_string(text, "preset:" + name));
}

// Growth threshold rule: half the smallest positive growth rate among the
// linearly stable equilibria.
double auto_threshold(const std::vector<EquilibriumReport>& eqs) {
  double lam_min = std::numeric_limits<double>::infinity();
  for (const auto& e : eqs)
    if (e.stability == Stability::Stable && e.lambda && *e.lambda > 0.0)
      lam_min = std::min(lam_min, *e.lambda);
  if (!std::isfinite(lam_min))
    throw std::runtime_error("no stable equilibrium with positive growth rate");
  return lam_min / 2.0;
}

EnsembleConfig ensemble_from(const RunConfig& rc, const TransitionLaw& law, const Ctx& ctx,
                             std::uint64_t preset_seed) {
  EnsembleConfig cfg;
  cfg.law = law;
  cfg.z0 = rc.sim.z0;
  cfg.stop = rc.sim.stop;
  cfg.replicates = rc.ens.replicates;
  cfg.growth_threshold = rc.ens.threshold;
  cfg.tail_fraction = rc.ens.tail;
  cfg.seed = ctx.pick(preset_seed);
  cfg.threads = ctx.threads;
  cfg.record_stride = rc.sim.stride;
  cfg.classify_tol = rc.ens.classify_tol;
  cfg.defect_checkpoints = rc.ens.checkpoints;
  cfg.defect_T = rc.ens.defect_T;
  if (rc.ens.timeavg_T > 0) cfg.time_average_T = rc.ens.timeavg_T;
  cfg.exclusion_tol = rc.ens.exclusion_tol;
  return cfg;
}

// ---- individual checks ------------------------------------------------------

CheckResult check_keystone(const Ctx& ctx) {
  CheckResult res{"keystone-replicator-field",
                  "pair-interaction mean field matches the payoff-matrix field", false, "", 0};
  RngStream rng(ctx.pick(101));
  const int ks[5] = {2, 3, 4, 3, 2};
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    int k = ks[trial];
    auto random_law = [&]() {
      std::vector<std::pair<int, double>> entries;
      std::vector<double> p = random_simplex(4, rng);
      entries = {{-1, p[0]}, {0, p[1]}, {1, p[2]}, {2, p[3]}};
      return IntLaw::table(entries);
    };
    ReplicatorSpec spec;
    spec.strategies = k;
    spec.max_progeny = 2;
    spec.progeny_first.assign(static_cast<size_t>(k), {});
    spec.progeny_second.assign(static_cast<size_t>(k), {});
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        spec.progeny_first[static_cast<size_t>(i)].push_back(random_law());
        spec.progeny_second[static_cast<size_t>(i)].push_back(random_law());
      }
      spec.self_progeny.push_back(random_law());
    }
    spec.validate();
    TransitionLaw law = replicator_law(spec);
    VectorField from_law = mean_vector_field(law);
    VectorField from_matrix = replicator_field(replicator_mean_matrix(spec));
    for (int t = 0; t < 200; ++t) {
      std::vector<double> x = random_simplex(k, rng);
      worst = std::max(worst, sup_norm_diff(from_law(x), from_matrix(x)));
    }
  }
  res.pass = worst <= 1e-10;
  res.details = "max coordinate error " + format_double(worst) + " over 5 specs x 200 points";
  return res;
}

CheckResult check_additive_identity(const Ctx& ctx) {
  CheckResult res{"additive-fertility-identity",
                  "additive mating means reproduce the per-allele fertility field", false, "", 0};
  RngStream rng(ctx.pick(102));
  const int k = 3;
  GenotypeLayout lay{k};
  Matrix gamma(static_cast<size_t>(k), std::vector<double>(static_cast<size_t>(k), 0.0));
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      double v = 0.5 + rng.uniform01();
      gamma[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
      gamma[static_cast<size_t>(j)][static_cast<size_t>(i)] = v;
    }
  Matrix table(static_cast<size_t>(lay.classes()),
               std::vector<double>(static_cast<size_t>(lay.classes()), 0.0));
  for (int c1 = 0; c1 < lay.classes(); ++c1)
    for (int c2 = 0; c2 < lay.classes(); ++c2) {
      auto [i, j] = lay.class_pair(c1);
      auto [r, s] = lay.class_pair(c2);
      table[static_cast<size_t>(c1)][static_cast<size_t>(c2)] =
          gamma[static_cast<size_t>(i)][static_cast<size_t>(j)] +
          gamma[static_cast<size_t>(r)][static_cast<size_t>(s)];
    }
  VectorField general = fertility_field(k, table);
  VectorField additive = additive_fertility_field(gamma);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> classes = random_simplex(lay.classes(), rng);
    std::vector<double> x(static_cast<size_t>(lay.dimension()), 0.0);
    for (int c = 0; c < lay.classes(); ++c) {
      auto [i, j] = lay.class_pair(c);
      if (i == j)
        x[static_cast<size_t>(lay.idx(i, i))] = classes[static_cast<size_t>(c)];
      else {
        x[static_cast<size_t>(lay.idx(i, j))] = classes[static_cast<size_t>(c)] / 2.0;
        x[static_cast<size_t>(lay.idx(j, i))] = classes[static_cast<size_t>(c)] / 2.0;
      }
    }
    worst = std::max(worst, sup_norm_diff(general(x), additive(x)));
  }
  res.pass = worst <= 1e-12;
  res.details = "max coordinate error " + format_double(worst) + " at 100 symmetric points";
  return res;
}

CheckResult check_rps_time_average(const Ctx& ctx) {
  CheckResult res{"rps-time-average",
                  "cyclic-game composition time averages settle at the interior equilibrium",
                  false, "", 0};
  RunConfig rc = preset_runconfig("rps-time-average");
  TransitionLaw law = build_law(rc.model);
  EnsembleConfig cfg = ensemble_from(rc, law, ctx, rc.sim.seed);
  EnsembleReport rep = run_ensemble(cfg);

  Matrix a = replicator_mean_matrix(*rc.model.replicator);
  IntegrationResult path =
      integrate(replicator_field(a), normalize(rc.sim.z0).coords(), 500.0, rc.mf.opts.h, 10);
  std::vector<double> ode_avg = time_average_flow(path);

  double process_err = 0.0;
  for (double v : rep.mean_time_average) process_err = std::max(process_err, std::abs(v - 1.0 / 3.0));
  double ode_err = 0.0;
  for (double v : ode_avg) ode_err = std::max(ode_err, std::abs(v - 1.0 / 3.0));

  bool enough = rep.growth_count >= 50;
  res.pass = enough && !rep.mean_time_average.empty() && process_err <= 0.05 && ode_err <= 1e-3;
  std::ostringstream d;
  d << rep.growth_count << "/" << rep.replicates << " growth; process avg err "
    << format_double(process_err) << " (tol 0.05); flow avg err " << format_double(ode_err)
    << " (tol 1e-3)";
  res.details = d.str();
  return res;
}

struct CoordinationSetup {
  TransitionLaw law;
  std::vector<EquilibriumReport> equilibria;
  std::vector<int> vertex_ids;
  int interior_id = -1;
  double vertex_lambda = 0.0;
  double threshold = 0.0;
};

CoordinationSetup coordination_setup(const RunConfig& rc) {
  CoordinationSetup s;
  s.law = build_law(rc.model);
  VectorField field = replicator_field(replicator_mean_matrix(*rc.model.replicator));
  s.equilibria = find_equilibria(field, rc.mf.opts, &s.law);
  for (size_t i = 0; i < s.equilibria.size(); ++i) {
    if (s.equilibria[i].face.empty())
      s.interior_id = static_cast<int>(i);
    else {
      s.vertex_ids.push_back(static_cast<int>(i));
      if (s.equilibria[i].lambda) s.vertex_lambda = *s.equilibria[i].lambda;
    }
  }
  s.threshold = rc.ens.threshold > 0 ? rc.ens.threshold : auto_threshold(s.equilibria);
  return s;
}

CheckResult check_growth_rate(const Ctx& ctx) {
  CheckResult res{"coordination-growth-rate",
                  "growth-rate estimates at settled replicates match the equilibrium rate", false,
                  "", 0};
  RunConfig rc = preset_runconfig("coordination-growth-rate");
  CoordinationSetup setup = coordination_setup(rc);
  EnsembleConfig cfg = ensemble_from(rc, setup.law, ctx, rc.sim.seed);
  cfg.growth_threshold = setup.threshold;
  cfg.equilibria = setup.equilibria;
  EnsembleReport rep = run_ensemble(cfg);

  int classified = 0, within = 0;
  for (const auto& s : rep.summaries) {
    if (s.outcome != Outcome::Growth) continue;
    bool at_vertex = std::find(setup.vertex_ids.begin(), setup.vertex_ids.end(), s.limit_id) !=
                     setup.vertex_ids.end();
    if (!at_vertex || !s.rate) continue;
    ++classified;
    double lam = setup.vertex_lambda;
    if (*s.rate >= 0.9 * lam && *s.rate <= 1.1 * lam) ++within;
  }
  double frac = classified > 0 ? static_cast<double>(within) / classified : 0.0;
  res.pass = classified >= 100 && frac >= 0.9;
  std::ostringstream d;
  d << within << "/" << classified << " vertex-classified replicates inside [0.9,1.1] x "
    << format_double(setup.vertex_lambda);
  res.details = d.str();
  return res;
}

CheckResult check_nonconvergence(const Ctx& ctx) {
  CheckResult res{"coordination-nonconvergence",
                  "no settling at the unstable mixed equilibrium under full-rank noise", false, "",
                  0};
  RunConfig rc = preset_runconfig("coordination-nonconvergence");
  CoordinationSetup setup = coordination_setup(rc);
  if (setup.interior_id < 0) {
    res.details = "interior equilibrium not found";
    return res;
  }
  const auto& interior = setup.equilibria[static_cast<size_t>(setup.interior_id)];
  NondegeneracyReport nd = nondegeneracy(setup.law, interior.x);
  bool unstable = interior.stability == Stability::Unstable;

  EnsembleConfig cfg = ensemble_from(rc, setup.law, ctx, rc.sim.seed);
  cfg.growth_threshold = setup.threshold;
  cfg.equilibria = setup.equilibria;
  EnsembleReport rep = run_ensemble(cfg);

  int to_interior = 0, to_vertex = 0;
  for (const auto& [id, count] : rep.limit_histogram) {
    if (id == setup.interior_id) to_interior += count;
    if (std::find(setup.vertex_ids.begin(), setup.vertex_ids.end(), id) != setup.vertex_ids.end())
      to_vertex += count;
  }
  double vertex_share =
      rep.growth_count > 0 ? static_cast<double>(to_vertex) / rep.growth_count : 0.0;
  res.pass = nd.nondegenerate && unstable && rep.growth_count >= 200 && to_interior == 0 &&
             vertex_share >= 0.95;
  std::ostringstream d;
  d << "noise rank " << nd.rank << "/" << nd.required_rank << "; " << rep.growth_count
    << " growth; " << to_interior << " at the mixed point; vertex share "
    << format_double(vertex_share);
  res.details = d.str();
  return res;
}

CheckResult check_extinction(const Ctx& ctx) {
  CheckResult res{"extinction-negative-drift",
                  "uniformly negative expected growth forces extinction or bounded size", false,
                  "", 0};
  RunConfig rc = preset_runconfig("extinction-negative-drift");
  TransitionLaw law = build_law(rc.model);
  // confirm the drift is below -0.1 across the simplex
  double sup_rate = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 20; ++i) {
    double u = static_cast<double>(i) / 20.0;
    sup_rate = std::max(sup_rate, growth_rate(law, {u, 1.0 - u}));
  }
  EnsembleConfig cfg = ensemble_from(rc, law, ctx, rc.sim.seed);
  EnsembleReport rep = run_ensemble(cfg);
  std::int64_t bound =
      total_count(rc.sim.z0) +
      static_cast<std::int64_t>(20.0 * law.jump_bound *
                                std::sqrt(static_cast<double>(rc.sim.stop.max_steps)));
  bool all_bounded = true;
  for (const auto& s : rep.summaries)
    if (s.outcome != Outcome::Extinct && s.final_size > bound) all_bounded = false;
  res.pass = sup_rate <= -0.1 && rep.growth_count == 0 && all_bounded;
  std::ostringstream d;
  d << "sup rate " << format_double(sup_rate) << "; growth " << rep.growth_count << "/"
    << rep.replicates << "; extinct " << rep.extinct_count;
  res.details = d.str();
  return res;
}

CheckResult check_monotonicity(const Ctx& ctx) {
  CheckResult res{"birth-death-monotonicity",
                  "establishment probability matches the ruin formula and grows with mass", false,
                  "", 0};
  RunConfig rc = preset_runconfig("birth-death-monotonicity");
  TransitionLaw law = build_law(rc.model);
  EnsembleConfig base = ensemble_from(rc, law, ctx, rc.sim.seed);
  MassStudy study = mass_monotonicity_study(base, CountVector{1}, rc.ens.masses);

  bool within = true;
  std::ostringstream d;
  for (const auto& p : study.points) {
    double expected = 1.0 - std::pow(2.0 / 3.0, static_cast<double>(p.mass));
    double sigma = std::sqrt(std::max(expected * (1.0 - expected), 1e-12) /
                             static_cast<double>(base.replicates));
    double err = std::abs(p.growth_fraction - expected);
    if (err > 3.0 * sigma + 1e-9) within = false;
    d << "M=" << p.mass << ": " << format_double(p.growth_fraction) << " vs "
      << format_double(expected) << "; ";
  }
  d << (study.nondecreasing ? "trend nondecreasing" : "trend violated");
  res.pass = within && study.nondecreasing;
  res.details = d.str();
  return res;
}

CheckResult check_hw_decay(const Ctx& ctx) {
  CheckResult res{"hardy-weinberg-decay",
                  "random mating collapses the heterozygote excess in process and flow", false, "",
                  0};
  RunConfig rc = preset_runconfig("hardy-weinberg-decay");
  TransitionLaw law = build_law(rc.model);
  EnsembleConfig cfg = ensemble_from(rc, law, ctx, rc.sim.seed);
  cfg.hw_decay = true;
  cfg.hw_alleles = rc.model.fertility->alleles;
  EnsembleReport rep = run_ensemble(cfg);

  std::vector<double> tails;
  double initial = 0.0;
  for (const auto& s : rep.summaries) {
    if (s.outcome != Outcome::Growth || !s.hw || s.hw->void_report) continue;
    tails.push_back(s.hw->tail_median);
    initial = s.hw->initial;
  }
  double tail_med = median_of(tails);
  bool process_ok = !tails.empty() && initial > 0 && tail_med < 0.2 * initial;

  const Matrix& gamma = *rc.model.fertility->additive_gamma;
  VectorField field = additive_fertility_field(gamma);
  std::vector<double> x0 = {0.0, 0.5, 0.5, 0.0};
  IntegrationResult path = integrate(field, x0, 4.0, rc.mf.opts.h, 1);
  std::vector<double> ts, logs;
  for (size_t i = 0; i < path.times.size(); ++i) {
    double dnorm = hw_defect_norm(2, path.states[i]);
    if (dnorm <= 0) continue;
    ts.push_back(path.times[i]);
    logs.push_back(std::log(dnorm));
  }
  double slope = fit_slope(ts, logs);
  // constant per-genotype contribution c gives mean fertility c and decay rate 2c
  double target = -2.0 * gamma[0][0];
  bool ode_ok = std::abs(slope - target) <= 0.01 * std::abs(target);

  res.pass = process_ok && ode_ok && static_cast<int>(tails.size()) >= 40;
  std::ostringstream d;
  d << tails.size() << " growth replicates; tail defect median " << format_double(tail_med)
    << " vs initial " << format_double(initial) << "; flow slope " << format_double(slope)
    << " vs " << format_double(target);
  res.details = d.str();
  return res;
}

CheckResult check_pseudotrajectory(const Ctx& ctx) {
  CheckResult res{"pseudotrajectory-decay",
                  "flow-shadowing defect shrinks as the population grows", false, "", 0};
  RunConfig rc = preset_runconfig("pseudotrajectory-decay");
  TransitionLaw law = build_law(rc.model);
  EnsembleConfig cfg = ensemble_from(rc, law, ctx, rc.sim.seed);
  cfg.field = replicator_field(replicator_mean_matrix(*rc.model.replicator));
  EnsembleReport rep = run_ensemble(cfg);

  std::vector<double> early, late;
  for (const auto& s : rep.summaries) {
    for (const auto& [t, dft] : s.defects) {
      if (t == 20.0) early.push_back(dft);
      if (t == 200.0) late.push_back(dft);
    }
  }
  double med_early = median_of(early);
  double med_late = median_of(late);
  res.pass = early.size() >= 30 && late.size() >= 30 && med_late < med_early;
  std::ostringstream d;
  d << early.size() << " checkpoints; median defect " << format_double(med_early) << " at t=20 vs "
    << format_double(med_late) << " at t=200";
  res.details = d.str();
  return res;
}

CheckResult check_exclusion(const Ctx& ctx) {
  CheckResult res{"dominated-exclusion",
                  "a strictly dominated strategy is driven to the boundary", false, "", 0};
  RunConfig rc = preset_runconfig("dominated-exclusion");
  TransitionLaw law = build_law(rc.model);
  VectorField field = replicator_field(replicator_mean_matrix(*rc.model.replicator));
  std::vector<EquilibriumReport> eqs = find_equilibria(field, rc.mf.opts, &law);
  bool no_interior = true;
  for (const auto& e : eqs)
    if (e.face.empty()) no_interior = false;

  EnsembleConfig cfg = ensemble_from(rc, law, ctx, rc.sim.seed);
  EnsembleReport rep = run_ensemble(cfg);
  int growth = 0, excluded = 0;
  for (const auto& s : rep.summaries) {
    if (s.outcome != Outcome::Growth) continue;
    ++growth;
    if (s.excluded_boundary) ++excluded;
  }
  double share = growth > 0 ? static_cast<double>(excluded) / growth : 0.0;
  res.pass = no_interior && growth >= 100 && share >= 0.95;
  std::ostringstream d;
  d << eqs.size() << " equilibria, interior absent: " << (no_interior ? "yes" : "no")
    << "; boundary approach on " << excluded << "/" << growth;
  res.details = d.str();
  return res;
}

CheckResult check_noise_bounds(const Ctx& ctx) {
  CheckResult res{"noise-bounds",
                  "martingale part bounded by 4m and bias constant stable in run length", false,
                  "", 0};
  struct ModelCase {
    std::string name;
    TransitionLaw law;
    CountVector z0;
  };
  std::vector<ModelCase> cases;
  {
    RunConfig rc = preset_runconfig("coordination-growth-rate");
    cases.push_back({"coordination", build_law(rc.model), rc.sim.z0});
  }
  {
    RunConfig rc = preset_runconfig("rps-time-average");
    cases.push_back({"rps", build_law(rc.model), rc.sim.z0});
  }
  {
    RunConfig rc = preset_runconfig("dominated-exclusion");
    cases.push_back({"dominated", build_law(rc.model), rc.sim.z0});
  }
  {
    RunConfig rc = preset_runconfig("birth-death-monotonicity");
    cases.push_back({"birth-death", build_law(rc.model), CountVector{50}});
  }
  {
    RunConfig rc = preset_runconfig("extinction-negative-drift");
    cases.push_back({"decay", build_law(rc.model), CountVector{2000, 2000}});
  }
  {
    RunConfig rc = preset_runconfig("hardy-weinberg-decay");
    cases.push_back({"fertility", build_law(rc.model), rc.sim.z0});
    MutationMatrix mu = MutationMatrix::identity(2);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        mu.rows[static_cast<size_t>(a)][static_cast<size_t>(b)] = a == b ? 0.98 : 0.01;
    cases.push_back({"fertility-mutation", mutation_fertility_law(*rc.model.fertility, mu),
                     rc.sim.z0});
  }

  bool all_ok = true;
  std::ostringstream d;
  for (const auto& mc : cases) {
    std::uint64_t seed = ctx.pick(111);
    Trajectory t1 = simulate(mc.law, mc.z0, StopCondition::steps(10000), seed, 1);
    Trajectory t2 = simulate(mc.law, mc.z0, StopCondition::steps(20000), seed, 1);
    NoiseDecomposition n1 = noise_decomposition(t1, mc.law);
    NoiseDecomposition n2 = noise_decomposition(t2, mc.law);
    double bound = 4.0 * mc.law.jump_bound;
    bool ok = n1.max_u_norm <= bound && n2.max_u_norm <= bound &&
              std::isfinite(n2.max_scaled_b) &&
              n2.max_scaled_b <= 2.0 * n1.max_scaled_b + 0.5;
    all_ok = all_ok && ok;
    d << mc.name << ": maxU " << format_double(n1.max_u_norm) << "<=" << format_double(bound)
      << ", K " << format_double(n1.max_scaled_b) << "->" << format_double(n2.max_scaled_b)
      << (ok ? " ok; " : " FAIL; ");
  }
  res.pass = all_ok;
  res.details = d.str();
  return res;
}

CheckResult check_determinism(const Ctx& ctx) {
  CheckResult res{"determinism-parallel",
                  "fixed seeds reproduce byte-identical results across reruns and worker counts",
                  false, "", 0};
  RunConfig rc = preset_runconfig("coordination-growth-rate");
  CoordinationSetup setup = coordination_setup(rc);

  auto run_with = [&](int threads) {
    EnsembleConfig cfg = ensemble_from(rc, setup.law, ctx, rc.sim.seed);
    cfg.replicates = 60;
    cfg.stop = StopCondition::steps(20000);
    cfg.growth_threshold = setup.threshold;
    cfg.equilibria = setup.equilibria;
    cfg.threads = threads;
    return ensemble_json(run_ensemble(cfg), true).dump();
  };
  std::string serial_a = run_with(1);
  std::string serial_b = run_with(1);
  std::string wide_a = run_with(8);
  std::string wide_b = run_with(8);

  auto traj_text = [&]() {
    Trajectory t = simulate(setup.law, rc.sim.z0, StopCondition::steps(5000), ctx.pick(7), 10);
    std::ostringstream o;
    write_ndjson(t, o);
    return o.str();
  };
  std::string t1 = traj_text();
  std::string t2 = traj_text();

  bool ok = serial_a == serial_b && wide_a == wide_b && serial_a == wide_a && t1 == t2;
  res.pass = ok;
  res.details = ok ? "ensemble and trajectory bytes identical across reruns and 1 vs 8 workers"
                   : "byte mismatch between runs";
  return res;
}

using CheckFn = CheckResult (*)(const Ctx&);

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> checks = {
      {"keystone-replicator-field", check_keystone},
      {"additive-fertility-identity", check_additive_identity},
      {"rps-time-average", check_rps_time_average},
      {"coordination-growth-rate", check_growth_rate},
      {"coordination-nonconvergence", check_nonconvergence},
      {"extinction-negative-drift", check_extinction},
      {"birth-death-monotonicity", check_monotonicity},
      {"hardy-weinberg-decay", check_hw_decay},
      {"pseudotrajectory-decay", check_pseudotrajectory},
      {"dominated-exclusion", check_exclusion},
      {"noise-bounds", check_noise_bounds},
      {"determinism-parallel", check_determinism},
  };
  return checks;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

bool is_scenario(const std::string& name) {
  if (name == "all") return true;
  for (const auto& [n, fn] : registry())
    if (n == name) return true;
  return false;
}

namespace {

// wall-clock budgets, seconds; 0 = unbounded
double time_budget(const std::string& name) {
  static const std::map<std::string, double> budgets = {
      {"keystone-replicator-field", 10.0}, {"additive-fertility-identity", 5.0},
      {"rps-time-average", 300.0},         {"coordination-growth-rate", 300.0},
      {"coordination-nonconvergence", 600.0}, {"extinction-negative-drift", 120.0},
      {"birth-death-monotonicity", 300.0}, {"hardy-weinberg-decay", 300.0},
      {"pseudotrajectory-decay", 300.0},   {"dominated-exclusion", 300.0},
  };
  auto it = budgets.find(name);
  return it == budgets.end() ? 0.0 : it->second;
}

}  // namespace

std::vector<CheckResult> run_scenarios(const std::string& name, int threads, std::uint64_t seed) {
  Ctx ctx{std::max(1, threads), seed};
  std::vector<CheckResult> results;
  for (const auto& [n, fn] : registry()) {
    if (name != "all" && name != n) continue;
    auto start = std::chrono::steady_clock::now();
    CheckResult r = fn(ctx);
    r.seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() -
                                                                  start)
            .count();
    double budget = time_budget(n);
    if (budget > 0.0 && r.seconds > budget) {
      r.pass = false;
      r.details += "; exceeded " + format_double(budget) + "s budget";
    }
    results.push_back(std::move(r));
  }
  if (results.empty()) throw std::invalid_argument("unknown scenario '" + name + "'");
  return results;
}

const std::map<std::string, std::string>& preset_configs() { return preset_map(); }

}  // namespace urn
