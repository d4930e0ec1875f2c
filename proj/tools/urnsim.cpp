#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "urn/analysis.hpp"
#include "urn/config.hpp"
#include "urn/meanfield.hpp"
#include "urn/report_io.hpp"
#include "urn/scenarios.hpp"
#include "urn/trajectory.hpp"

namespace fs = std::filesystem;
using namespace urn;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  std::string preset;
  std::uint64_t seed = 0;  // 0 = keep config seed
  int threads = 0;         // 0 = default
};

int default_threads() {
  if (const char* env = std::getenv("URNSIM_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

RunConfig load_config(const GlobalOpts& opts) {
  if (opts.config_path.empty())
    throw ConfigError("a --config file is required for this command");
  RunConfig rc = RunConfig::resolve(ConfigFile::parse_file(opts.config_path));
  if (opts.seed != 0) rc.sim.seed = opts.seed;
  if (!opts.out_dir.empty()) rc.out.dir = opts.out_dir;
  return rc;
}

void require_model(const RunConfig& rc, const std::string& cmd) {
  if (!rc.has_model)
    throw ConfigError(cmd + " needs a [model] section in the config");
}

struct OutputDir {
  fs::path dir;
  std::vector<std::string> files;

  explicit OutputDir(const std::string& path) : dir(path) { fs::create_directories(dir); }

  void write(const std::string& name, const std::string& content) {
    write_text_file((dir / name).string(), content);
    files.push_back(name);
  }

  void finish() {
    nlohmann::json manifest = manifest_for(dir.string(), files);
    write_text_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
  }
};

// Chooses the natural field for the configured model.
VectorField model_field(const RunConfig& rc, const TransitionLaw& law) {
  switch (rc.model.kind) {
    case ModelKind::Replicator:
      return replicator_field(replicator_mean_matrix(*rc.model.replicator));
    case ModelKind::Fertility:
    case ModelKind::FertilityMutation: {
      if (rc.model.fertility->additive_gamma && rc.model.kind == ModelKind::Fertility)
        return additive_fertility_field(*rc.model.fertility->additive_gamma);
      return mean_vector_field(law);
    }
    case ModelKind::BirthDeath: return mean_vector_field(law);
  }
  throw std::logic_error("unreachable model kind");
}

int cmd_simulate(const GlobalOpts& opts) {
  RunConfig rc = load_config(opts);
  require_model(rc, "simulate");
  TransitionLaw law = build_law(rc.model);
  Trajectory traj = simulate(law, rc.sim.z0, rc.sim.stop, rc.sim.seed, rc.sim.stride);

  OutputDir out(rc.out.dir);
  std::ostringstream nd;
  write_ndjson(traj, nd);
  out.write("trajectory.ndjson", nd.str());

  nlohmann::json summary;
  summary["steps"] = traj.final_step();
  summary["tau_max"] = traj.final_tau();
  summary["outcome"] =
      traj.extinct ? "extinct" : (traj.truncated ? "truncated" : "completed");
  summary["final_z"] = traj.back().z;
  summary["seed"] = rc.sim.seed;
  out.write("summary.json", summary.dump(2) + "\n");
  out.write("resolved.cfg", rc.echo());
  out.finish();
  std::cout << "steps=" << traj.final_step() << " tau_max=" << format_double(traj.final_tau())
            << " outcome=" << summary["outcome"].get<std::string>() << "\n";
  return 0;
}

int cmd_field(const GlobalOpts& opts, const std::string& flow_x0, double flow_T) {
  RunConfig rc = load_config(opts);
  require_model(rc, "field");
  TransitionLaw law = build_law(rc.model);
  if (!law.enumerable())
    throw ConfigError("field analysis needs an enumerable model");
  VectorField field = model_field(rc, law);
  std::vector<EquilibriumReport> eqs = find_equilibria(field, rc.mf.opts, &law);

  OutputDir out(rc.out.dir);
  out.write("equilibria.json", equilibria_json(eqs, field.provenance).dump(2) + "\n");

  std::vector<double> x0 = rc.mf.flow_x0;
  double T = rc.mf.flow_T;
  if (!flow_x0.empty()) {
    x0.clear();
    std::istringstream in(flow_x0);
    double v;
    while (in >> v) x0.push_back(v);
    T = flow_T;
  }
  if (!x0.empty() && T > 0) {
    if (static_cast<int>(x0.size()) != field.dimension)
      throw ConfigError("flow start needs " + std::to_string(field.dimension) + " coordinates");
    IntegrationResult path = integrate(field, x0, T, rc.mf.opts.h,
                                       std::max(1, static_cast<int>(T / rc.mf.opts.h / 2000)));
    out.write("flow.csv", path_csv(path));
  }
  out.write("resolved.cfg", rc.echo());
  out.finish();
  std::cout << eqs.size() << " equilibria written\n";
  return 0;
}

int cmd_montecarlo(const GlobalOpts& opts) {
  RunConfig rc = load_config(opts);
  require_model(rc, "montecarlo");
  TransitionLaw law = build_law(rc.model);

  EnsembleConfig cfg;
  cfg.law = law;
  cfg.z0 = rc.sim.z0;
  cfg.stop = rc.sim.stop;
  cfg.replicates = rc.ens.replicates;
  cfg.tail_fraction = rc.ens.tail;
  cfg.seed = rc.sim.seed;
  cfg.threads = opts.threads > 0 ? opts.threads : default_threads();
  cfg.record_stride = rc.sim.stride;
  cfg.classify_tol = rc.ens.classify_tol;
  cfg.defect_checkpoints = rc.ens.checkpoints;
  cfg.defect_T = rc.ens.defect_T;
  if (rc.ens.timeavg_T > 0) cfg.time_average_T = rc.ens.timeavg_T;
  cfg.exclusion_tol = rc.ens.exclusion_tol;
  if (rc.model.kind == ModelKind::Fertility || rc.model.kind == ModelKind::FertilityMutation) {
    cfg.hw_decay = true;
    cfg.hw_alleles = rc.model.fertility->alleles;
  }

  std::vector<EquilibriumReport> eqs;
  if (law.enumerable()) {
    VectorField field = model_field(rc, law);
    if (field.dimension == law.dimension) {
      eqs = find_equilibria(field, rc.mf.opts, &law);
      cfg.equilibria = eqs;
      if (!rc.ens.checkpoints.empty()) cfg.field = field;
    }
  }
  if (rc.ens.threshold > 0) {
    cfg.growth_threshold = rc.ens.threshold;
  } else {
    double lam_min = std::numeric_limits<double>::infinity();
    for (const auto& e : eqs)
      if (e.stability == Stability::Stable && e.lambda && *e.lambda > 0)
        lam_min = std::min(lam_min, *e.lambda);
    if (!std::isfinite(lam_min))
      throw ConfigError(
          "threshold = auto needs a stable equilibrium with positive growth rate; set a number");
    cfg.growth_threshold = lam_min / 2.0;
  }

  OutputDir out(rc.out.dir);
  if (!rc.ens.masses.empty()) {
    CountVector shape = rc.sim.z0;
    if (total_count(shape) == 0) shape.assign(shape.size(), 1);
    MassStudy study = mass_monotonicity_study(cfg, shape, rc.ens.masses);
    out.write("masses.csv", masses_csv(study));
    out.write("mass_study.json", mass_study_json(study).dump(2) + "\n");
    std::cout << "mass study: " << (study.nondecreasing ? "nondecreasing" : "trend violated")
              << "\n";
  } else {
    EnsembleReport rep = run_ensemble(cfg);
    out.write("ensemble.json", ensemble_json(rep, true).dump(2) + "\n");
    out.write("replicates.csv", replicates_csv(rep));
    if (!rep.mean_defect_curve.empty()) out.write("defect_curve.csv", defect_csv(rep));
    if (!rep.mean_time_average.empty()) out.write("timeavg.csv", timeavg_csv(rep));
    if (!eqs.empty())
      out.write("equilibria.json",
                equilibria_json(eqs, "model mean field").dump(2) + "\n");
    std::cout << "growth " << rep.growth_count << "/" << rep.replicates << " extinct "
              << rep.extinct_count << "\n";
  }
  out.write("resolved.cfg", rc.echo());
  out.finish();
  return 0;
}

int cmd_verify(const GlobalOpts& opts) {
  std::string preset = opts.preset;
  std::string out_dir = opts.out_dir.empty() ? "out" : opts.out_dir;
  if (preset.empty()) {
    RunConfig rc = load_config(opts);
    if (!rc.preset)
      throw ConfigError("verify needs --preset NAME or a [verify] preset in the config");
    preset = *rc.preset;
    if (opts.out_dir.empty()) out_dir = rc.out.dir;
  }
  if (!is_scenario(preset))
    throw ConfigError("unknown preset '" + preset + "'");

  int threads = opts.threads > 0 ? opts.threads : default_threads();
  std::vector<CheckResult> results = run_scenarios(preset, threads, opts.seed);

  OutputDir out(out_dir);
  nlohmann::json j = nlohmann::json::array();
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.id << ": " << r.name << " ["
              << format_double(r.seconds) << "s]\n      " << r.details << "\n";
    nlohmann::json e;
    e["id"] = r.id;
    e["name"] = r.name;
    e["pass"] = r.pass;
    e["details"] = r.details;
    e["seconds"] = r.seconds;
    j.push_back(std::move(e));
    all_pass = all_pass && r.pass;
  }
  out.write("verify.json", j.dump(2) + "\n");
  out.finish();
  std::cout << (all_pass ? "all checks passed" : "some checks FAILED") << "\n";
  return all_pass ? 0 : 1;
}

int cmd_preset(const std::string& name) {
  const auto& presets = preset_configs();
  if (name.empty()) {
    for (const auto& [n, text] : presets) std::cout << n << "\n";
    return 0;
  }
  auto it = presets.find(name);
  if (it == presets.end()) throw ConfigError("unknown preset '" + name + "'");
  std::cout << it->second;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"urnsim: growth, extinction and composition dynamics of interacting populations"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand name

  GlobalOpts opts;
  app.add_option("--config", opts.config_path, "configuration file")->envname("URNSIM_CONFIG");
  app.add_option("--seed", opts.seed, "override the config seed");
  app.add_option("--out", opts.out_dir, "override the output directory");
  app.add_option("--threads", opts.threads, "worker threads (default: URNSIM_THREADS or cores)");
  app.add_option("--preset", opts.preset, "bundled scenario preset name");

  std::string flow_x0;
  double flow_T = 0.0;
  auto* sim = app.add_subcommand("simulate", "run one trajectory and write it as NDJSON");
  auto* field = app.add_subcommand("field", "find and classify mean-field equilibria");
  field->add_option("--flow", flow_x0, "start point for a flow path (space separated)");
  field->add_option("--T", flow_T, "flow duration for --flow");
  auto* mc = app.add_subcommand("montecarlo", "run a replicate ensemble and aggregate it");
  auto* verify = app.add_subcommand("verify", "run a bundled verification scenario");
  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "list bundled presets or print one");
  preset->add_option("name", preset_name, "preset to print");

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return cmd_simulate(opts);
    if (field->parsed()) return cmd_field(opts, flow_x0, flow_T);
    if (mc->parsed()) return cmd_montecarlo(opts);
    if (verify->parsed()) return cmd_verify(opts);
    if (preset->parsed()) return cmd_preset(preset_name);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
