#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "urn/analysis.hpp"
#include "urn/fertility.hpp"
#include "urn/law.hpp"
#include "urn/meanfield.hpp"
#include "urn/replicator.hpp"
#include "urn/trajectory.hpp"

namespace urn {

// Malformed configuration; messages carry "file:line:" anchors.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat-sectioned text: [section] headers, key = value lines, '#' comments.
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };
  using Section = std::map<std::string, Entry>;

  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text, const std::string& name);

  const std::string& name() const { return name_; }
  bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
  const Section& section(const std::string& s) const;
  const std::map<std::string, Section>& sections() const { return sections_; }

 private:
  std::string name_;
  std::map<std::string, Section> sections_;
};

enum class ModelKind { Replicator, Fertility, FertilityMutation, BirthDeath };
std::string model_kind_name(ModelKind k);

struct ModelConfig {
  ModelKind kind = ModelKind::BirthDeath;
  std::optional<ReplicatorSpec> replicator;
  std::optional<FertilitySpec> fertility;
  std::optional<MutationMatrix> mutation;
  double up = 0.0;  // birth-death rates
  double down = 0.0;
  int dimension = 0;  // state coordinates of the resulting law
};

struct SimulationSection {
  CountVector z0;
  StopCondition stop = StopCondition::steps(10000);
  std::uint64_t seed = 1;
  std::int64_t stride = 1;
};

struct MeanFieldSection {
  MeanFieldOptions opts;
  std::vector<double> flow_x0;
  double flow_T = 0.0;
};

struct EnsembleSectionCfg {
  int replicates = 100;
  double threshold = 0.0;  // 0 = auto (half the smallest positive stable-equilibrium rate)
  double tail = 0.2;
  double classify_tol = 0.05;
  std::vector<double> checkpoints;
  double defect_T = 5.0;
  double timeavg_T = 0.0;  // 0 = off
  std::vector<std::int64_t> masses;
  double exclusion_tol = 0.0;  // 0 = off
};

struct OutputSection {
  std::string dir = "out";
};

struct RunConfig {
  ModelConfig model;
  bool has_model = false;
  SimulationSection sim;
  MeanFieldSection mf;
  EnsembleSectionCfg ens;
  OutputSection out;
  std::optional<std::string> preset;

  // Validates sections and keys (unknown ones are rejected with their line),
  // fills documented defaults, and cross-checks dimensions.
  static RunConfig resolve(const ConfigFile& file);

  // Canonical text whose resolution reproduces this configuration.
  std::string echo() const;
};

TransitionLaw build_law(const ModelConfig& model);

}  // namespace urn
