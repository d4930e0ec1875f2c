#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "urn/analysis.hpp"
#include "urn/diagnostics.hpp"
#include "urn/meanfield.hpp"

namespace urn {

nlohmann::json equilibrium_json(const EquilibriumReport& rep);
nlohmann::json equilibria_json(const std::vector<EquilibriumReport>& reps,
                               const std::string& provenance);
nlohmann::json ensemble_json(const EnsembleReport& rep, bool include_replicates = false);
nlohmann::json assumption_json(const AssumptionReport& rep);
nlohmann::json mass_study_json(const MassStudy& study);

std::string replicates_csv(const EnsembleReport& rep);
std::string defect_csv(const EnsembleReport& rep);
std::string timeavg_csv(const EnsembleReport& rep);
std::string path_csv(const IntegrationResult& path);
std::string masses_csv(const MassStudy& study);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
std::uint64_t fnv1a64(const std::string& bytes);

// {"artifacts": [{"path", "bytes", "fnv1a64"}, ...]} over the named files
// inside dir, sorted by path.
nlohmann::json manifest_for(const std::string& dir, const std::vector<std::string>& files);

}  // namespace urn
