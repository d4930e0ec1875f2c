#include "urn/report_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace urn {

nlohmann::json equilibrium_json(const EquilibriumReport& rep) {
  nlohmann::json j;
  j["x"] = rep.x;
  j["residual"] = rep.residual;
  nlohmann::json eigs = nlohmann::json::array();
  for (const auto& e : rep.eigenvalues) eigs.push_back({e.real(), e.imag()});
  j["eigs"] = eigs;
  j["class"] = stability_name(rep.stability);
  if (rep.lambda)
    j["lambda"] = *rep.lambda;
  else
    j["lambda"] = nullptr;
  j["face"] = rep.face;
  return j;
}

nlohmann::json equilibria_json(const std::vector<EquilibriumReport>& reps,
                               const std::string& provenance) {
  nlohmann::json j;
  j["field"] = provenance;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : reps) list.push_back(equilibrium_json(r));
  j["equilibria"] = list;
  return j;
}

nlohmann::json ensemble_json(const EnsembleReport& rep, bool include_replicates) {
  nlohmann::json j;
  j["replicates"] = rep.replicates;
  j["seed"] = rep.seed;
  j["growth_count"] = rep.growth_count;
  j["growth_fraction"] = rep.growth_fraction;
  j["growth_se"] = rep.growth_se;
  j["extinct_count"] = rep.extinct_count;
  j["extinct_fraction"] = rep.extinct_fraction;
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [id, count] : rep.limit_histogram)
    hist[id < 0 ? "unclassified" : std::to_string(id)] = count;
  j["limit_histogram"] = hist;
  if (!rep.mean_time_average.empty()) j["mean_time_average"] = rep.mean_time_average;
  if (!rep.mean_defect_curve.empty()) {
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& [t, d] : rep.mean_defect_curve) curve.push_back({t, d});
    j["mean_defect_curve"] = curve;
  }
  if (include_replicates) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& s : rep.summaries) {
      nlohmann::json r;
      r["index"] = s.index;
      r["outcome"] = outcome_name(s.outcome);
      if (s.rate)
        r["rate"] = *s.rate;
      else
        r["rate"] = nullptr;
      r["limit_id"] = s.limit_id;
      r["steps"] = s.steps;
      r["final_size"] = s.final_size;
      r["tau_max"] = s.tau_max;
      list.push_back(std::move(r));
    }
    j["replicate_summaries"] = list;
  }
  return j;
}

nlohmann::json assumption_json(const AssumptionReport& rep) {
  nlohmann::json j;
  j["jump_bound_ok"] = rep.jump_bound_ok;
  j["max_l1_seen"] = rep.max_l1_seen;
  j["lipschitz_estimate"] = rep.lipschitz_estimate;
  j["lipschitz_diverging"] = rep.lipschitz_diverging;
  j["a2_checked"] = rep.a2_checked;
  j["fitted_a"] = rep.fitted_a;
  j["a2_ok"] = rep.a2_ok;
  j["violations"] = rep.violations;
  return j;
}

nlohmann::json mass_study_json(const MassStudy& study) {
  nlohmann::json j;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : study.points) {
    nlohmann::json q;
    q["mass"] = p.mass;
    q["growth_fraction"] = p.growth_fraction;
    q["se"] = p.se;
    pts.push_back(std::move(q));
  }
  j["points"] = pts;
  j["nondecreasing"] = study.nondecreasing;
  return j;
}

std::string replicates_csv(const EnsembleReport& rep) {
  std::ostringstream o;
  o << "replicate,seed,outcome,rate,limit_id\n";
  for (const auto& s : rep.summaries) {
    o << s.index << ',' << rep.seed << ',' << outcome_name(s.outcome) << ',';
    if (s.rate) o << format_double(*s.rate);
    o << ',' << s.limit_id << '\n';
  }
  return o.str();
}

std::string defect_csv(const EnsembleReport& rep) {
  std::ostringstream o;
  o << "replicate,checkpoint,defect\n";
  for (const auto& s : rep.summaries)
    for (const auto& [t, d] : s.defects)
      o << s.index << ',' << format_double(t) << ',' << format_double(d) << '\n';
  return o.str();
}

std::string timeavg_csv(const EnsembleReport& rep) {
  std::ostringstream o;
  o << "replicate,partial";
  if (!rep.summaries.empty() && rep.summaries.front().time_average)
    for (size_t c = 0; c < rep.summaries.front().time_average->size(); ++c) o << ",x" << c + 1;
  o << '\n';
  for (const auto& s : rep.summaries) {
    if (!s.time_average) continue;
    o << s.index << ',' << (s.time_average_partial ? 1 : 0);
    for (double v : *s.time_average) o << ',' << format_double(v);
    o << '\n';
  }
  return o.str();
}

std::string path_csv(const IntegrationResult& path) {
  std::ostringstream o;
  o << "t";
  if (!path.states.empty())
    for (size_t c = 0; c < path.states.front().size(); ++c) o << ",x" << c + 1;
  o << '\n';
  for (size_t i = 0; i < path.times.size(); ++i) {
    o << format_double(path.times[i]);
    for (double v : path.states[i]) o << ',' << format_double(v);
    o << '\n';
  }
  return o.str();
}

std::string masses_csv(const MassStudy& study) {
  std::ostringstream o;
  o << "mass,growth_fraction,se\n";
  for (const auto& p : study.points)
    o << p.mass << ',' << format_double(p.growth_fraction) << ',' << format_double(p.se) << '\n';
  return o.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

nlohmann::json manifest_for(const std::string& dir, const std::vector<std::string>& files) {
  std::vector<std::string> sorted = files;
  std::sort(sorted.begin(), sorted.end());
  nlohmann::json artifacts = nlohmann::json::array();
  for (const auto& f : sorted) {
    std::string content = read_text_file(dir + "/" + f);
    nlohmann::json a;
    a["path"] = f;
    a["bytes"] = content.size();
    a["fnv1a64"] = fnv1a64(content);
    artifacts.push_back(std::move(a));
  }
  nlohmann::json j;
  j["artifacts"] = artifacts;
  return j;
}

}  // namespace urn
