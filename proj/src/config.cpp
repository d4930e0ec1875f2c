#include "urn/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace urn {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string anchor(const std::string& file, int line) {
  return file + ":" + std::to_string(line) + ": ";
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& name) {
  ConfigFile cfg;
  cfg.name_ = name;
  std::istringstream in(text);
  std::string line;
  std::string current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(anchor(name, lineno) + "unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw ConfigError(anchor(name, lineno) + "empty section name");
      cfg.sections_[current];  // sections may repeat; keys merge
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(anchor(name, lineno) + "expected key = value");
    if (current.empty())
      throw ConfigError(anchor(name, lineno) + "key outside any [section]");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(anchor(name, lineno) + "empty key");
    auto& section = cfg.sections_[current];
    if (section.count(key))
      throw ConfigError(anchor(name, lineno) + "duplicate key '" + key + "'");
    section[key] = {value, lineno};
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

const ConfigFile::Section& ConfigFile::section(const std::string& s) const {
  auto it = sections_.find(s);
  if (it == sections_.end()) throw ConfigError(name_ + ": missing section [" + s + "]");
  return it->second;
}

std::string model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Replicator: return "replicator";
    case ModelKind::Fertility: return "fertility";
    case ModelKind::FertilityMutation: return "fertility-mutation";
    case ModelKind::BirthDeath: return "birth-death";
  }
  return "unknown";
}

namespace {

// Typed reads with line-anchored errors.
struct SectionReader {
  const ConfigFile& file;
  std::string section_name;
  const ConfigFile::Section* section = nullptr;
  std::set<std::string> consumed;

  SectionReader(const ConfigFile& f, const std::string& name) : file(f), section_name(name) {
    if (f.has_section(name)) section = &f.section(name);
  }

  bool present() const { return section != nullptr; }

  const ConfigFile::Entry* find(const std::string& key) {
    if (section == nullptr) return nullptr;
    auto it = section->find(key);
    if (it == section->end()) return nullptr;
    consumed.insert(key);
    return &it->second;
  }

  [[noreturn]] void fail(const ConfigFile::Entry& e, const std::string& msg) {
    throw ConfigError(anchor(file.name(), e.line) + "[" + section_name + "] " + msg);
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    const auto* e = find(key);
    return e ? e->value : fallback;
  }

  double get_double(const std::string& key, double fallback) {
    const auto* e = find(key);
    if (!e) return fallback;
    try {
      size_t used = 0;
      double v = std::stod(e->value, &used);
      if (trim(e->value.substr(used)).size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      fail(*e, key + " expects a number, got '" + e->value + "'");
    }
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) {
    const auto* e = find(key);
    if (!e) return fallback;
    try {
      size_t used = 0;
      long long v = std::stoll(e->value, &used);
      if (trim(e->value.substr(used)).size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      fail(*e, key + " expects an integer, got '" + e->value + "'");
    }
  }

  bool get_bool(const std::string& key, bool fallback) {
    const auto* e = find(key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1") return true;
    if (e->value == "false" || e->value == "0") return false;
    fail(*e, key + " expects true/false");
  }

  std::vector<double> get_double_list(const std::string& key) {
    const auto* e = find(key);
    std::vector<double> out;
    if (!e) return out;
    for (const auto& t : tokens(e->value)) {
      try {
        out.push_back(std::stod(t));
      } catch (...) {
        fail(*e, key + " expects numbers, got '" + t + "'");
      }
    }
    return out;
  }

  std::vector<std::int64_t> get_int_list(const std::string& key) {
    const auto* e = find(key);
    std::vector<std::int64_t> out;
    if (!e) return out;
    for (const auto& t : tokens(e->value)) {
      try {
        out.push_back(std::stoll(t));
      } catch (...) {
        fail(*e, key + " expects integers, got '" + t + "'");
      }
    }
    return out;
  }

  // rows split by ';', entries by whitespace
  Matrix get_matrix(const std::string& key) {
    const auto* e = find(key);
    Matrix out;
    if (!e) return out;
    for (const auto& row : split(e->value, ';')) {
      std::vector<double> r;
      for (const auto& t : tokens(row)) {
        try {
          r.push_back(std::stod(t));
        } catch (...) {
          fail(*e, key + " expects numeric rows, got '" + t + "'");
        }
      }
      out.push_back(std::move(r));
    }
    return out;
  }

  // rows split by ';', law descriptors by '|'
  std::vector<std::vector<IntLaw>> get_law_matrix(const std::string& key) {
    const auto* e = find(key);
    std::vector<std::vector<IntLaw>> out;
    if (!e) return out;
    for (const auto& row : split(e->value, ';')) {
      std::vector<IntLaw> r;
      for (const auto& d : split(row, '|')) {
        try {
          r.push_back(IntLaw::parse(d));
        } catch (const std::exception& ex) {
          fail(*e, key + ": " + ex.what());
        }
      }
      out.push_back(std::move(r));
    }
    return out;
  }

  void reject_unknown() {
    if (!section) return;
    for (const auto& [key, entry] : *section)
      if (!consumed.count(key))
        fail(entry, "unknown key '" + key + "'");
  }
};

ModelConfig resolve_model(const ConfigFile& file) {
  SectionReader model(file, "model");
  if (!model.present())
    throw ConfigError(file.name() + ": missing section [model]");
  std::string type = model.get_string("type", "");
  if (type.empty()) throw ConfigError(file.name() + ": [model] needs a type");
  ModelConfig out;

  auto as_int = [&](const std::string& key, std::int64_t fallback) {
    return static_cast<int>(model.get_int(key, fallback));
  };

  if (type == "replicator") {
    out.kind = ModelKind::Replicator;
    int k = as_int("k", 0);
    if (k <= 0) throw ConfigError(file.name() + ": [model] replicator needs k >= 1");
    ReplicatorSpec spec;
    spec.strategies = k;
    auto first = model.get_law_matrix("R");
    if (first.empty()) throw ConfigError(file.name() + ": [model] replicator needs R");
    spec.progeny_first = first;
    const auto* r2e = model.find("R2");
    if (r2e == nullptr || r2e->value == "same") {
      spec.progeny_second = first;
    } else {
      std::vector<std::vector<IntLaw>> second;
      for (const auto& row : split(r2e->value, ';')) {
        std::vector<IntLaw> r;
        for (const auto& d : split(row, '|')) {
          try {
            r.push_back(IntLaw::parse(d));
          } catch (const std::exception& ex) {
            model.fail(*r2e, std::string("R2: ") + ex.what());
          }
        }
        second.push_back(std::move(r));
      }
      spec.progeny_second = std::move(second);
    }
    auto self_row = model.get_law_matrix("r");
    if (self_row.empty())
      spec.self_progeny.assign(static_cast<size_t>(k), IntLaw::constant(0));
    else if (self_row.size() == 1 && static_cast<int>(self_row[0].size()) == k)
      spec.self_progeny = self_row[0];
    else
      throw ConfigError(file.name() + ": [model] r must be a single row of k laws");
    int max_entry = 1;
    for (const auto& row : spec.progeny_first)
      for (const auto& law : row) max_entry = std::max(max_entry, law.max_value());
    for (const auto& row : spec.progeny_second)
      for (const auto& law : row) max_entry = std::max(max_entry, law.max_value());
    for (const auto& law : spec.self_progeny) max_entry = std::max(max_entry, law.max_value());
    spec.max_progeny = max_entry;
    spec.validate();
    out.replicator = spec;
    out.dimension = k;
  } else if (type == "fertility" || type == "fertility-mutation") {
    out.kind = type == "fertility" ? ModelKind::Fertility : ModelKind::FertilityMutation;
    int k = as_int("k", 0);
    if (k <= 0 || k > 9)
      throw ConfigError(file.name() + ": [model] fertility needs 1 <= k <= 9");
    GenotypeLayout lay{k};
    Matrix gamma = model.get_matrix("gamma");
    if (!gamma.empty()) {
      out.fertility = FertilitySpec::additive(gamma);
    } else {
      // explicit per-pair tables: G_<c1>_<c2> with classes named by allele digits
      std::vector<std::vector<IntLaw>> laws(
          static_cast<size_t>(lay.classes()),
          std::vector<IntLaw>(static_cast<size_t>(lay.classes()), IntLaw::constant(0)));
      std::vector<std::vector<bool>> seen(static_cast<size_t>(lay.classes()),
                                          std::vector<bool>(static_cast<size_t>(lay.classes())));
      for (int c1 = 0; c1 < lay.classes(); ++c1) {
        for (int c2 = c1; c2 < lay.classes(); ++c2) {
          auto [i, j] = lay.class_pair(c1);
          auto [r, s] = lay.class_pair(c2);
          std::string key = "G_" + std::to_string(i + 1) + std::to_string(j + 1) + "_" +
                            std::to_string(r + 1) + std::to_string(s + 1);
          const auto* e = model.find(key);
          if (!e) continue;
          IntLaw law = IntLaw::parse(e->value);
          laws[static_cast<size_t>(c1)][static_cast<size_t>(c2)] = law;
          laws[static_cast<size_t>(c2)][static_cast<size_t>(c1)] = law;
          seen[static_cast<size_t>(c1)][static_cast<size_t>(c2)] = true;
          seen[static_cast<size_t>(c2)][static_cast<size_t>(c1)] = true;
        }
      }
      bool any = false, all = true;
      for (const auto& row : seen)
        for (bool b : row) {
          any = any || b;
          all = all && b;
        }
      if (!any)
        throw ConfigError(file.name() + ": [model] fertility needs gamma or a full G_* table");
      if (!all)
        throw ConfigError(file.name() + ": [model] incomplete G_* table");
      out.fertility = FertilitySpec::from_laws(k, laws);
    }
    if (out.kind == ModelKind::FertilityMutation) {
      MutationMatrix mu = MutationMatrix::identity(k);
      // off-diagonal entries mu_<src>_<dst>; each row's diagonal absorbs the rest
      for (int c1 = 0; c1 < lay.classes(); ++c1) {
        double off = 0.0;
        for (int c2 = 0; c2 < lay.classes(); ++c2) {
          if (c1 == c2) continue;
          auto [i, j] = lay.class_pair(c1);
          auto [r, s] = lay.class_pair(c2);
          std::string key = "mu_" + std::to_string(i + 1) + std::to_string(j + 1) + "_" +
                            std::to_string(r + 1) + std::to_string(s + 1);
          const auto* e = model.find(key);
          if (!e) continue;
          double v = 0.0;
          try {
            v = std::stod(e->value);
          } catch (...) {
            model.fail(*e, key + " expects a probability");
          }
          if (v < 0.0 || v > 1.0) model.fail(*e, key + " outside [0,1]");
          mu.rows[static_cast<size_t>(c1)][static_cast<size_t>(c2)] = v;
          off += v;
        }
        if (off > 1.0 + 1e-12)
          throw ConfigError(file.name() + ": [model] mutation row for class " +
                            lay.class_name(c1) + " exceeds one");
        mu.rows[static_cast<size_t>(c1)][static_cast<size_t>(c1)] = std::max(0.0, 1.0 - off);
      }
      mu.validate();
      out.mutation = mu;
    }
    out.dimension = lay.dimension();
  } else if (type == "birth-death") {
    out.kind = ModelKind::BirthDeath;
    int k = as_int("k", 1);
    out.up = model.get_double("up", 0.0);
    out.down = model.get_double("down", 0.0);
    out.dimension = k;
    if (out.up < 0 || out.down < 0 || out.up + out.down > 1.0 + 1e-12)
      throw ConfigError(file.name() + ": [model] birth-death rates must satisfy up+down <= 1");
  } else {
    throw ConfigError(file.name() + ": [model] unknown type '" + type + "'");
  }
  model.reject_unknown();
  return out;
}

}  // namespace

TransitionLaw build_law(const ModelConfig& model) {
  switch (model.kind) {
    case ModelKind::Replicator: return replicator_law(*model.replicator);
    case ModelKind::Fertility: return fertility_law(*model.fertility);
    case ModelKind::FertilityMutation:
      return mutation_fertility_law(*model.fertility, *model.mutation);
    case ModelKind::BirthDeath: return birth_death_law(model.dimension, model.up, model.down);
  }
  throw std::logic_error("unreachable model kind");
}

RunConfig RunConfig::resolve(const ConfigFile& file) {
  static const std::set<std::string> known_sections = {"model",    "simulation", "meanfield",
                                                       "ensemble", "verify",     "output"};
  for (const auto& [name, section] : file.sections()) {
    if (!known_sections.count(name)) {
      int line = section.empty() ? 0 : section.begin()->second.line;
      throw ConfigError(anchor(file.name(), line) + "unknown section [" + name + "]");
    }
  }

  RunConfig out;
  SectionReader verify(file, "verify");
  if (verify.present()) {
    std::string preset = verify.get_string("preset", "");
    if (preset.empty()) throw ConfigError(file.name() + ": [verify] needs preset = NAME");
    out.preset = preset;
    verify.reject_unknown();
  }

  if (file.has_section("model")) {
    out.model = resolve_model(file);
    out.has_model = true;
  }

  SectionReader sim(file, "simulation");
  if (sim.present()) {
    if (!out.has_model)
      throw ConfigError(file.name() + ": [simulation] requires a [model] section");
    const auto* z0e = sim.find("z0");
    if (z0e == nullptr)
      throw ConfigError(file.name() + ": [simulation] needs z0");
    CountVector z0;
    if (out.model.kind == ModelKind::Fertility || out.model.kind == ModelKind::FertilityMutation) {
      // genotype matrix, rows split by ';'
      GenotypeLayout lay{out.model.fertility->alleles};
      std::vector<std::vector<std::string>> rows;
      for (const auto& row : split(z0e->value, ';')) rows.push_back(tokens(row));
      if (static_cast<int>(rows.size()) != lay.alleles)
        sim.fail(*z0e, "z0 needs k genotype-count rows separated by ';'");
      z0.assign(static_cast<size_t>(lay.dimension()), 0);
      for (int i = 0; i < lay.alleles; ++i) {
        if (static_cast<int>(rows[static_cast<size_t>(i)].size()) != lay.alleles)
          sim.fail(*z0e, "z0 rows need k entries");
        for (int j = 0; j < lay.alleles; ++j) {
          try {
            z0[static_cast<size_t>(lay.idx(i, j))] =
                std::stoll(rows[static_cast<size_t>(i)][static_cast<size_t>(j)]);
          } catch (...) {
            sim.fail(*z0e, "z0 expects integer genotype counts");
          }
        }
      }
      if (!lay.valid_state(z0))
        sim.fail(*z0e, "z0 is not a valid genotype state (symmetric, even diagonal)");
    } else {
      for (const auto& t : tokens(z0e->value)) {
        try {
          z0.push_back(std::stoll(t));
        } catch (...) {
          sim.fail(*z0e, "z0 expects integers");
        }
      }
      if (static_cast<int>(z0.size()) != out.model.dimension)
        sim.fail(*z0e, "z0 needs " + std::to_string(out.model.dimension) + " entries");
    }
    out.sim.z0 = z0;

    std::int64_t steps = sim.get_int("steps", 0);
    double clock = sim.get_double("clock", 0.0);
    bool until_extinct = sim.get_bool("until_extinct", false);
    std::int64_t cap = sim.get_int("hard_cap", 50'000'000);
    int chosen = (steps > 0 ? 1 : 0) + (clock > 0 ? 1 : 0) + (until_extinct ? 1 : 0);
    if (chosen != 1)
      throw ConfigError(file.name() +
                        ": [simulation] needs exactly one of steps, clock, until_extinct");
    if (steps > 0)
      out.sim.stop = StopCondition::steps(steps);
    else if (clock > 0)
      out.sim.stop = StopCondition::clock(clock);
    else
      out.sim.stop = StopCondition::extinction(cap);
    out.sim.stop.hard_cap = cap;
    out.sim.seed = static_cast<std::uint64_t>(sim.get_int("seed", 1));
    out.sim.stride = sim.get_int("stride", 1);
    if (out.sim.stride < 0) throw ConfigError(file.name() + ": [simulation] stride must be >= 0");
    sim.reject_unknown();
  } else if (out.has_model && out.model.dimension > 0) {
    out.sim.z0.assign(static_cast<size_t>(out.model.dimension), 0);
  }

  SectionReader mf(file, "meanfield");
  if (mf.present()) {
    out.mf.opts.h = mf.get_double("h", out.mf.opts.h);
    out.mf.opts.newton_tol = mf.get_double("newton_tol", out.mf.opts.newton_tol);
    out.mf.opts.dedupe_tol = mf.get_double("dedupe_tol", out.mf.opts.dedupe_tol);
    out.mf.opts.fd_step = mf.get_double("fd_step", out.mf.opts.fd_step);
    out.mf.opts.hyperbolicity_tol =
        mf.get_double("hyperbolicity_tol", out.mf.opts.hyperbolicity_tol);
    out.mf.opts.support_eps = mf.get_double("support_eps", out.mf.opts.support_eps);
    out.mf.opts.grid_density = static_cast<int>(mf.get_int("grid_density", out.mf.opts.grid_density));
    out.mf.flow_x0 = mf.get_double_list("flow_x0");
    out.mf.flow_T = mf.get_double("flow_T", 0.0);
    mf.reject_unknown();
  }

  SectionReader ens(file, "ensemble");
  if (ens.present()) {
    out.ens.replicates = static_cast<int>(ens.get_int("replicates", 100));
    std::string thr = ens.get_string("threshold", "auto");
    if (thr != "auto") {
      try {
        out.ens.threshold = std::stod(thr);
      } catch (...) {
        throw ConfigError(file.name() + ": [ensemble] threshold expects a number or auto");
      }
    }
    out.ens.tail = ens.get_double("tail", 0.2);
    out.ens.classify_tol = ens.get_double("classify_tol", 0.05);
    out.ens.checkpoints = ens.get_double_list("checkpoints");
    out.ens.defect_T = ens.get_double("defect_T", 5.0);
    out.ens.timeavg_T = ens.get_double("timeavg_T", 0.0);
    out.ens.masses = ens.get_int_list("masses");
    out.ens.exclusion_tol = ens.get_double("exclusion_tol", 0.0);
    ens.reject_unknown();
  }

  SectionReader output(file, "output");
  if (output.present()) {
    out.out.dir = output.get_string("dir", "out");
    output.reject_unknown();
  }

  return out;
}

namespace {

std::string law_matrix_text(const std::vector<std::vector<IntLaw>>& m) {
  std::ostringstream o;
  for (size_t i = 0; i < m.size(); ++i) {
    if (i) o << " ; ";
    for (size_t j = 0; j < m[i].size(); ++j) {
      if (j) o << " | ";
      o << m[i][j].describe();
    }
  }
  return o.str();
}

std::string matrix_text(const Matrix& m) {
  std::ostringstream o;
  for (size_t i = 0; i < m.size(); ++i) {
    if (i) o << " ; ";
    for (size_t j = 0; j < m[i].size(); ++j) {
      if (j) o << ' ';
      o << format_double(m[i][j]);
    }
  }
  return o.str();
}

}  // namespace

std::string RunConfig::echo() const {
  std::ostringstream o;
  if (has_model) {
    o << "[model]\n";
    o << "type = " << model_kind_name(model.kind) << "\n";
    switch (model.kind) {
      case ModelKind::Replicator: {
        const auto& s = *model.replicator;
        o << "k = " << s.strategies << "\n";
        o << "R = " << law_matrix_text(s.progeny_first) << "\n";
        o << "R2 = " << law_matrix_text(s.progeny_second) << "\n";
        std::ostringstream r;
        for (size_t i = 0; i < s.self_progeny.size(); ++i) {
          if (i) r << " | ";
          r << s.self_progeny[i].describe();
        }
        o << "r = " << r.str() << "\n";
        break;
      }
      case ModelKind::Fertility:
      case ModelKind::FertilityMutation: {
        const auto& s = *model.fertility;
        o << "k = " << s.alleles << "\n";
        if (s.additive_gamma) {
          o << "gamma = " << matrix_text(*s.additive_gamma) << "\n";
        } else {
          GenotypeLayout lay = s.layout();
          for (int c1 = 0; c1 < lay.classes(); ++c1)
            for (int c2 = c1; c2 < lay.classes(); ++c2) {
              auto [i, j] = lay.class_pair(c1);
              auto [r2, s2] = lay.class_pair(c2);
              o << "G_" << i + 1 << j + 1 << "_" << r2 + 1 << s2 + 1 << " = "
                << s.progeny[static_cast<size_t>(c1)][static_cast<size_t>(c2)].describe() << "\n";
            }
        }
        if (model.kind == ModelKind::FertilityMutation) {
          GenotypeLayout lay = s.layout();
          for (int c1 = 0; c1 < lay.classes(); ++c1)
            for (int c2 = 0; c2 < lay.classes(); ++c2) {
              if (c1 == c2) continue;
              double v = model.mutation->rows[static_cast<size_t>(c1)][static_cast<size_t>(c2)];
              if (v > 0.0) {
                auto [i, j] = lay.class_pair(c1);
                auto [r2, s2] = lay.class_pair(c2);
                o << "mu_" << i + 1 << j + 1 << "_" << r2 + 1 << s2 + 1 << " = "
                  << format_double(v) << "\n";
              }
            }
        }
        break;
      }
      case ModelKind::BirthDeath:
        o << "k = " << model.dimension << "\n";
        o << "up = " << format_double(model.up) << "\n";
        o << "down = " << format_double(model.down) << "\n";
        break;
    }
    o << "\n";
  }

  o << "[simulation]\n";
  if (has_model && (model.kind == ModelKind::Fertility ||
                    model.kind == ModelKind::FertilityMutation)) {
    GenotypeLayout lay{model.fertility->alleles};
    o << "z0 = ";
    for (int i = 0; i < lay.alleles; ++i) {
      if (i) o << " ; ";
      for (int j = 0; j < lay.alleles; ++j) {
        if (j) o << ' ';
        o << sim.z0[static_cast<size_t>(lay.idx(i, j))];
      }
    }
    o << "\n";
  } else {
    o << "z0 =";
    for (auto v : sim.z0) o << ' ' << v;
    o << "\n";
  }
  switch (sim.stop.kind) {
    case StopCondition::Kind::MaxSteps: o << "steps = " << sim.stop.max_steps << "\n"; break;
    case StopCondition::Kind::MaxClock:
      o << "clock = " << format_double(sim.stop.max_clock) << "\n";
      break;
    case StopCondition::Kind::Extinction: o << "until_extinct = true\n"; break;
  }
  o << "hard_cap = " << sim.stop.hard_cap << "\n";
  o << "seed = " << sim.seed << "\n";
  o << "stride = " << sim.stride << "\n\n";

  o << "[meanfield]\n";
  o << "h = " << format_double(mf.opts.h) << "\n";
  o << "newton_tol = " << format_double(mf.opts.newton_tol) << "\n";
  o << "dedupe_tol = " << format_double(mf.opts.dedupe_tol) << "\n";
  o << "fd_step = " << format_double(mf.opts.fd_step) << "\n";
  o << "hyperbolicity_tol = " << format_double(mf.opts.hyperbolicity_tol) << "\n";
  o << "support_eps = " << format_double(mf.opts.support_eps) << "\n";
  o << "grid_density = " << mf.opts.grid_density << "\n";
  if (!mf.flow_x0.empty()) {
    o << "flow_x0 =";
    for (double v : mf.flow_x0) o << ' ' << format_double(v);
    o << "\n";
    o << "flow_T = " << format_double(mf.flow_T) << "\n";
  }
  o << "\n";

  o << "[ensemble]\n";
  o << "replicates = " << ens.replicates << "\n";
  if (ens.threshold > 0.0)
    o << "threshold = " << format_double(ens.threshold) << "\n";
  else
    o << "threshold = auto\n";
  o << "tail = " << format_double(ens.tail) << "\n";
  o << "classify_tol = " << format_double(ens.classify_tol) << "\n";
  if (!ens.checkpoints.empty()) {
    o << "checkpoints =";
    for (double v : ens.checkpoints) o << ' ' << format_double(v);
    o << "\n";
    o << "defect_T = " << format_double(ens.defect_T) << "\n";
  }
  if (ens.timeavg_T > 0.0) o << "timeavg_T = " << format_double(ens.timeavg_T) << "\n";
  if (!ens.masses.empty()) {
    o << "masses =";
    for (auto v : ens.masses) o << ' ' << v;
    o << "\n";
  }
  if (ens.exclusion_tol > 0.0)
    o << "exclusion_tol = " << format_double(ens.exclusion_tol) << "\n";
  o << "\n";

  if (preset) {
    o << "[verify]\n";
    o << "preset = " << *preset << "\n\n";
  }

  o << "[output]\n";
  o << "dir = " << out.dir << "\n";
  return o.str();
}

}  // namespace urn
