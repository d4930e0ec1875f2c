#include "urn/replicator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace urn {

IntLaw::IntLaw(std::vector<int> values, std::vector<double> probs)
    : values_(std::move(values)), probs_(std::move(probs)) {
  if (values_.empty() || values_.size() != probs_.size())
    throw std::invalid_argument("empty or mismatched integer law");
  double s = 0.0;
  for (double p : probs_) {
    if (p < 0.0) throw std::invalid_argument("negative probability in integer law");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("integer law does not sum to one");
  for (double& p : probs_) p /= s;
  cdf_.resize(probs_.size());
  double c = 0.0;
  for (size_t i = 0; i < probs_.size(); ++i) {
    c += probs_[i];
    cdf_[i] = c;
  }
  cdf_.back() = 1.0;
}

IntLaw IntLaw::constant(int c) { return IntLaw({c}, {1.0}); }

IntLaw IntLaw::uniform_range(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("empty uniform range");
  std::vector<int> v;
  std::vector<double> p;
  for (int i = lo; i <= hi; ++i) {
    v.push_back(i);
    p.push_back(1.0 / static_cast<double>(hi - lo + 1));
  }
  return IntLaw(std::move(v), std::move(p));
}

IntLaw IntLaw::table(std::vector<std::pair<int, double>> entries) {
  std::map<int, double> merged;
  double mass = 0.0;
  for (auto& [v, p] : entries) {
    if (p < 0.0) throw std::invalid_argument("negative probability in table law");
    merged[v] += p;
    mass += p;
  }
  if (mass > 1.0 + 1e-9) throw std::invalid_argument("table law mass exceeds one");
  if (mass < 1.0 - 1e-9) merged[0] += 1.0 - mass;  // remainder sits on zero
  std::vector<int> v;
  std::vector<double> p;
  for (auto& [val, prob] : merged) {
    v.push_back(val);
    p.push_back(prob);
  }
  return IntLaw(std::move(v), std::move(p));
}

double IntLaw::mean() const {
  double m = 0.0;
  for (size_t i = 0; i < values_.size(); ++i) m += values_[i] * probs_[i];
  return m;
}

double IntLaw::pmf(int v) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), v);
  if (it == values_.end() || *it != v) return 0.0;
  return probs_[static_cast<size_t>(it - values_.begin())];
}

int IntLaw::sample(RngStream& rng) const {
  if (values_.size() == 1) return values_[0];
  double u = rng.uniform01();
  for (size_t i = 0; i + 1 < cdf_.size(); ++i)
    if (u < cdf_[i]) return values_[i];
  return values_.back();
}

IntLaw IntLaw::parse(const std::string& descriptor) {
  std::istringstream in(descriptor);
  std::string kind;
  in >> kind;
  if (kind == "const") {
    int c;
    if (!(in >> c)) throw std::invalid_argument("const law needs an integer: " + descriptor);
    return constant(c);
  }
  if (kind == "uniform") {
    int a, b;
    if (!(in >> a >> b)) throw std::invalid_argument("uniform law needs two integers: " + descriptor);
    return uniform_range(a, b);
  }
  if (kind == "table") {
    std::string rest;
    std::getline(in, rest);
    std::vector<std::pair<int, double>> entries;
    std::stringstream items(rest);
    std::string item;
    while (std::getline(items, item, ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("table entries are v:p pairs: " + descriptor);
      entries.emplace_back(std::stoi(item.substr(0, colon)),
                           std::stod(item.substr(colon + 1)));
    }
    if (entries.empty()) throw std::invalid_argument("empty table law: " + descriptor);
    return table(std::move(entries));
  }
  throw std::invalid_argument("unknown integer-law descriptor: " + descriptor);
}

std::string IntLaw::describe() const {
  if (values_.size() == 1) return "const " + std::to_string(values_[0]);
  std::ostringstream out;
  out << "table ";
  for (size_t i = 0; i < values_.size(); ++i) {
    if (i) out << ',';
    out << values_[i] << ':' << format_double(probs_[i]);
  }
  return out.str();
}

void ReplicatorSpec::validate() const {
  if (strategies <= 0) throw std::invalid_argument("replicator spec needs at least one strategy");
  auto check = [&](const IntLaw& law) {
    if (law.min_value() < -1 || law.max_value() > std::max(1, max_progeny))
      throw std::invalid_argument("entry law outside {-1,...,max_progeny}");
  };
  size_t k = static_cast<size_t>(strategies);
  if (progeny_first.size() != k || progeny_second.size() != k || self_progeny.size() != k)
    throw std::invalid_argument("replicator spec matrices must be k x k");
  for (size_t i = 0; i < k; ++i) {
    if (progeny_first[i].size() != k || progeny_second[i].size() != k)
      throw std::invalid_argument("replicator spec matrices must be k x k");
    check(self_progeny[i]);
    for (size_t j = 0; j < k; ++j) {
      check(progeny_first[i][j]);
      check(progeny_second[i][j]);
    }
  }
}

ReplicatorSpec ReplicatorSpec::uniform_entries(int k, const IntLaw& entry) {
  ReplicatorSpec spec;
  spec.strategies = k;
  spec.max_progeny = std::max(1, entry.max_value());
  spec.progeny_first.assign(static_cast<size_t>(k),
                            std::vector<IntLaw>(static_cast<size_t>(k), entry));
  spec.progeny_second = spec.progeny_first;
  spec.self_progeny.assign(static_cast<size_t>(k), IntLaw::constant(0));
  return spec;
}

Matrix replicator_mean_matrix(const ReplicatorSpec& spec) {
  size_t k = static_cast<size_t>(spec.strategies);
  Matrix a(k, std::vector<double>(k, 0.0));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j)
      a[i][j] = spec.progeny_first[i][j].mean() + spec.progeny_second[i][j].mean();
  return a;
}

namespace {

// Conditional increment distribution of one ordered interaction, with the
// pair probability left symbolic: p_w(x) = sum over ordered pairs (i,j) of
// x^i x^j * outcomes(i,j)[w].
struct PairOutcomes {
  int i = 0;
  int j = 0;
  std::map<Increment, double> outcomes;
};

std::vector<PairOutcomes> interaction_atoms(const ReplicatorSpec& spec) {
  const int k = spec.strategies;
  std::vector<PairOutcomes> atoms;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      PairOutcomes atom;
      atom.i = i;
      atom.j = j;
      const IntLaw& first = spec.progeny_first[static_cast<size_t>(i)][static_cast<size_t>(j)];
      const IntLaw& second = spec.progeny_second[static_cast<size_t>(j)][static_cast<size_t>(i)];
      for (size_t a = 0; a < first.values().size(); ++a) {
        for (size_t b = 0; b < second.values().size(); ++b) {
          Increment w(static_cast<size_t>(k), 0);
          w[static_cast<size_t>(i)] += first.values()[a];
          w[static_cast<size_t>(j)] += second.values()[b];
          atom.outcomes[w] += first.probs()[a] * second.probs()[b];
        }
      }
      atoms.push_back(std::move(atom));
    }
  }
  return atoms;
}

}  // namespace

TransitionLaw replicator_law(const ReplicatorSpec& spec) {
  spec.validate();
  const int k = spec.strategies;
  const int m = 2 * std::max(1, spec.max_progeny);

  TransitionLaw law;
  law.dimension = k;
  law.jump_bound = m;
  // same-individual draws and without-replacement corrections are O(1/|z|)
  law.a2_constant = 4.0 * m;
  law.lattice_rank = k;
  law.name = "replicator";

  auto atoms = std::make_shared<std::vector<PairOutcomes>>(interaction_atoms(spec));

  law.mean_support = [atoms, k](const std::vector<double>& x) -> Support {
    std::map<Increment, double> acc;
    for (const auto& atom : *atoms) {
      double weight = x[static_cast<size_t>(atom.i)] * x[static_cast<size_t>(atom.j)];
      if (weight == 0.0) continue;
      for (const auto& [w, p] : atom.outcomes) acc[w] += weight * p;
    }
    Support out;
    out.reserve(acc.size());
    Increment zero(static_cast<size_t>(k), 0);
    for (auto& [w, p] : acc)
      if (w != zero) out.push_back({w, p});
    return out;  // std::map iteration is already sorted
  };

  auto spec_copy = std::make_shared<ReplicatorSpec>(spec);

  law.exact_sampler = [spec_copy, k](const CountVector& z, RngStream& rng) -> CountVector {
    std::int64_t s = total_count(z);
    if (s == 0) return z;
    auto strategy_of = [&](std::int64_t idx) {
      std::int64_t c = 0;
      for (int i = 0; i < k; ++i) {
        c += z[static_cast<size_t>(i)];
        if (idx < c) return i;
      }
      return k - 1;
    };
    std::int64_t u1 = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(s)));
    std::int64_t u2 = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(s)));
    CountVector out = z;
    auto add = [&](int color, int count) {
      auto& v = out[static_cast<size_t>(color)];
      v += count;
      if (v < 0) v = 0;  // removal of an already-removed individual is skipped
    };
    if (u1 == u2) {
      int i = strategy_of(u1);
      add(i, spec_copy->self_progeny[static_cast<size_t>(i)].sample(rng));
      return out;
    }
    int i = strategy_of(u1);
    int j = strategy_of(u2);
    add(i, spec_copy->progeny_first[static_cast<size_t>(i)][static_cast<size_t>(j)].sample(rng));
    add(j, spec_copy->progeny_second[static_cast<size_t>(j)][static_cast<size_t>(i)].sample(rng));
    return out;
  };

  law.exact_support = [atoms, spec_copy, k](const CountVector& z) -> Support {
    std::int64_t s = total_count(z);
    if (s == 0) return {{Increment(static_cast<size_t>(k), 0), 1.0}};
    double denom = static_cast<double>(s) * static_cast<double>(s);
    std::map<Increment, double> acc;
    // same-individual draws
    for (int i = 0; i < k; ++i) {
      double p_same = static_cast<double>(z[static_cast<size_t>(i)]) / denom;
      if (p_same == 0.0) continue;
      const IntLaw& r = spec_copy->self_progeny[static_cast<size_t>(i)];
      for (size_t a = 0; a < r.values().size(); ++a) {
        Increment w(static_cast<size_t>(k), 0);
        w[static_cast<size_t>(i)] = r.values()[a];
        if (z[static_cast<size_t>(i)] + w[static_cast<size_t>(i)] < 0) w[static_cast<size_t>(i)] = -static_cast<int>(z[static_cast<size_t>(i)]);
        acc[w] += p_same * r.probs()[a];
      }
    }
    // ordered distinct-individual draws; strategies may coincide
    for (const auto& atom : *atoms) {
      double zi = static_cast<double>(z[static_cast<size_t>(atom.i)]);
      double zj = static_cast<double>(z[static_cast<size_t>(atom.j)]);
      double pair = atom.i == atom.j ? zi * (zi - 1.0) : zi * zj;
      if (pair <= 0.0) continue;
      double weight = pair / denom;
      for (const auto& [w, p] : atom.outcomes) acc[w] += weight * p;
    }
    Support out;
    out.reserve(acc.size());
    for (auto& [w, p] : acc) out.push_back({w, p});
    return out;
  };

  return law;
}

}  // namespace urn
