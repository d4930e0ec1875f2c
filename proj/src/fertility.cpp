#include "urn/fertility.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace urn {

int GenotypeLayout::class_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  // row offsets of the upper triangle
  int offset = i * alleles - i * (i - 1) / 2;
  return offset + (j - i);
}

std::pair<int, int> GenotypeLayout::class_pair(int c) const {
  for (int i = 0; i < alleles; ++i) {
    int row = alleles - i;
    if (c < row) return {i, i + c};
    c -= row;
  }
  throw std::out_of_range("genotype class index");
}

std::string GenotypeLayout::class_name(int c) const {
  auto [i, j] = class_pair(c);
  std::ostringstream out;
  out << "A" << i + 1 << "A" << j + 1;
  return out.str();
}

CountVector GenotypeLayout::state(const std::vector<std::int64_t>& individuals) const {
  if (static_cast<int>(individuals.size()) != classes())
    throw std::invalid_argument("per-class count vector has wrong length");
  CountVector z(static_cast<size_t>(dimension()), 0);
  for (int c = 0; c < classes(); ++c) {
    auto [i, j] = class_pair(c);
    std::int64_t n = individuals[static_cast<size_t>(c)];
    if (n < 0) throw std::invalid_argument("negative individual count");
    if (i == j)
      z[static_cast<size_t>(idx(i, i))] += 2 * n;
    else {
      z[static_cast<size_t>(idx(i, j))] += n;
      z[static_cast<size_t>(idx(j, i))] += n;
    }
  }
  return z;
}

std::vector<std::int64_t> GenotypeLayout::individuals(const CountVector& z) const {
  std::vector<std::int64_t> out(static_cast<size_t>(classes()), 0);
  for (int c = 0; c < classes(); ++c) {
    auto [i, j] = class_pair(c);
    out[static_cast<size_t>(c)] =
        i == j ? z[static_cast<size_t>(idx(i, i))] / 2 : z[static_cast<size_t>(idx(i, j))];
  }
  return out;
}

bool GenotypeLayout::valid_state(const CountVector& z) const {
  if (static_cast<int>(z.size()) != dimension()) return false;
  for (int i = 0; i < alleles; ++i) {
    if (z[static_cast<size_t>(idx(i, i))] % 2 != 0) return false;
    for (int j = 0; j < alleles; ++j) {
      if (z[static_cast<size_t>(idx(i, j))] < 0) return false;
      if (z[static_cast<size_t>(idx(i, j))] != z[static_cast<size_t>(idx(j, i))]) return false;
    }
  }
  return total_count(z) % 2 == 0;
}

double GenotypeLayout::class_fraction(const std::vector<double>& x, int c) const {
  auto [i, j] = class_pair(c);
  if (i == j) return x[static_cast<size_t>(idx(i, i))];
  return x[static_cast<size_t>(idx(i, j))] + x[static_cast<size_t>(idx(j, i))];
}

Increment GenotypeLayout::individual_delta(int c) const {
  Increment w(static_cast<size_t>(dimension()), 0);
  auto [i, j] = class_pair(c);
  if (i == j)
    w[static_cast<size_t>(idx(i, i))] = 2;
  else {
    w[static_cast<size_t>(idx(i, j))] = 1;
    w[static_cast<size_t>(idx(j, i))] = 1;
  }
  return w;
}

void FertilitySpec::validate() const {
  if (alleles <= 0) throw std::invalid_argument("fertility spec needs at least one allele");
  GenotypeLayout lay{alleles};
  size_t c = static_cast<size_t>(lay.classes());
  if (progeny.size() != c) throw std::invalid_argument("progeny table must be classes x classes");
  for (size_t a = 0; a < c; ++a) {
    if (progeny[a].size() != c)
      throw std::invalid_argument("progeny table must be classes x classes");
    for (size_t b = 0; b < c; ++b) {
      const IntLaw& law = progeny[a][b];
      if (law.min_value() < 0 || law.max_value() > max_progeny)
        throw std::invalid_argument("progeny law outside {0,...,max_progeny}");
      if (law.values() != progeny[b][a].values() || law.probs() != progeny[b][a].probs())
        throw std::invalid_argument("progeny table must be symmetric");
    }
  }
}

FertilitySpec FertilitySpec::additive(const Matrix& gamma) {
  int k = static_cast<int>(gamma.size());
  for (const auto& row : gamma)
    if (static_cast<int>(row.size()) != k)
      throw std::invalid_argument("gamma must be square");
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (std::abs(gamma[static_cast<size_t>(i)][static_cast<size_t>(j)] -
                   gamma[static_cast<size_t>(j)][static_cast<size_t>(i)]) > 1e-12)
        throw std::invalid_argument("gamma must be symmetric");

  GenotypeLayout lay{k};
  FertilitySpec spec;
  spec.alleles = k;
  spec.additive_gamma = gamma;
  int c = lay.classes();
  spec.progeny.assign(static_cast<size_t>(c), std::vector<IntLaw>(static_cast<size_t>(c)));
  int max_val = 0;
  for (int a = 0; a < c; ++a) {
    for (int b = 0; b < c; ++b) {
      auto [i, j] = lay.class_pair(a);
      auto [r, s] = lay.class_pair(b);
      double g = gamma[static_cast<size_t>(i)][static_cast<size_t>(j)] +
                 gamma[static_cast<size_t>(r)][static_cast<size_t>(s)];
      if (g < 0) throw std::invalid_argument("additive fertility must be nonnegative");
      int lo = static_cast<int>(std::floor(g));
      double frac = g - lo;
      IntLaw law = frac < 1e-12 ? IntLaw::constant(lo)
                                : IntLaw::table({{lo, 1.0 - frac}, {lo + 1, frac}});
      max_val = std::max(max_val, law.max_value());
      spec.progeny[static_cast<size_t>(a)][static_cast<size_t>(b)] = law;
    }
  }
  spec.max_progeny = max_val;
  spec.validate();
  return spec;
}

FertilitySpec FertilitySpec::from_laws(int alleles, std::vector<std::vector<IntLaw>> progeny) {
  FertilitySpec spec;
  spec.alleles = alleles;
  spec.progeny = std::move(progeny);
  int max_val = 0;
  for (const auto& row : spec.progeny)
    for (const auto& law : row) max_val = std::max(max_val, law.max_value());
  spec.max_progeny = max_val;
  spec.validate();
  return spec;
}

Matrix fertility_mean_table(const FertilitySpec& spec) {
  size_t c = spec.progeny.size();
  Matrix g(c, std::vector<double>(c, 0.0));
  for (size_t a = 0; a < c; ++a)
    for (size_t b = 0; b < c; ++b) g[a][b] = spec.progeny[a][b].mean();
  return g;
}

MutationMatrix MutationMatrix::identity(int alleles) {
  GenotypeLayout lay{alleles};
  MutationMatrix mu;
  mu.alleles = alleles;
  size_t c = static_cast<size_t>(lay.classes());
  mu.rows.assign(c, std::vector<double>(c, 0.0));
  for (size_t i = 0; i < c; ++i) mu.rows[i][i] = 1.0;
  return mu;
}

void MutationMatrix::validate() const {
  GenotypeLayout lay{alleles};
  size_t c = static_cast<size_t>(lay.classes());
  if (rows.size() != c) throw std::invalid_argument("mutation matrix must be classes x classes");
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("mutation matrix must be classes x classes");
    double s = 0.0;
    for (double v : row) {
      if (v < 0.0) throw std::invalid_argument("negative mutation probability");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument("mutation rows must sum to one");
  }
}

bool MutationMatrix::is_identity() const {
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      if (rows[i][j] != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

namespace {

// Distribution of one offspring's recorded genotype class given the parent
// classes, after random mating and (optionally) mutation.
std::vector<std::pair<int, double>> offspring_classes(const GenotypeLayout& lay, int c1, int c2,
                                                      const MutationMatrix* mu) {
  auto [i, j] = lay.class_pair(c1);
  auto [r, s] = lay.class_pair(c2);
  std::map<int, double> base;
  for (int u : {i, j})
    for (int v : {r, s}) base[lay.class_index(u, v)] += 0.25;
  std::map<int, double> final_classes;
  if (mu == nullptr) {
    final_classes = std::move(base);
  } else {
    for (auto& [c, p] : base)
      for (int t = 0; t < lay.classes(); ++t) {
        double q = mu->rows[static_cast<size_t>(c)][static_cast<size_t>(t)];
        if (q > 0.0) final_classes[t] += p * q;
      }
  }
  std::vector<std::pair<int, double>> out(final_classes.begin(), final_classes.end());
  return out;
}

struct MatingAtom {
  int c1 = 0;
  int c2 = 0;  // c1 <= c2
  std::map<Increment, double> outcomes;  // includes w = 0 when it can occur
};

// Exact increment distribution of one mating between classes c1 and c2:
// remove both parents, add G offspring with i.i.d. class draws.
std::map<Increment, double> mating_outcomes(const GenotypeLayout& lay, const FertilitySpec& spec,
                                            const MutationMatrix* mu, int c1, int c2) {
  Increment removal(static_cast<size_t>(lay.dimension()), 0);
  {
    Increment d1 = lay.individual_delta(c1);
    Increment d2 = lay.individual_delta(c2);
    for (size_t t = 0; t < removal.size(); ++t) removal[t] = -(d1[t] + d2[t]);
  }
  auto kids = offspring_classes(lay, c1, c2, mu);
  const IntLaw& count_law = spec.progeny[static_cast<size_t>(c1)][static_cast<size_t>(c2)];

  std::map<Increment, double> total;
  for (size_t vi = 0; vi < count_law.values().size(); ++vi) {
    int n = count_law.values()[vi];
    double pn = count_law.probs()[vi];
    // convolve n i.i.d. offspring class draws
    std::map<Increment, double> acc;
    acc[removal] = 1.0;
    for (int t = 0; t < n; ++t) {
      std::map<Increment, double> next;
      for (const auto& [w, p] : acc) {
        for (const auto& [cls, q] : kids) {
          Increment w2 = w;
          Increment d = lay.individual_delta(cls);
          for (size_t u = 0; u < w2.size(); ++u) w2[u] += d[u];
          next[w2] += p * q;
        }
      }
      acc.swap(next);
    }
    for (const auto& [w, p] : acc) total[w] += pn * p;
  }
  return total;
}

std::vector<MatingAtom> mating_atoms(const GenotypeLayout& lay, const FertilitySpec& spec,
                                     const MutationMatrix* mu) {
  std::vector<MatingAtom> atoms;
  for (int c1 = 0; c1 < lay.classes(); ++c1)
    for (int c2 = c1; c2 < lay.classes(); ++c2)
      atoms.push_back({c1, c2, mating_outcomes(lay, spec, mu, c1, c2)});
  return atoms;
}

TransitionLaw build_fertility_law(const FertilitySpec& spec, const MutationMatrix* mu_in,
                                  std::string name) {
  spec.validate();
  if (mu_in != nullptr) mu_in->validate();
  GenotypeLayout lay = spec.layout();
  const int dim = lay.dimension();
  const int m = 4 + 2 * spec.max_progeny;

  TransitionLaw law;
  law.dimension = dim;
  law.jump_bound = m;
  law.a2_constant = 16.0 * m;  // without-replacement pair correction is O(1/|z|)
  law.lattice_rank = lay.classes();  // increments keep the state symmetric
  law.name = std::move(name);

  auto atoms = std::make_shared<std::vector<MatingAtom>>(mating_atoms(lay, spec, mu_in));

  law.mean_support = [atoms, lay, dim](const std::vector<double>& x) -> Support {
    std::map<Increment, double> acc;
    for (const auto& atom : *atoms) {
      double f1 = lay.class_fraction(x, atom.c1);
      double f2 = lay.class_fraction(x, atom.c2);
      double weight = atom.c1 == atom.c2 ? f1 * f2 : 2.0 * f1 * f2;
      if (weight == 0.0) continue;
      for (const auto& [w, p] : atom.outcomes) acc[w] += weight * p;
    }
    Support out;
    Increment zero(static_cast<size_t>(dim), 0);
    for (auto& [w, p] : acc)
      if (w != zero) out.push_back({w, p});
    return out;
  };

  law.exact_support = [atoms, lay, dim](const CountVector& z) -> Support {
    std::int64_t size = total_count(z);
    if (size < 4) {
      Increment w(static_cast<size_t>(dim), 0);
      for (size_t t = 0; t < z.size(); ++t) w[t] = -static_cast<int>(z[t]);
      return {{w, 1.0}};
    }
    auto counts = lay.individuals(z);
    double n_ind = static_cast<double>(size) / 2.0;
    double pairs_total = n_ind * (n_ind - 1.0) / 2.0;
    std::map<Increment, double> acc;
    for (const auto& atom : *atoms) {
      double cnt1 = static_cast<double>(counts[static_cast<size_t>(atom.c1)]);
      double cnt2 = static_cast<double>(counts[static_cast<size_t>(atom.c2)]);
      double npairs = atom.c1 == atom.c2 ? cnt1 * (cnt1 - 1.0) / 2.0 : cnt1 * cnt2;
      if (npairs <= 0.0) continue;
      double weight = npairs / pairs_total;
      for (const auto& [w, p] : atom.outcomes) acc[w] += weight * p;
    }
    Support out;
    for (auto& [w, p] : acc) out.push_back({w, p});
    return out;
  };

  bool has_mu = mu_in != nullptr;
  auto mu_copy = has_mu ? std::make_shared<MutationMatrix>(*mu_in) : nullptr;
  auto spec_copy = std::make_shared<FertilitySpec>(spec);

  law.exact_sampler = [spec_copy, mu_copy, lay, dim](const CountVector& z,
                                                     RngStream& rng) -> CountVector {
    std::int64_t size = total_count(z);
    if (size < 4) return CountVector(static_cast<size_t>(dim), 0);
    auto counts = lay.individuals(z);
    std::int64_t n_ind = size / 2;
    auto class_of = [&](std::int64_t idx) {
      std::int64_t c = 0;
      for (int cls = 0; cls < lay.classes(); ++cls) {
        c += counts[static_cast<size_t>(cls)];
        if (idx < c) return cls;
      }
      return lay.classes() - 1;
    };
    // ordered draw of two distinct individuals
    std::int64_t a = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n_ind)));
    std::int64_t b = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n_ind - 1)));
    if (b >= a) ++b;
    int c1 = class_of(a);
    int c2 = class_of(b);

    CountVector out = z;
    auto apply = [&](const Increment& d, int sign) {
      for (size_t t = 0; t < out.size(); ++t) out[t] += sign * d[t];
    };
    apply(lay.individual_delta(c1), -1);
    apply(lay.individual_delta(c2), -1);

    auto [i, j] = lay.class_pair(c1);
    auto [r, s] = lay.class_pair(c2);
    int n_off = spec_copy->progeny[static_cast<size_t>(c1)][static_cast<size_t>(c2)].sample(rng);
    for (int t = 0; t < n_off; ++t) {
      int u = i == j ? i : (rng.below(2) == 0 ? i : j);
      int v = r == s ? r : (rng.below(2) == 0 ? r : s);
      int cls = lay.class_index(u, v);
      if (mu_copy) {
        const auto& row = mu_copy->rows[static_cast<size_t>(cls)];
        // deterministic rows never consume randomness, so an identity
        // mutation matrix reproduces the plain process draw for draw
        int target = -1;
        for (size_t q = 0; q < row.size(); ++q)
          if (row[q] == 1.0) target = static_cast<int>(q);
        if (target >= 0) {
          cls = target;
        } else {
          double u01 = rng.uniform01();
          double cum = 0.0;
          for (size_t q = 0; q < row.size(); ++q) {
            cum += row[q];
            if (u01 < cum) {
              cls = static_cast<int>(q);
              break;
            }
          }
        }
      }
      apply(lay.individual_delta(cls), +1);
    }
    return out;
  };

  return law;
}

}  // namespace

TransitionLaw fertility_law(const FertilitySpec& spec) {
  return build_fertility_law(spec, nullptr, "fertility");
}

TransitionLaw mutation_fertility_law(const FertilitySpec& spec, const MutationMatrix& mu) {
  return build_fertility_law(spec, &mu, "fertility-mutation");
}

}  // namespace urn
