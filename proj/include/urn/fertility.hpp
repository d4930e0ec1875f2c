#pragma once

#include <optional>
#include <string>
#include <vector>

#include "urn/law.hpp"
#include "urn/replicator.hpp"
#include "urn/types.hpp"

namespace urn {

// Genotype-count states flatten a symmetric k x k matrix row-major into k^2
// urn coordinates: entry (i,j), i != j, counts A_iA_j heterozygotes once in
// each of (i,j) and (j,i); entry (i,i) is twice the A_iA_i homozygote count.
// |z| is therefore twice the number of individuals.
struct GenotypeLayout {
  int alleles = 0;

  int dimension() const { return alleles * alleles; }
  int idx(int i, int j) const { return i * alleles + j; }
  int classes() const { return alleles * (alleles + 1) / 2; }
  // unordered genotype classes enumerated as (0,0),(0,1),...,(k-1,k-1), i <= j
  int class_index(int i, int j) const;
  std::pair<int, int> class_pair(int c) const;
  std::string class_name(int c) const;

  // state from per-class individual counts
  CountVector state(const std::vector<std::int64_t>& individuals) const;
  std::vector<std::int64_t> individuals(const CountVector& z) const;
  bool valid_state(const CountVector& z) const;
  // genotype frequencies x^{ij}; class c's share of individuals is
  // x^{ii} for homozygotes and 2 x^{ij} for heterozygotes
  double class_fraction(const std::vector<double>& x, int c) const;
  Increment individual_delta(int c) const;  // state change from adding one such individual
};

// Mating process on genotype counts. Each update draws two distinct
// individuals without replacement (extinction if fewer than two exist),
// removes both, and adds a progeny-law number of offspring whose genotypes
// come from independent random mating between the parents.
struct FertilitySpec {
  int alleles = 0;
  int max_progeny = 0;  // largest progeny-law value
  // progeny count law per unordered pair of genotype classes, symmetric
  std::vector<std::vector<IntLaw>> progeny;  // classes() x classes()
  std::optional<Matrix> additive_gamma;      // set when built from per-genotype contributions

  void validate() const;
  GenotypeLayout layout() const { return GenotypeLayout{alleles}; }

  // Mean progeny g(c1,c2) = gamma[c1] + gamma[c2], realized as two-point
  // integer laws on {floor(g), floor(g)+1}.
  static FertilitySpec additive(const Matrix& gamma);
  static FertilitySpec from_laws(int alleles, std::vector<std::vector<IntLaw>> progeny);
};

// Mean progeny counts per unordered class pair.
Matrix fertility_mean_table(const FertilitySpec& spec);

// Row-stochastic mutation over unordered genotype classes: rows[src][dst] is
// the probability that a fresh offspring of class src is recorded as dst.
struct MutationMatrix {
  int alleles = 0;
  Matrix rows;  // classes() x classes()

  static MutationMatrix identity(int alleles);
  void validate() const;
  bool is_identity() const;
};

TransitionLaw fertility_law(const FertilitySpec& spec);
TransitionLaw mutation_fertility_law(const FertilitySpec& spec, const MutationMatrix& mu);

}  // namespace urn
