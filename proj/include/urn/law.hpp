#pragma once

#include <functional>
#include <string>
#include <vector>

#include "urn/rng.hpp"
#include "urn/types.hpp"

namespace urn {

struct WeightedIncrement {
  Increment delta;
  double prob = 0.0;
};

// Finite support, sorted lexicographically by delta.
using Support = std::vector<WeightedIncrement>;

// Transition law of an urn chain: the mean-limit maps p_w on the simplex
// plus the exact finite-population kernel. Immutable after construction and
// safe to share across threads; samplers take an explicit stream.
struct TransitionLaw {
  int dimension = 0;      // state coordinates k
  int jump_bound = 0;     // m: |z' - z|_1 <= m at every update
  double a2_constant = 0; // documented slack |p_w(z/|z|) - Pi(z,z+w)| <= a/|z|; 0 = unspecified
  int lattice_rank = 0;   // dimension of the sublattice increments can span
                          // (k for plain laws, k(k+1)/2 for genotype laws)
  std::string name;

  // Enumerates {(w, p_w(x)) : w != 0}; the remainder of the mass is p_0,
  // which is never stored. Empty function when the law is not enumerable.
  // Evaluators extend polynomially slightly off the simplex so that finite
  // differencing and Newton steps are well defined.
  std::function<Support(const std::vector<double>& x)> mean_support;

  // One exact kernel step z -> z'. Never yields a negative coordinate and
  // never moves |z| by more than jump_bound.
  std::function<CountVector(const CountVector& z, RngStream& rng)> exact_sampler;

  // Exact one-step increment distribution of the kernel at finite z,
  // including w = 0. Empty when not enumerable.
  std::function<Support(const CountVector& z)> exact_support;

  bool enumerable() const { return static_cast<bool>(mean_support); }
  bool kernel_enumerable() const { return static_cast<bool>(exact_support); }
};

// Law defined directly by its mean-limit maps. The sampler draws w with
// probability p_w(z/|z|); a draw that would push some coordinate negative is
// replaced by the zero increment, so its mass folds into p_0.
TransitionLaw law_from_mean_support(
    int dimension, int jump_bound,
    std::function<Support(const std::vector<double>&)> support,
    std::string name, double a2_constant = 0.0);

// p_{+e_i}(x) = up * x^i and p_{-e_i}(x) = down * x^i, up + down <= 1.
// For dimension 1 this is the constant-rate birth-death chain on |z|.
TransitionLaw birth_death_law(int dimension, double up, double down);

// Helpers shared by law constructors.
Support sorted_support(std::vector<WeightedIncrement> entries);
const WeightedIncrement* find_increment(const Support& s, const Increment& w);
double support_mass(const Support& s);

}  // namespace urn
