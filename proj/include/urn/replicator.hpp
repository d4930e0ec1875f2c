#pragma once

#include <string>
#include <utility>
#include <vector>

#include "urn/law.hpp"
#include "urn/rng.hpp"
#include "urn/types.hpp"

namespace urn {

// Distribution of a small integer random variable with finite support.
class IntLaw {
 public:
  IntLaw() : IntLaw(constant(0)) {}

  static IntLaw constant(int c);
  static IntLaw uniform_range(int lo, int hi);
  static IntLaw table(std::vector<std::pair<int, double>> entries);

  double mean() const;
  double pmf(int v) const;
  int min_value() const { return values_.front(); }
  int max_value() const { return values_.back(); }
  bool deterministic() const { return values_.size() == 1; }
  const std::vector<int>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }

  int sample(RngStream& rng) const;

  // "const c" | "uniform a b" | "table v:p,v:p,..."
  static IntLaw parse(const std::string& descriptor);
  std::string describe() const;

 private:
  IntLaw(std::vector<int> values, std::vector<double> probs);
  std::vector<int> values_;   // ascending
  std::vector<double> probs_; // normalized
  std::vector<double> cdf_;
};

// Pairwise-interaction reproduction process on k strategies. At each update
// two individuals are drawn with replacement. If the same individual is
// drawn twice (strategy i), self_progeny[i] individuals of strategy i are
// added. Otherwise the first-drawn individual (strategy i, partner j) adds
// progeny_first[i][j] of strategy i and the second adds
// progeny_second[j][i] of strategy j. Entries take values in {-1,...,
// max_progeny}; -1 removes the contributing individual.
struct ReplicatorSpec {
  int strategies = 0;  // k
  int max_progeny = 0; // largest entry value across all laws
  std::vector<std::vector<IntLaw>> progeny_first;   // k x k
  std::vector<std::vector<IntLaw>> progeny_second;  // k x k
  std::vector<IntLaw> self_progeny;                 // k

  void validate() const;

  // All entries of both matrices share one law; self interactions frozen.
  static ReplicatorSpec uniform_entries(int k, const IntLaw& entry);
};

// Mean interaction payoff A^{ij} = E[progeny_first^{ij}] + E[progeny_second^{ij}].
Matrix replicator_mean_matrix(const ReplicatorSpec& spec);

// Exact pair-interaction kernel plus the enumerated mean-limit support.
// jump_bound = 2 * max(1, max_progeny).
TransitionLaw replicator_law(const ReplicatorSpec& spec);

}  // namespace urn
