#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urn/rng.hpp"

namespace urn {

// Ball counts per color; the Markov chain state.
using CountVector = std::vector<std::int64_t>;

// Per-update jump w, one signed entry per color.
using Increment = std::vector<int>;

using Matrix = std::vector<std::vector<double>>;

std::int64_t total_count(const CountVector& z);  // |z|
int alpha(const Increment& w);                   // net change of |z|
int l1_norm(const Increment& w);

CountVector apply_increment(const CountVector& z, const Increment& w);

// Point of the unit simplex, or the null point (all coordinates zero) that
// stands for the empty urn. Construction checks sum-to-one within 1e-12
// unless renormalize is requested.
class SimplexPoint {
 public:
  SimplexPoint() = default;
  explicit SimplexPoint(std::vector<double> coords, bool renormalize = false);

  static SimplexPoint null_point(int dimension);

  bool is_null() const;
  int dimension() const { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_[static_cast<size_t>(i)]; }
  const std::vector<double>& coords() const { return coords_; }

  bool operator==(const SimplexPoint& o) const { return coords_ == o.coords_; }

 private:
  std::vector<double> coords_;
};

// z/|z|, or the null point for z = 0.
SimplexPoint normalize(const CountVector& z);

// Uniform (flat Dirichlet) sample from the simplex interior.
std::vector<double> random_simplex(int dimension, RngStream& rng);

double sup_norm_diff(const std::vector<double>& a, const std::vector<double>& b);
double euclid_norm(const std::vector<double>& v);
double euclid_dist(const std::vector<double>& a, const std::vector<double>& b);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace urn
