#include "urn/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace urn {

std::int64_t total_count(const CountVector& z) {
  std::int64_t s = 0;
  for (auto v : z) s += v;
  return s;
}

int alpha(const Increment& w) {
  int s = 0;
  for (int v : w) s += v;
  return s;
}

int l1_norm(const Increment& w) {
  int s = 0;
  for (int v : w) s += std::abs(v);
  return s;
}

CountVector apply_increment(const CountVector& z, const Increment& w) {
  CountVector out = z;
  for (size_t i = 0; i < z.size(); ++i) out[i] += w[i];
  return out;
}

SimplexPoint::SimplexPoint(std::vector<double> coords, bool renormalize)
    : coords_(std::move(coords)) {
  double s = std::accumulate(coords_.begin(), coords_.end(), 0.0);
  bool all_zero = std::all_of(coords_.begin(), coords_.end(), [](double v) { return v == 0.0; });
  if (all_zero) return;
  if (renormalize) {
    if (s <= 0.0) throw std::invalid_argument("simplex point with nonpositive mass");
    for (double& v : coords_) v /= s;
    return;
  }
  if (std::abs(s - 1.0) > 1e-12)
    throw std::invalid_argument("simplex point does not sum to one");
}

SimplexPoint SimplexPoint::null_point(int dimension) {
  SimplexPoint p;
  p.coords_.assign(static_cast<size_t>(dimension), 0.0);
  return p;
}

bool SimplexPoint::is_null() const {
  return std::all_of(coords_.begin(), coords_.end(), [](double v) { return v == 0.0; });
}

SimplexPoint normalize(const CountVector& z) {
  std::int64_t s = total_count(z);
  if (s == 0) return SimplexPoint::null_point(static_cast<int>(z.size()));
  std::vector<double> x(z.size());
  for (size_t i = 0; i < z.size(); ++i) x[i] = static_cast<double>(z[i]) / static_cast<double>(s);
  return SimplexPoint(std::move(x), true);
}

std::vector<double> random_simplex(int dimension, RngStream& rng) {
  std::vector<double> x(static_cast<size_t>(dimension));
  double s = 0.0;
  for (auto& v : x) {
    v = -std::log(1.0 - rng.uniform01());
    s += v;
  }
  for (auto& v : x) v /= s;
  return x;
}

double sup_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double euclid_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double u : v) s += u * u;
  return std::sqrt(s);
}

double euclid_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // prefer the shortest representation that round-trips
  for (int prec = 1; prec <= 16; ++prec) {
    char cand[40];
    std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(cand, "%lf", &back);
    if (back == v) return cand;
  }
  return buf;
}

}  // namespace urn
