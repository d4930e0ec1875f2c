#include "urn/law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace urn {

Support sorted_support(std::vector<WeightedIncrement> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const WeightedIncrement& a, const WeightedIncrement& b) {
              return a.delta < b.delta;
            });
  // merge duplicates
  Support out;
  for (auto& e : entries) {
    if (!out.empty() && out.back().delta == e.delta)
      out.back().prob += e.prob;
    else
      out.push_back(std::move(e));
  }
  return out;
}

const WeightedIncrement* find_increment(const Support& s, const Increment& w) {
  auto it = std::lower_bound(s.begin(), s.end(), w,
                             [](const WeightedIncrement& a, const Increment& b) {
                               return a.delta < b;
                             });
  if (it != s.end() && it->delta == w) return &*it;
  return nullptr;
}

double support_mass(const Support& s) {
  double m = 0.0;
  for (const auto& e : s) m += e.prob;
  return m;
}

namespace {

bool feasible(const CountVector& z, const Increment& w) {
  for (size_t i = 0; i < z.size(); ++i)
    if (z[i] + w[i] < 0) return false;
  return true;
}

}  // namespace

TransitionLaw law_from_mean_support(
    int dimension, int jump_bound,
    std::function<Support(const std::vector<double>&)> support,
    std::string name, double a2_constant) {
  TransitionLaw law;
  law.dimension = dimension;
  law.jump_bound = jump_bound;
  law.a2_constant = a2_constant;
  law.lattice_rank = dimension;
  law.name = std::move(name);
  law.mean_support = support;

  law.exact_support = [support, dimension](const CountVector& z) -> Support {
    std::vector<double> x(z.size());
    std::int64_t s = total_count(z);
    for (size_t i = 0; i < z.size(); ++i)
      x[i] = s > 0 ? static_cast<double>(z[i]) / static_cast<double>(s) : 0.0;
    Support base = support(x);
    double infeasible_mass = 0.0;
    Support out;
    for (auto& e : base) {
      if (feasible(z, e.delta))
        out.push_back(e);
      else
        infeasible_mass += e.prob;
    }
    double mass = support_mass(out);
    double zero_mass = 1.0 - mass;
    if (zero_mass < -1e-12)
      throw std::runtime_error("mean support mass exceeds one");
    zero_mass = std::max(0.0, zero_mass);
    (void)infeasible_mass;
    out.push_back({Increment(static_cast<size_t>(dimension), 0), zero_mass});
    return sorted_support(std::move(out));
  };

  law.exact_sampler = [support, dimension](const CountVector& z, RngStream& rng) -> CountVector {
    std::vector<double> x(z.size());
    std::int64_t s = total_count(z);
    for (size_t i = 0; i < z.size(); ++i)
      x[i] = s > 0 ? static_cast<double>(z[i]) / static_cast<double>(s) : 0.0;
    Support base = support(x);
    double u = rng.uniform01();
    double c = 0.0;
    for (const auto& e : base) {
      c += e.prob;
      if (u < c) {
        if (!feasible(z, e.delta)) return z;  // mass folds into p_0
        return apply_increment(z, e.delta);
      }
    }
    return z;  // p_0
  };

  return law;
}

TransitionLaw birth_death_law(int dimension, double up, double down) {
  if (up < 0 || down < 0 || up + down > 1.0 + 1e-12)
    throw std::invalid_argument("birth-death rates must be nonnegative with up + down <= 1");
  const int k = dimension;

  TransitionLaw law;
  law.dimension = k;
  law.jump_bound = 1;
  law.a2_constant = 0.0;  // the kernel matches p_w exactly
  law.lattice_rank = k;
  law.name = "birth-death";

  law.mean_support = [k, up, down](const std::vector<double>& x) -> Support {
    std::vector<WeightedIncrement> entries;
    entries.reserve(2 * static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      if (up != 0.0) {
        Increment w(static_cast<size_t>(k), 0);
        w[static_cast<size_t>(i)] = 1;
        entries.push_back({std::move(w), up * x[static_cast<size_t>(i)]});
      }
      if (down != 0.0) {
        Increment w(static_cast<size_t>(k), 0);
        w[static_cast<size_t>(i)] = -1;
        entries.push_back({std::move(w), down * x[static_cast<size_t>(i)]});
      }
    }
    return sorted_support(std::move(entries));
  };

  // p_{-e_i} is proportional to z^i, so a removal from an empty color never
  // has positive probability: the kernel equals p_w exactly.
  law.exact_support = [k, up, down](const CountVector& z) -> Support {
    std::int64_t s = total_count(z);
    std::vector<WeightedIncrement> entries;
    double mass = 0.0;
    for (int i = 0; i < k; ++i) {
      double xi = s > 0 ? static_cast<double>(z[static_cast<size_t>(i)]) / static_cast<double>(s) : 0.0;
      if (xi == 0.0) continue;
      if (up != 0.0) {
        Increment w(static_cast<size_t>(k), 0);
        w[static_cast<size_t>(i)] = 1;
        entries.push_back({std::move(w), up * xi});
        mass += up * xi;
      }
      if (down != 0.0) {
        Increment w(static_cast<size_t>(k), 0);
        w[static_cast<size_t>(i)] = -1;
        entries.push_back({std::move(w), down * xi});
        mass += down * xi;
      }
    }
    entries.push_back({Increment(static_cast<size_t>(k), 0), std::max(0.0, 1.0 - mass)});
    return sorted_support(std::move(entries));
  };

  law.exact_sampler = [k, up, down](const CountVector& z, RngStream& rng) -> CountVector {
    std::int64_t s = total_count(z);
    if (s == 0) return z;
    double u = rng.uniform01();
    double c = 0.0;
    for (int i = 0; i < k; ++i) {
      double xi = static_cast<double>(z[static_cast<size_t>(i)]) / static_cast<double>(s);
      c += up * xi;
      if (u < c) {
        CountVector out = z;
        out[static_cast<size_t>(i)] += 1;
        return out;
      }
    }
    for (int i = 0; i < k; ++i) {
      double xi = static_cast<double>(z[static_cast<size_t>(i)]) / static_cast<double>(s);
      c += down * xi;
      if (u < c) {
        CountVector out = z;
        out[static_cast<size_t>(i)] -= 1;
        return out;
      }
    }
    return z;
  };

  return law;
}

}  // namespace urn
