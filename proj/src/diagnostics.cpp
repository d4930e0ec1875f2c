#include "urn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "urn/meanfield.hpp"

namespace urn {

namespace {

// E[x_{n+1} - x_n | z_n] under the exact kernel distribution.
std::vector<double> expected_shift(const TransitionLaw& law, const CountVector& z,
                                   const std::vector<double>& x) {
  std::vector<double> e(x.size(), 0.0);
  for (const auto& [w, p] : law.exact_support(z)) {
    CountVector znext = apply_increment(z, w);
    SimplexPoint xnext = normalize(znext);
    for (size_t i = 0; i < e.size(); ++i)
      e[i] += p * (xnext.coords()[i] - x[i]);
  }
  return e;
}

}  // namespace

NoiseDecomposition noise_decomposition(const Trajectory& traj, const TransitionLaw& law) {
  if (!law.enumerable() || !law.kernel_enumerable())
    throw std::runtime_error("noise decomposition needs an enumerable law and kernel");
  if (traj.records.size() < 2)
    throw std::invalid_argument("trajectory too short for noise decomposition");
  for (size_t i = 0; i + 1 < traj.records.size(); ++i)
    if (traj.records[i + 1].n != traj.records[i].n + 1)
      throw std::invalid_argument("noise decomposition requires unit record stride");

  VectorField field = mean_vector_field(law);
  NoiseDecomposition out;
  out.steps.reserve(traj.records.size() - 1);
  for (size_t i = 0; i + 1 < traj.records.size(); ++i) {
    const auto& cur = traj.records[i];
    const auto& nxt = traj.records[i + 1];
    std::int64_t size = total_count(cur.z);
    if (size == 0) break;  // analysis window ends at extinction
    const std::vector<double>& x = cur.x.coords();
    std::vector<double> shift = expected_shift(law, cur.z, x);
    std::vector<double> g = field(x);
    double u2 = 0.0, b2 = 0.0;
    for (size_t c = 0; c < x.size(); ++c) {
      double u = (nxt.x.coords()[c] - x[c] - shift[c]) * static_cast<double>(size);
      double b = static_cast<double>(size) * shift[c] - g[c];
      u2 += u * u;
      b2 += b * b;
    }
    NoiseStep step{cur.n, size, std::sqrt(u2), std::sqrt(b2)};
    out.max_u_norm = std::max(out.max_u_norm, step.u_norm);
    out.max_scaled_b = std::max(out.max_scaled_b, static_cast<double>(size) * step.b_norm);
    out.steps.push_back(step);
  }
  return out;
}

std::vector<double> noise_sample(const TransitionLaw& law, const CountVector& z, RngStream& rng) {
  std::int64_t size = total_count(z);
  if (size == 0) throw std::invalid_argument("noise sample from the empty state");
  std::vector<double> x = normalize(z).coords();
  std::vector<double> shift = expected_shift(law, z, x);
  CountVector znext = law.exact_sampler(z, rng);
  SimplexPoint xnext = normalize(znext);
  std::vector<double> u(x.size());
  for (size_t i = 0; i < x.size(); ++i)
    u[i] = (xnext.coords()[i] - x[i] - shift[i]) * static_cast<double>(size);
  return u;
}

namespace {

double support_prob(const Support& s, const Increment& w, int dimension) {
  if (const WeightedIncrement* e = find_increment(s, w)) return e->prob;
  Increment zero(static_cast<size_t>(dimension), 0);
  if (w == zero) {
    // implied remainder
    double mass = 0.0;
    bool has_zero = false;
    for (const auto& e : s) {
      if (e.delta == zero) has_zero = true;
      mass += e.prob;
    }
    if (!has_zero) return std::max(0.0, 1.0 - mass);
  }
  return 0.0;
}

}  // namespace

AssumptionReport validate_assumptions(const TransitionLaw& law, int sample_pairs,
                                      std::uint64_t seed,
                                      const std::vector<CountVector>& probe_states) {
  if (!law.enumerable())
    throw std::runtime_error("assumption checks need an enumerable mean support");
  AssumptionReport rep;
  RngStream rng(seed);

  // jump bound over sampled compositions
  for (int t = 0; t < 64; ++t) {
    std::vector<double> x = random_simplex(law.dimension, rng);
    for (const auto& e : law.mean_support(x)) {
      int l1 = l1_norm(e.delta);
      rep.max_l1_seen = std::max(rep.max_l1_seen, l1);
      if (l1 > law.jump_bound && e.prob > 0.0) {
        rep.jump_bound_ok = false;
        rep.violations.push_back("increment with |w| = " + std::to_string(l1) +
                                 " exceeds jump bound " + std::to_string(law.jump_bound));
      }
    }
  }

  // Lipschitz estimate for the mean maps: a coarse random-pair sweep, then
  // bisection refinement of the worst segment. A jump keeps the probability
  // gap while the distance shrinks, so the ratio inflates scale after scale;
  // a smooth map levels off.
  auto pair_ratio = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double dist = euclid_dist(x, y);
    if (dist < 1e-14) return 0.0;
    Support sx = law.mean_support(x);
    Support sy = law.mean_support(y);
    double worst = 0.0;
    for (const auto& e : sx)
      worst = std::max(worst, std::abs(e.prob - support_prob(sy, e.delta, law.dimension)) / dist);
    for (const auto& e : sy)
      worst = std::max(worst, std::abs(e.prob - support_prob(sx, e.delta, law.dimension)) / dist);
    return worst;
  };

  double estimates[3] = {0.0, 0.0, 0.0};
  std::vector<double> best_x, best_y;
  for (int t = 0; t < std::max(1, sample_pairs); ++t) {
    std::vector<double> x = random_simplex(law.dimension, rng);
    std::vector<double> y = x;
    int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(law.dimension)));
    int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(law.dimension)));
    if (a == b) b = (b + 1) % law.dimension;
    double h = std::min({0.1, x[static_cast<size_t>(b)], 1.0 - x[static_cast<size_t>(a)]});
    y[static_cast<size_t>(a)] += h;
    y[static_cast<size_t>(b)] -= h;
    double r = pair_ratio(x, y);
    if (r > estimates[0]) {
      estimates[0] = r;
      best_x = x;
      best_y = y;
    }
  }
  for (int level = 1; level < 3 && !best_x.empty(); ++level) {
    // split the worst segment into ten pieces and keep the sharpest one;
    // convexity keeps every interpolate on the simplex
    std::vector<double> nbx = best_x, nby = best_y;
    double worst = 0.0;
    for (int piece = 0; piece < 10; ++piece) {
      double t0 = piece / 10.0, t1 = (piece + 1) / 10.0;
      std::vector<double> u(best_x.size()), v(best_x.size());
      for (size_t c = 0; c < best_x.size(); ++c) {
        u[c] = best_x[c] + t0 * (best_y[c] - best_x[c]);
        v[c] = best_x[c] + t1 * (best_y[c] - best_x[c]);
      }
      double r = pair_ratio(u, v);
      if (r > worst) {
        worst = r;
        nbx = u;
        nby = v;
      }
    }
    estimates[level] = worst;
    best_x = nbx;
    best_y = nby;
  }
  rep.lipschitz_estimate = std::max({estimates[0], estimates[1], estimates[2]});
  rep.lipschitz_diverging =
      estimates[1] > 2.5 * estimates[0] && estimates[2] > 2.5 * estimates[1];
  if (rep.lipschitz_diverging)
    rep.violations.push_back("mean-map Lipschitz estimate diverges with sample density");

  // kernel-vs-mean slack at the probe states
  if (!probe_states.empty() && law.kernel_enumerable()) {
    rep.a2_checked = true;
    for (const auto& z : probe_states) {
      std::int64_t size = total_count(z);
      if (size == 0) continue;
      std::vector<double> x = normalize(z).coords();
      Support mean = law.mean_support(x);
      Support kernel = law.exact_support(z);
      // union of increments, including the implicit zero
      std::vector<Increment> ws;
      for (const auto& e : mean) ws.push_back(e.delta);
      for (const auto& e : kernel) ws.push_back(e.delta);
      ws.push_back(Increment(static_cast<size_t>(law.dimension), 0));
      std::sort(ws.begin(), ws.end());
      ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
      for (const auto& w : ws) {
        double pw = support_prob(mean, w, law.dimension);
        double pi = support_prob(kernel, w, law.dimension);
        rep.fitted_a = std::max(rep.fitted_a, std::abs(pw - pi) * static_cast<double>(size));
      }
    }
    rep.a2_ok = !std::isnan(rep.fitted_a) && std::isfinite(rep.fitted_a) &&
                (law.a2_constant <= 0.0 || rep.fitted_a <= law.a2_constant);
    if (!rep.a2_ok)
      rep.violations.push_back("fitted kernel slack " + format_double(rep.fitted_a) +
                               " exceeds documented bound " + format_double(law.a2_constant));
  }
  return rep;
}

}  // namespace urn
