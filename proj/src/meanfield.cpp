#include "urn/meanfield.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "urn/fertility.hpp"

namespace urn {

VectorField mean_vector_field(const TransitionLaw& law) {
  if (!law.enumerable())
    throw std::runtime_error("law has no enumerable mean support");
  VectorField field;
  field.dimension = law.dimension;
  field.provenance = "derived-from-law:" + law.name;
  auto support = law.mean_support;
  int k = law.dimension;
  field.eval = [support, k](const std::vector<double>& x) -> std::vector<double> {
    std::vector<double> g(static_cast<size_t>(k), 0.0);
    for (const auto& e : support(x)) {
      double a = static_cast<double>(alpha(e.delta));
      for (int i = 0; i < k; ++i)
        g[static_cast<size_t>(i)] +=
            e.prob * (e.delta[static_cast<size_t>(i)] - x[static_cast<size_t>(i)] * a);
    }
    return g;
  };
  return field;
}

VectorField replicator_field(const Matrix& payoff) {
  int k = static_cast<int>(payoff.size());
  for (const auto& row : payoff)
    if (static_cast<int>(row.size()) != k)
      throw std::invalid_argument("payoff matrix must be square");
  VectorField field;
  field.dimension = k;
  field.provenance = "replicator";
  field.eval = [payoff, k](const std::vector<double>& x) -> std::vector<double> {
    std::vector<double> ax(static_cast<size_t>(k), 0.0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        ax[static_cast<size_t>(i)] +=
            payoff[static_cast<size_t>(i)][static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
    double mean = 0.0;
    for (int i = 0; i < k; ++i) mean += x[static_cast<size_t>(i)] * ax[static_cast<size_t>(i)];
    std::vector<double> g(static_cast<size_t>(k), 0.0);
    for (int i = 0; i < k; ++i)
      g[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] * (ax[static_cast<size_t>(i)] - mean);
    return g;
  };
  return field;
}

VectorField fertility_field(int alleles, const Matrix& class_means) {
  GenotypeLayout lay{alleles};
  size_t classes = static_cast<size_t>(lay.classes());
  if (class_means.size() != classes)
    throw std::invalid_argument("class mean table must be classes x classes");
  for (const auto& row : class_means)
    if (row.size() != classes)
      throw std::invalid_argument("class mean table must be classes x classes");
  VectorField field;
  field.dimension = lay.dimension();
  field.provenance = "fertility";
  int k = alleles;
  field.eval = [lay, class_means, k](const std::vector<double>& x) -> std::vector<double> {
    std::vector<double> inflow(static_cast<size_t>(k * k), 0.0);
    double gbar = 0.0;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        double term = 0.0;
        for (int r = 0; r < k; ++r)
          for (int s = 0; s < k; ++s)
            term += class_means[static_cast<size_t>(lay.class_index(i, r))]
                               [static_cast<size_t>(lay.class_index(j, s))] *
                    x[static_cast<size_t>(lay.idx(i, r))] * x[static_cast<size_t>(lay.idx(j, s))];
        inflow[static_cast<size_t>(lay.idx(i, j))] = term;
        gbar += term;
      }
    }
    std::vector<double> g(static_cast<size_t>(k * k), 0.0);
    for (int i = 0; i < k * k; ++i)
      g[static_cast<size_t>(i)] = inflow[static_cast<size_t>(i)] - x[static_cast<size_t>(i)] * gbar;
    return g;
  };
  return field;
}

VectorField additive_fertility_field(const Matrix& gamma) {
  int k = static_cast<int>(gamma.size());
  GenotypeLayout lay{k};
  VectorField field;
  field.dimension = lay.dimension();
  field.provenance = "additive";
  field.eval = [gamma, lay, k](const std::vector<double>& x) -> std::vector<double> {
    std::vector<double> allele(static_cast<size_t>(k), 0.0);   // x^i = sum_j x^{ij}
    std::vector<double> fitness(static_cast<size_t>(k), 0.0);  // gam_i = sum_r gamma_{ir} x^{ir}
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        allele[static_cast<size_t>(i)] += x[static_cast<size_t>(lay.idx(i, j))];
        fitness[static_cast<size_t>(i)] += gamma[static_cast<size_t>(i)][static_cast<size_t>(j)] *
                                           x[static_cast<size_t>(lay.idx(i, j))];
      }
    }
    double gambar = 0.0;
    for (int i = 0; i < k; ++i) gambar += fitness[static_cast<size_t>(i)];
    std::vector<double> g(static_cast<size_t>(k * k), 0.0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        g[static_cast<size_t>(lay.idx(i, j))] =
            allele[static_cast<size_t>(j)] * fitness[static_cast<size_t>(i)] +
            allele[static_cast<size_t>(i)] * fitness[static_cast<size_t>(j)] -
            2.0 * x[static_cast<size_t>(lay.idx(i, j))] * gambar;
    return g;
  };
  return field;
}

VectorField allele_field(const Matrix& gamma) {
  int k = static_cast<int>(gamma.size());
  VectorField field;
  field.dimension = k;
  field.provenance = "allele";
  field.eval = [gamma, k](const std::vector<double>& x) -> std::vector<double> {
    std::vector<double> s(static_cast<size_t>(k), 0.0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        s[static_cast<size_t>(i)] +=
            gamma[static_cast<size_t>(i)][static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
    double mean = 0.0;
    for (int i = 0; i < k; ++i) mean += x[static_cast<size_t>(i)] * s[static_cast<size_t>(i)];
    std::vector<double> g(static_cast<size_t>(k), 0.0);
    for (int i = 0; i < k; ++i)
      g[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] * (s[static_cast<size_t>(i)] - mean);
    return g;
  };
  return field;
}

namespace {

std::vector<double> rk4_step(const VectorField& field, const std::vector<double>& x, double h) {
  size_t n = x.size();
  std::vector<double> k1 = field(x);
  std::vector<double> tmp(n);
  for (size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  std::vector<double> k2 = field(tmp);
  for (size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  std::vector<double> k3 = field(tmp);
  for (size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
  std::vector<double> k4 = field(tmp);
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i)
    out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

IntegrationResult integrate(const VectorField& field, const std::vector<double>& x0, double T,
                            double h, int store_stride) {
  if (h <= 0.0) throw std::invalid_argument("step size must be positive");
  if (store_stride < 1) throw std::invalid_argument("store stride must be >= 1");
  IntegrationResult res;
  std::vector<double> x = x0;
  double t = 0.0;
  res.times.push_back(t);
  res.states.push_back(x);
  std::int64_t steps_done = 0;
  while (t < T - 1e-12) {
    double step_h = std::min(h, T - t);
    double prestep_min = *std::min_element(x.begin(), x.end());
    std::vector<double> raw = rk4_step(field, x, step_h);
    for (double v : raw)
      if (!std::isfinite(v))
        throw std::runtime_error("vector field produced a non-finite value at t=" +
                                 format_double(t));
    std::vector<double> projected = raw;
    bool clamped = false;
    double raw_min = *std::min_element(raw.begin(), raw.end());
    for (double& v : projected)
      if (v < 0.0) {
        v = 0.0;
        clamped = true;
      }
    double sum = 0.0;
    for (double v : projected) sum += v;
    if (sum <= 0.0) throw std::runtime_error("integration collapsed to the null point");
    for (double& v : projected) v /= sum;
    if (clamped) {
      res.clamp_activations += 1;
      res.max_clamp_move = std::max(res.max_clamp_move, euclid_dist(raw, projected));
      res.min_coord_at_clamp = std::min(res.min_coord_at_clamp, raw_min);
      res.max_prestep_min_at_clamp = std::max(res.max_prestep_min_at_clamp, prestep_min);
    }
    x = std::move(projected);
    t += step_h;
    ++steps_done;
    if (steps_done % store_stride == 0 || t >= T - 1e-12) {
      res.times.push_back(t);
      res.states.push_back(x);
    }
  }
  return res;
}

double growth_rate(const TransitionLaw& law, const std::vector<double>& x) {
  if (!law.enumerable())
    throw std::runtime_error("law has no enumerable mean support");
  double lam = 0.0;
  for (const auto& e : law.mean_support(x)) lam += e.prob * static_cast<double>(alpha(e.delta));
  return lam;
}

double growth_rate_inf(const TransitionLaw& law, const std::vector<std::vector<double>>& xs) {
  double lam = std::numeric_limits<double>::infinity();
  for (const auto& x : xs) lam = std::min(lam, growth_rate(law, x));
  return lam;
}

std::string stability_name(Stability s) {
  switch (s) {
    case Stability::Stable: return "linearly stable";
    case Stability::Unstable: return "linearly unstable";
    case Stability::Nonhyperbolic: return "nonhyperbolic";
  }
  return "unknown";
}

namespace {

// Orthonormal basis of the tangent space {u : sum u_i = 0}: column j has
// entries 1/sqrt(j(j+1)) in the first j slots and -j/sqrt(j(j+1)) in slot j.
Eigen::MatrixXd tangent_basis(int k) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(k, k - 1);
  for (int j = 1; j < k; ++j) {
    double norm = std::sqrt(static_cast<double>(j) * (j + 1));
    for (int i = 0; i < j; ++i) b(i, j - 1) = 1.0 / norm;
    b(j, j - 1) = -static_cast<double>(j) / norm;
  }
  return b;
}

Eigen::VectorXd eval_field(const VectorField& field, const Eigen::VectorXd& x) {
  std::vector<double> xv(x.data(), x.data() + x.size());
  std::vector<double> g = field(xv);
  return Eigen::Map<Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
}

// Jacobian restricted to the tangent space, by central differences along the
// basis directions.
Eigen::MatrixXd tangent_jacobian(const VectorField& field, const Eigen::VectorXd& x,
                                 const Eigen::MatrixXd& basis, double fd_step) {
  int km1 = static_cast<int>(basis.cols());
  Eigen::MatrixXd jac(km1, km1);
  for (int c = 0; c < km1; ++c) {
    Eigen::VectorXd xp = x + fd_step * basis.col(c);
    Eigen::VectorXd xm = x - fd_step * basis.col(c);
    Eigen::VectorXd diff = (eval_field(field, xp) - eval_field(field, xm)) / (2.0 * fd_step);
    jac.col(c) = basis.transpose() * diff;
  }
  return jac;
}

constexpr double kFaceEps = 1e-9;

}  // namespace

EquilibriumReport classify(const VectorField& field, const std::vector<double>& xstar,
                           const TransitionLaw* law, const MeanFieldOptions& opts) {
  int k = field.dimension;
  EquilibriumReport rep;
  rep.x = xstar;
  rep.residual = euclid_norm(field(xstar));
  if (k > 1) {
    Eigen::MatrixXd basis = tangent_basis(k);
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xstar.data(), k);
    Eigen::MatrixXd jac = tangent_jacobian(field, x, basis, opts.fd_step);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(jac);
    for (int i = 0; i < k - 1; ++i)
      rep.eigenvalues.emplace_back(solver.eigenvalues()[i].real(), solver.eigenvalues()[i].imag());
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                if (a.real() != b.real()) return a.real() > b.real();
                return a.imag() > b.imag();
              });
  }
  bool any_pos = false, all_neg = !rep.eigenvalues.empty();
  for (const auto& ev : rep.eigenvalues) {
    if (ev.real() > opts.hyperbolicity_tol) any_pos = true;
    if (ev.real() >= -opts.hyperbolicity_tol) all_neg = false;
  }
  if (rep.eigenvalues.empty())
    rep.stability = Stability::Stable;  // one-point simplex has no tangent directions
  else
    rep.stability = any_pos ? Stability::Unstable
                            : (all_neg ? Stability::Stable : Stability::Nonhyperbolic);
  for (int i = 0; i < k; ++i)
    if (xstar[static_cast<size_t>(i)] <= kFaceEps) rep.face.push_back(i);
  if (law != nullptr && law->enumerable()) rep.lambda = growth_rate(*law, xstar);
  return rep;
}

namespace {

void compositions(int total, int parts, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 1; v <= total - (parts - 1); ++v) {
    cur.push_back(v);
    compositions(total - v, parts - 1, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<double>> barycentric_starts(int k, int density) {
  std::vector<std::vector<double>> starts;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> support;
    for (int i = 0; i < k; ++i)
      if (mask & (1u << i)) support.push_back(i);
    int s = static_cast<int>(support.size());
    if (s > density) continue;
    std::vector<std::vector<int>> comps;
    std::vector<int> cur;
    compositions(density, s, cur, comps);
    for (const auto& comp : comps) {
      std::vector<double> x(static_cast<size_t>(k), 0.0);
      for (int t = 0; t < s; ++t)
        x[static_cast<size_t>(support[static_cast<size_t>(t)])] =
            static_cast<double>(comp[static_cast<size_t>(t)]) / static_cast<double>(density);
      starts.push_back(std::move(x));
    }
  }
  return starts;
}

}  // namespace

std::vector<EquilibriumReport> find_equilibria(const VectorField& field,
                                               const MeanFieldOptions& opts,
                                               const TransitionLaw* law) {
  int k = field.dimension;
  if (k > 14) throw std::invalid_argument("equilibrium grid not supported above 14 coordinates");
  Eigen::MatrixXd basis = k > 1 ? tangent_basis(k) : Eigen::MatrixXd::Zero(1, 0);

  std::vector<std::vector<double>> roots;
  for (const auto& start : barycentric_starts(k, opts.grid_density)) {
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(start.data(), k);
    bool converged = false;
    for (int iter = 0; iter < opts.max_newton_iters; ++iter) {
      Eigen::VectorXd g = eval_field(field, x);
      if (!g.allFinite()) break;
      if (g.norm() <= opts.newton_tol) {
        converged = true;
        break;
      }
      if (k == 1) break;
      Eigen::MatrixXd jac = tangent_jacobian(field, x, basis, opts.fd_step);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
      if (!lu.isInvertible()) break;
      Eigen::VectorXd du = lu.solve(basis.transpose() * g);
      x -= basis * du;
      if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 5.0) break;  // diverged; drop this start
    }
    if (!converged) continue;
    if (x.minCoeff() < -1e-9) continue;  // left the simplex
    std::vector<double> root(x.data(), x.data() + k);
    for (double& v : root)
      if (std::abs(v) < 1e-10) v = 0.0;
    double sum = 0.0;
    for (double v : root) sum += v;
    if (sum <= 0.0) continue;
    for (double& v : root) v /= sum;
    if (euclid_norm(field(root)) > std::max(opts.newton_tol * 100.0, 1e-9)) continue;
    roots.push_back(std::move(root));
  }

  // deduplicate within tolerance, keeping the smaller residual
  std::vector<std::vector<double>> unique;
  for (const auto& r : roots) {
    bool merged = false;
    for (auto& u : unique) {
      if (euclid_dist(r, u) <= opts.dedupe_tol) {
        if (euclid_norm(field(r)) < euclid_norm(field(u))) u = r;
        merged = true;
        break;
      }
    }
    if (!merged) unique.push_back(r);
  }

  std::sort(unique.begin(), unique.end());
  std::vector<EquilibriumReport> reports;
  reports.reserve(unique.size());
  for (const auto& u : unique) reports.push_back(classify(field, u, law, opts));
  return reports;
}

NondegeneracyReport nondegeneracy(const TransitionLaw& law, const std::vector<double>& x,
                                  double support_eps) {
  if (!law.enumerable())
    throw std::runtime_error("law has no enumerable mean support");
  Support s = law.mean_support(x);
  std::vector<const Increment*> active;
  for (const auto& e : s)
    if (e.prob > support_eps) active.push_back(&e.delta);
  NondegeneracyReport rep;
  rep.required_rank = law.lattice_rank > 0 ? law.lattice_rank : law.dimension;
  if (active.empty()) {
    rep.rank = 0;
    rep.nondegenerate = false;
    return rep;
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(active.size()), law.dimension);
  for (size_t r = 0; r < active.size(); ++r)
    for (int c = 0; c < law.dimension; ++c)
      m(static_cast<Eigen::Index>(r), c) = static_cast<double>((*active[r])[static_cast<size_t>(c)]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  svd.setThreshold(1e-9);
  rep.rank = static_cast<int>(svd.rank());
  rep.nondegenerate = rep.rank >= rep.required_rank;
  return rep;
}

Matrix hardy_weinberg_defect(int alleles, const std::vector<double>& genotype_x) {
  GenotypeLayout lay{alleles};
  if (static_cast<int>(genotype_x.size()) != lay.dimension())
    throw std::invalid_argument("genotype frequency vector has wrong length");
  std::vector<double> allele(static_cast<size_t>(alleles), 0.0);
  for (int i = 0; i < alleles; ++i)
    for (int j = 0; j < alleles; ++j)
      allele[static_cast<size_t>(i)] += genotype_x[static_cast<size_t>(lay.idx(i, j))];
  Matrix defect(static_cast<size_t>(alleles), std::vector<double>(static_cast<size_t>(alleles)));
  for (int i = 0; i < alleles; ++i)
    for (int j = 0; j < alleles; ++j)
      defect[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          genotype_x[static_cast<size_t>(lay.idx(i, j))] -
          allele[static_cast<size_t>(i)] * allele[static_cast<size_t>(j)];
  return defect;
}

double hw_defect_norm(int alleles, const std::vector<double>& genotype_x) {
  Matrix d = hardy_weinberg_defect(alleles, genotype_x);
  double s = 0.0;
  for (const auto& row : d)
    for (double v : row) s += v * v;
  return std::sqrt(s);
}

std::vector<double> time_average_flow(const IntegrationResult& path) {
  if (path.states.empty()) throw std::invalid_argument("empty path");
  size_t k = path.states.front().size();
  std::vector<double> acc(k, 0.0);
  double span = path.times.back() - path.times.front();
  if (span <= 0.0) return path.states.front();
  for (size_t i = 0; i + 1 < path.states.size(); ++i) {
    double dt = path.times[i + 1] - path.times[i];
    for (size_t c = 0; c < k; ++c)
      acc[c] += 0.5 * dt * (path.states[i][c] + path.states[i + 1][c]);
  }
  for (double& v : acc) v /= span;
  return acc;
}

}  // namespace urn
