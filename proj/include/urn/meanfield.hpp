#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "urn/law.hpp"
#include "urn/types.hpp"

namespace urn {

// Drift field g on the simplex; sum of components vanishes, so the flow
// preserves the affine hull {sum x = 1}.
struct VectorField {
  int dimension = 0;
  std::string provenance;
  std::function<std::vector<double>(const std::vector<double>&)> eval;

  std::vector<double> operator()(const std::vector<double>& x) const { return eval(x); }
};

// g(x) = sum_w p_w(x) (w - x alpha(w)). Throws for non-enumerable laws.
VectorField mean_vector_field(const TransitionLaw& law);

// g(x) = diag(x) A x - (x.Ax) x
VectorField replicator_field(const Matrix& payoff);

// Genotype-frequency field on k^2 coordinates,
//   dx^{ij}/dt = sum_{r,s} g(ir,js) x^{ir} x^{js} - x^{ij} gbar,
// with g indexed by unordered genotype classes.
VectorField fertility_field(int alleles, const Matrix& class_means);

// Additive special case: dx^{ij}/dt = x^j gam_i + x^i gam_j - 2 x^{ij} gambar.
VectorField additive_fertility_field(const Matrix& gamma);

// Allele-frequency reduction on the k-simplex (valid on the product
// manifold x^{ij} = x^i x^j): dx^i/dt = x^i ((gamma x)^i - x.gamma x).
VectorField allele_field(const Matrix& gamma);

struct IntegrationResult {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::int64_t clamp_activations = 0;  // steps where a negative coordinate was clamped
  double max_clamp_move = 0.0;         // largest distance the projection moved a state
  double min_coord_at_clamp = 1.0;     // most negative raw coordinate seen
  double max_prestep_min_at_clamp = 0.0;  // largest pre-step min coordinate among clamped steps
};

// Classical fixed-step RK4; after each step negative coordinates are clamped
// to zero and the state renormalized to unit sum. Throws on non-finite field
// values. store_stride thins the returned path (the final state is always
// stored).
IntegrationResult integrate(const VectorField& field, const std::vector<double>& x0,
                            double T, double h, int store_stride = 1);

// lambda(x) = sum_w p_w(x) alpha(w): expected per-update change of |z|.
double growth_rate(const TransitionLaw& law, const std::vector<double>& x);
double growth_rate_inf(const TransitionLaw& law, const std::vector<std::vector<double>>& xs);

enum class Stability { Stable, Unstable, Nonhyperbolic };
std::string stability_name(Stability s);

struct EquilibriumReport {
  std::vector<double> x;
  double residual = 0.0;
  std::vector<std::complex<double>> eigenvalues;  // tangent-space exponents, k-1 of them
  Stability stability = Stability::Nonhyperbolic;
  std::optional<double> lambda;  // growth rate at x when a law is supplied
  std::vector<int> face;         // coordinates pinned at zero
};

struct MeanFieldOptions {
  double h = 1e-3;
  double newton_tol = 1e-10;
  double dedupe_tol = 1e-6;
  double fd_step = 1e-5;
  double hyperbolicity_tol = 1e-6;
  double support_eps = 1e-12;
  int grid_density = 5;  // barycentric points per axis on each face
  int max_newton_iters = 60;
};

// Newton iteration in simplex-affine coordinates from a barycentric grid over
// every face; converged roots are deduplicated and classified. Starts that
// diverge are discarded. Reports are sorted deterministically.
std::vector<EquilibriumReport> find_equilibria(const VectorField& field,
                                               const MeanFieldOptions& opts = {},
                                               const TransitionLaw* law = nullptr);

// Tangent-space Jacobian by central differences, restricted to {sum u = 0}
// via a fixed orthonormal basis; eigenvalue real parts against the
// hyperbolicity threshold decide the class.
EquilibriumReport classify(const VectorField& field, const std::vector<double>& xstar,
                           const TransitionLaw* law = nullptr,
                           const MeanFieldOptions& opts = {});

struct NondegeneracyReport {
  int rank = 0;
  int required_rank = 0;
  bool nondegenerate = false;
};

// Rank of the span of increments with p_w(x) > support_eps, against the
// dimension of the lattice the law can actually move in.
NondegeneracyReport nondegeneracy(const TransitionLaw& law, const std::vector<double>& x,
                                  double support_eps = 1e-12);

// k x k matrix x^{ij} - x^i x^j over genotype frequencies; zero exactly on
// the product manifold.
Matrix hardy_weinberg_defect(int alleles, const std::vector<double>& genotype_x);
double hw_defect_norm(int alleles, const std::vector<double>& genotype_x);

// Trapezoidal average of the state over the integration window.
std::vector<double> time_average_flow(const IntegrationResult& path);

}  // namespace urn
