#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "urn/fertility.hpp"
#include "urn/law.hpp"
#include "urn/meanfield.hpp"
#include "urn/replicator.hpp"

using namespace urn;

namespace {

Matrix cyclic_rps() { return {{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}}; }

std::vector<double> symmetric_genotype_point(int alleles, RngStream& rng) {
  GenotypeLayout lay{alleles};
  std::vector<double> classes = random_simplex(lay.classes(), rng);
  std::vector<double> x(static_cast<size_t>(lay.dimension()), 0.0);
  for (int c = 0; c < lay.classes(); ++c) {
    auto [i, j] = lay.class_pair(c);
    if (i == j)
      x[static_cast<size_t>(lay.idx(i, i))] = classes[static_cast<size_t>(c)];
    else {
      x[static_cast<size_t>(lay.idx(i, j))] = classes[static_cast<size_t>(c)] / 2;
      x[static_cast<size_t>(lay.idx(j, i))] = classes[static_cast<size_t>(c)] / 2;
    }
  }
  return x;
}

}  // namespace

TEST_CASE("mean field of a frozen law vanishes") {
  ReplicatorSpec spec = ReplicatorSpec::uniform_entries(3, IntLaw::constant(0));
  VectorField g = mean_vector_field(replicator_law(spec));
  RngStream rng(1);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> x = random_simplex(3, rng);
    CHECK(euclid_norm(g(x)) == doctest::Approx(0.0));
  }
}

TEST_CASE("proportional reinforcement has zero drift") {
  VectorField g = mean_vector_field(birth_death_law(3, 1.0, 0.0));
  RngStream rng(2);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x = random_simplex(3, rng);
    CHECK(euclid_norm(g(x)) <= 1e-15);
  }
}

TEST_CASE("pair-interaction mean field equals the payoff field") {
  auto entry_a = IntLaw::table({{-1, 0.2}, {1, 0.3}, {2, 0.05}});
  auto entry_b = IntLaw::table({{1, 0.4}});
  ReplicatorSpec spec = ReplicatorSpec::uniform_entries(3, entry_a);
  spec.progeny_second = ReplicatorSpec::uniform_entries(3, entry_b).progeny_second;
  spec.self_progeny[1] = IntLaw::table({{2, 0.3}});
  spec.max_progeny = 2;
  spec.validate();
  VectorField from_law = mean_vector_field(replicator_law(spec));
  VectorField from_matrix = replicator_field(replicator_mean_matrix(spec));
  RngStream rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x = random_simplex(3, rng);
    CHECK(sup_norm_diff(from_law(x), from_matrix(x)) <= 1e-12);
  }
}

TEST_CASE("payoff field fixes vertices and the cyclic barycenter") {
  VectorField f = replicator_field(cyclic_rps());
  CHECK(euclid_norm(f({1, 0, 0})) == doctest::Approx(0.0));
  CHECK(euclid_norm(f({0, 1, 0})) == doctest::Approx(0.0));
  CHECK(euclid_norm(f({0, 0, 1})) == doctest::Approx(0.0));
  std::vector<double> center{1.0 / 3, 1.0 / 3, 1.0 / 3};
  CHECK(euclid_norm(f(center)) <= 1e-15);
}

TEST_CASE("single-genotype fertility flow is frozen") {
  VectorField f = fertility_field(1, {{2.0}});
  CHECK(euclid_norm(f({1.0})) <= 1e-15);
}

TEST_CASE("uniform mating success redistributes toward allele products") {
  // constant mean progeny c: inflow is c * x^i x^j, so the flow is
  // c * (allele product - current frequency)
  double c = 1.7;
  GenotypeLayout lay{3};
  Matrix table(static_cast<size_t>(lay.classes()),
               std::vector<double>(static_cast<size_t>(lay.classes()), c));
  VectorField f = fertility_field(3, table);
  RngStream rng(4);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> x = symmetric_genotype_point(3, rng);
    std::vector<double> g = f(x);
    std::vector<double> allele(3, 0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) allele[static_cast<size_t>(i)] += x[static_cast<size_t>(lay.idx(i, j))];
    double sum = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double expected = c * (allele[static_cast<size_t>(i)] * allele[static_cast<size_t>(j)] -
                               x[static_cast<size_t>(lay.idx(i, j))]);
        CHECK(g[static_cast<size_t>(lay.idx(i, j))] == doctest::Approx(expected).epsilon(1e-10));
        sum += g[static_cast<size_t>(lay.idx(i, j))];
      }
    CHECK(std::abs(sum) <= 1e-12);
  }
}

TEST_CASE("additive fertility field: special cases") {
  // constant contributions fix every product-form point
  Matrix gamma{{1.3, 1.3}, {1.3, 1.3}};
  VectorField f = additive_fertility_field(gamma);
  GenotypeLayout lay{2};
  for (double p : {0.25, 0.5, 0.9}) {
    std::vector<double> x(4);
    x[static_cast<size_t>(lay.idx(0, 0))] = p * p;
    x[static_cast<size_t>(lay.idx(0, 1))] = p * (1 - p);
    x[static_cast<size_t>(lay.idx(1, 0))] = p * (1 - p);
    x[static_cast<size_t>(lay.idx(1, 1))] = (1 - p) * (1 - p);
    CHECK(euclid_norm(f(x)) <= 1e-13);
  }
  // one allele reduces to a frozen point
  VectorField f1 = additive_fertility_field(Matrix{{1.1}});
  CHECK(euclid_norm(f1({1.0})) <= 1e-15);
}

TEST_CASE("additive means make both fertility field routes identical") {
  RngStream rng(5);
  int k = 3;
  GenotypeLayout lay{k};
  Matrix gamma(static_cast<size_t>(k), std::vector<double>(static_cast<size_t>(k)));
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      double v = 0.5 + rng.uniform01();
      gamma[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
      gamma[static_cast<size_t>(j)][static_cast<size_t>(i)] = v;
    }
  Matrix table(static_cast<size_t>(lay.classes()),
               std::vector<double>(static_cast<size_t>(lay.classes())));
  for (int a = 0; a < lay.classes(); ++a)
    for (int b = 0; b < lay.classes(); ++b) {
      auto [i, j] = lay.class_pair(a);
      auto [r, s] = lay.class_pair(b);
      table[static_cast<size_t>(a)][static_cast<size_t>(b)] =
          gamma[static_cast<size_t>(i)][static_cast<size_t>(j)] +
          gamma[static_cast<size_t>(r)][static_cast<size_t>(s)];
    }
  VectorField general = fertility_field(k, table);
  VectorField additive = additive_fertility_field(gamma);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x = symmetric_genotype_point(k, rng);
    CHECK(sup_norm_diff(general(x), additive(x)) <= 1e-12);
  }
}

TEST_CASE("mating-process mean field is the fertility field on the doubled clock") {
  FertilitySpec spec = FertilitySpec::additive({{1.2, 1.05}, {1.05, 0.9}});
  TransitionLaw law = fertility_law(spec);
  VectorField from_law = mean_vector_field(law);
  VectorField displayed = fertility_field(2, fertility_mean_table(spec));
  RngStream rng(6);
  for (int t = 0; t < 40; ++t) {
    std::vector<double> x = symmetric_genotype_point(2, rng);
    std::vector<double> a = from_law(x);
    std::vector<double> b = displayed(x);
    for (size_t c = 0; c < a.size(); ++c)
      CHECK(a[c] == doctest::Approx(2.0 * b[c]).epsilon(1e-9));
  }
}

TEST_CASE("allele field: neutrality, dominance and overdominance") {
  VectorField neutral = allele_field(Matrix{{1.1, 1.1}, {1.1, 1.1}});
  CHECK(euclid_norm(neutral({0.3, 0.7})) <= 1e-15);

  VectorField directional = allele_field(Matrix{{1.3, 1.15}, {1.15, 1.0}});
  IntegrationResult path = integrate(directional, {0.3, 0.7}, 200.0, 1e-2);
  CHECK(path.states.back()[0] >= 0.999);
  // mean fitness increases along the flow
  auto fitness = [&](const std::vector<double>& x) {
    return 1.3 * x[0] * x[0] + 2 * 1.15 * x[0] * x[1] + 1.0 * x[1] * x[1];
  };
  for (size_t i = 1; i < path.states.size(); ++i)
    CHECK(fitness(path.states[i]) >= fitness(path.states[i - 1]) - 1e-12);

  VectorField over = allele_field(Matrix{{1.0, 1.3}, {1.3, 1.0}});
  std::vector<EquilibriumReport> eqs = find_equilibria(over);
  bool has_half = false;
  for (const auto& e : eqs)
    if (e.face.empty() && std::abs(e.x[0] - 0.5) <= 1e-8) {
      has_half = true;
      CHECK(e.stability == Stability::Stable);
    }
  CHECK(has_half);
}

TEST_CASE("integration of a frozen field stays put") {
  VectorField zero{3, "zero", [](const std::vector<double>& x) {
                     return std::vector<double>(x.size(), 0.0);
                   }};
  std::vector<double> x0{0.2, 0.3, 0.5};
  IntegrationResult path = integrate(zero, x0, 5.0, 1e-2);
  CHECK(sup_norm_diff(path.states.back(), x0) <= 1e-15);
}

TEST_CASE("cyclic-game flow conserves the coordinate product") {
  VectorField f = replicator_field(cyclic_rps());
  IntegrationResult path = integrate(f, {0.5, 0.3, 0.2}, 100.0, 1e-3, 100);
  double p0 = path.states.front()[0] * path.states.front()[1] * path.states.front()[2];
  for (const auto& x : path.states) {
    double p = x[0] * x[1] * x[2];
    CHECK(std::abs(p - p0) <= 1e-6);
  }
}

TEST_CASE("halving the step shows fourth-order convergence") {
  VectorField f = replicator_field(cyclic_rps());
  std::vector<double> x0{0.5, 0.3, 0.2};
  auto endpoint = [&](double h) { return integrate(f, x0, 10.0, h, 1 << 24).states.back(); };
  std::vector<double> ref = endpoint(1e-3);
  double e1 = euclid_dist(endpoint(0.05), ref);
  double e2 = euclid_dist(endpoint(0.025), ref);
  CHECK(e1 / e2 >= 10.0);
  CHECK(e1 / e2 <= 26.0);
}

TEST_CASE("projection in the integrator is rare, boundary-local and tiny") {
  MeanFieldOptions opts;
  struct Case {
    VectorField field;
    std::vector<double> x0;
  };
  std::vector<Case> cases;
  cases.push_back({replicator_field(cyclic_rps()), {1e-4, 0.5, 0.4999}});
  cases.push_back({allele_field(Matrix{{1.3, 1.15}, {1.15, 1.0}}), {0.9999, 0.0001}});
  for (const auto& c : cases) {
    IntegrationResult path = integrate(c.field, c.x0, 50.0, opts.h);
    if (path.clamp_activations > 0) {
      CHECK(path.max_clamp_move <= opts.h * opts.h);
      CHECK(path.max_prestep_min_at_clamp <= 10.0 * opts.h);
    }
  }
}

TEST_CASE("growth rate: reinforcement, signed drift, and the payoff identity") {
  CHECK(growth_rate(birth_death_law(2, 1.0, 0.0), {0.4, 0.6}) == doctest::Approx(1.0));

  double p = 0.35, q = 0.15;
  auto support = [p, q](const std::vector<double>& x) -> Support {
    Support s;
    s.push_back({Increment{1, 0}, p * x[0]});
    s.push_back({Increment{-1, 0}, q * x[0]});
    return sorted_support(std::move(s));
  };
  TransitionLaw law = law_from_mean_support(2, 1, support, "signed-drift");
  CHECK(growth_rate(law, {1.0, 0.0}) == doctest::Approx(p - q));

  auto entry = IntLaw::table({{-1, 0.25}, {1, 0.3}, {2, 0.1}});
  ReplicatorSpec spec = ReplicatorSpec::uniform_entries(3, entry);
  TransitionLaw rep = replicator_law(spec);
  Matrix a = replicator_mean_matrix(spec);
  RngStream rng(8);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> x = random_simplex(3, rng);
    double quad = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        quad += x[static_cast<size_t>(i)] * a[static_cast<size_t>(i)][static_cast<size_t>(j)] *
                x[static_cast<size_t>(j)];
    CHECK(std::abs(growth_rate(rep, x) - quad) <= 1e-10);
  }
}

TEST_CASE("equilibrium search: cyclic game has three vertices and the center") {
  std::vector<EquilibriumReport> eqs = find_equilibria(replicator_field(cyclic_rps()));
  REQUIRE(eqs.size() == 4);
  int vertices = 0, interior = 0;
  for (const auto& e : eqs) {
    if (e.face.empty()) {
      ++interior;
      CHECK(std::abs(e.x[0] - 1.0 / 3) <= 1e-9);
      CHECK(e.stability == Stability::Nonhyperbolic);
      REQUIRE(e.eigenvalues.size() == 2);
      CHECK(std::abs(e.eigenvalues[0].real()) <= 1e-6);
      CHECK(std::abs(std::abs(e.eigenvalues[0].imag()) - 1.0 / std::sqrt(3.0)) <= 1e-4);
    } else {
      ++vertices;
      CHECK(e.stability == Stability::Unstable);  // cyclic vertices are saddles
    }
  }
  CHECK(vertices == 3);
  CHECK(interior == 1);
}

TEST_CASE("equilibrium search: coordination game") {
  Matrix a{{1, 0}, {0, 1}};
  std::vector<EquilibriumReport> eqs = find_equilibria(replicator_field(a));
  REQUIRE(eqs.size() == 3);
  for (const auto& e : eqs) {
    if (e.face.empty()) {
      CHECK(std::abs(e.x[0] - 0.5) <= 1e-9);
      CHECK(e.stability == Stability::Unstable);
      // the one-dimensional tangent derivative at the mixed point is +1/2
      CHECK(e.eigenvalues[0].real() == doctest::Approx(0.5).epsilon(1e-4));
    } else {
      CHECK(e.stability == Stability::Stable);
    }
  }
}

TEST_CASE("equilibrium search: a frozen field yields a flagged continuum") {
  VectorField zero{2, "zero", [](const std::vector<double>& x) {
                     return std::vector<double>(x.size(), 0.0);
                   }};
  std::vector<EquilibriumReport> eqs = find_equilibria(zero);
  CHECK(eqs.size() >= 6);  // the whole start grid survives deduplication
  for (const auto& e : eqs) CHECK(e.stability == Stability::Nonhyperbolic);
}

TEST_CASE("classification is stable under halving the difference step") {
  Matrix a{{1, 0}, {0, 1}};
  VectorField f = replicator_field(a);
  MeanFieldOptions coarse, fine;
  fine.fd_step = coarse.fd_step / 2;
  for (const std::vector<double>& x :
       std::vector<std::vector<double>>{{0.5, 0.5}, {1.0, 0.0}, {0.0, 1.0}}) {
    EquilibriumReport r1 = classify(f, x, nullptr, coarse);
    EquilibriumReport r2 = classify(f, x, nullptr, fine);
    CHECK(r1.stability == r2.stability);
  }
}

TEST_CASE("tangency holds for every field family") {
  RngStream rng(9);
  std::vector<VectorField> fields;
  fields.push_back(replicator_field(cyclic_rps()));
  fields.push_back(additive_fertility_field(Matrix{{1.2, 1.05}, {1.05, 0.9}}));
  fields.push_back(allele_field(Matrix{{1.3, 1.15}, {1.15, 1.0}}));
  fields.push_back(mean_vector_field(fertility_law(FertilitySpec::additive({{1.1, 1.1}, {1.1, 1.1}}))));
  for (const auto& f : fields) {
    for (int t = 0; t < 20; ++t) {
      std::vector<double> x = f.dimension == 4 ? symmetric_genotype_point(2, rng)
                                               : random_simplex(f.dimension, rng);
      std::vector<double> g = f(x);
      double sum = 0.0;
      for (double v : g) sum += v;
      CHECK(std::abs(sum) <= 1e-12);
    }
  }
}

TEST_CASE("faces are invariant for the payoff field") {
  VectorField f = replicator_field(cyclic_rps());
  std::vector<double> x{0.6, 0.4, 0.0};
  CHECK(f(x)[2] == doctest::Approx(0.0));
}

TEST_CASE("noise span rank distinguishes full and drift-only laws") {
  auto basis_support = [](const std::vector<double>&) -> Support {
    Support s;
    s.push_back({Increment{1, 0, 0}, 0.2});
    s.push_back({Increment{0, 1, 0}, 0.2});
    s.push_back({Increment{0, 0, 1}, 0.2});
    return s;
  };
  TransitionLaw full = law_from_mean_support(3, 1, basis_support, "basis");
  NondegeneracyReport r1 = nondegeneracy(full, {0.3, 0.3, 0.4});
  CHECK(r1.rank == 3);
  CHECK(r1.nondegenerate);

  auto swap_support = [](const std::vector<double>&) -> Support {
    Support s;
    s.push_back({Increment{1, -1}, 0.3});
    s.push_back({Increment{-1, 1}, 0.3});
    return s;
  };
  TransitionLaw swap = law_from_mean_support(2, 2, swap_support, "swap");
  NondegeneracyReport r2 = nondegeneracy(swap, {0.5, 0.5});
  CHECK(r2.rank == 1);
  CHECK(!r2.nondegenerate);
}

TEST_CASE("mutation keeps the mating noise at full symmetric rank") {
  FertilitySpec spec = FertilitySpec::additive({{1.1, 1.1}, {1.1, 1.1}});
  MutationMatrix mu = MutationMatrix::identity(2);
  for (size_t a = 0; a < mu.rows.size(); ++a)
    for (size_t b = 0; b < mu.rows.size(); ++b) mu.rows[a][b] = a == b ? 0.98 : 0.01;
  TransitionLaw law = mutation_fertility_law(spec, mu);
  GenotypeLayout lay{2};
  std::vector<double> x(4);
  x[static_cast<size_t>(lay.idx(0, 0))] = 0.3;
  x[static_cast<size_t>(lay.idx(0, 1))] = 0.2;
  x[static_cast<size_t>(lay.idx(1, 0))] = 0.2;
  x[static_cast<size_t>(lay.idx(1, 1))] = 0.3;
  NondegeneracyReport r = nondegeneracy(law, x);
  CHECK(r.required_rank == lay.classes());
  CHECK(r.rank == lay.classes());
  CHECK(r.nondegenerate);
}

TEST_CASE("product-form points have zero mixing defect") {
  GenotypeLayout lay{2};
  double p = 0.25;
  std::vector<double> x(4);
  x[static_cast<size_t>(lay.idx(0, 0))] = p * p;
  x[static_cast<size_t>(lay.idx(0, 1))] = p * (1 - p);
  x[static_cast<size_t>(lay.idx(1, 0))] = p * (1 - p);
  x[static_cast<size_t>(lay.idx(1, 1))] = (1 - p) * (1 - p);
  CHECK(hw_defect_norm(2, x) <= 1e-15);

  std::vector<double> het{0.0, 0.5, 0.5, 0.0};
  Matrix d = hardy_weinberg_defect(2, het);
  CHECK(d[0][0] == doctest::Approx(-0.25));
  CHECK(d[0][1] == doctest::Approx(0.25));
}

TEST_CASE("flow time averages: constant path and long-run limits") {
  VectorField zero{2, "zero", [](const std::vector<double>& x) {
                     return std::vector<double>(x.size(), 0.0);
                   }};
  IntegrationResult still = integrate(zero, {0.4, 0.6}, 3.0, 1e-2);
  std::vector<double> avg = time_average_flow(still);
  CHECK(avg[0] == doctest::Approx(0.4));

  VectorField directional = allele_field(Matrix{{1.3, 1.15}, {1.15, 1.0}});
  IntegrationResult path = integrate(directional, {0.3, 0.7}, 400.0, 1e-2, 10);
  std::vector<double> avg2 = time_average_flow(path);
  CHECK(avg2[0] >= 0.9);  // converging paths average toward the limit
}

TEST_CASE("cyclic-game flow averages to the interior equilibrium") {
  VectorField f = replicator_field(cyclic_rps());
  IntegrationResult path = integrate(f, {0.4, 0.3, 0.3}, 500.0, 1e-3, 1);
  std::vector<double> avg = time_average_flow(path);
  for (double v : avg) CHECK(std::abs(v - 1.0 / 3) <= 1e-3);
}
