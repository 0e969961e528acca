#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "finopt/analytic.hpp"
#include "finopt/sensitivity.hpp"
#include "finopt/solver.hpp"
#include "oracles.hpp"

using namespace finopt;
using finopt::test::reference_problem;

namespace {

std::vector<ThicknessProfile> test_profiles(const FinProblem& p, std::size_t n) {
  const double L = optimal_length(p);
  const Mesh mesh(n, L);
  std::vector<ThicknessProfile> out;
  out.push_back(analytic_profile(p, mesh));
  out.push_back(constant_profile(mesh, p.area / L));
  out.push_back(apply_floor(p, sample_profile(mesh, [&](double x) { return 2.0 * p.area / L * (1.0 - x / L); })));
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int r = 0; r < 2; ++r) {
    std::vector<double> v(n);
    for (double& t : v) t = u(rng) * p.area / L;
    out.emplace_back(mesh, v);
  }
  return out;
}

}  // namespace

TEST(Adjoint, EqualsPrimalOnVariedProfiles) {
  const FinProblem p = reference_problem();
  for (const auto& prof : test_profiles(p, 300)) {
    const TemperatureField theta = solve_temperature(p, prof);
    const AdjointField w = solve_adjoint(p, prof);
    double gap = 0.0;
    for (std::size_t i = 0; i < theta.mesh().nodes(); ++i) gap = std::max(gap, std::abs(w[i] - theta[i]));
    EXPECT_LE(gap / theta.root_value(), 1e-10);
  }
}

TEST(Adjoint, AdjointMatrixIsTransposeOfPrimal) {
  const FinProblem p = reference_problem();
  const auto prof = test_profiles(p, 20)[3];
  const ChainMatrix k = assemble_system(p, prof);
  const ChainMatrix kt = assemble_adjoint_system(p, prof);
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = 0; j < k.size(); ++j) EXPECT_EQ(kt.entry(i, j), k.entry(j, i));
}

TEST(Adjoint, ZeroLoadAndCoshOracle) {
  FinProblem p = reference_problem();
  const double L = optimal_length(p);
  const double t = p.area / L;
  const Mesh mesh(1000, L);
  const AdjointField w = solve_adjoint(p, constant_profile(mesh, t));
  for (std::size_t i = 0; i < mesh.nodes(); i += 50) {
    const double exact = test::rectangular_fin_temperature(p, t, L, mesh.node(i));
    EXPECT_NEAR(w[i], exact, 1e-3 * exact);
  }
  p.q0 = 0.0;
  for (double v : solve_adjoint(p, constant_profile(mesh, t)).values()) EXPECT_EQ(v, 0.0);
}

TEST(ComplianceGradient, NonPositiveEverywhere) {
  const FinProblem p = reference_problem();
  for (const auto& prof : test_profiles(p, 120)) {
    const auto g = compliance_gradient(p, prof, solve_temperature(p, prof), solve_adjoint(p, prof));
    for (double v : g.values) EXPECT_LE(v, 0.0);
  }
}

TEST(ComplianceGradient, ConstantDensityEqualToMultiplierAtOptimum) {
  const FinProblem p = reference_problem();
  const OptimalSolution s = optimal_solution(p);
  // lambda = k q0^2 / (h^2 L^4)
  const double lambda = p.k * p.q0 * p.q0 / (p.h * p.h * std::pow(s.length, 4));
  const ThicknessProfile prof = analytic_profile(p, Mesh(1000, s.length));
  const auto g = compliance_gradient(p, prof, solve_temperature(p, prof), solve_adjoint(p, prof), lambda);

  double sum = 0.0, sum_sq = 0.0;
  const std::size_t n = prof.mesh().cells();
  for (std::size_t f = 1; f + 1 < n; ++f) {
    sum += g.density(f);
    sum_sq += g.density(f) * g.density(f);
  }
  const double count = static_cast<double>(n - 2);
  const double mean = sum / count;
  const double cv = std::sqrt(sum_sq / count - mean * mean) / std::abs(mean);
  EXPECT_LE(cv, 1e-2);
  EXPECT_NEAR(-mean, lambda, 1e-2 * lambda);
  EXPECT_LE(std::abs(g.stationarity_residual(n / 2)), 1e-2 * lambda);
}

TEST(ComplianceGradient, AgreesWithCentralDifferences) {
  const FinProblem p = reference_problem();
  const double t0 = optimal_solution(p).root_thickness;
  for (const auto& prof : test_profiles(p, 64)) {
    const auto g = compliance_gradient(p, prof, solve_temperature(p, prof), solve_adjoint(p, prof));
    for (std::size_t f = 1; f + 1 < 64; ++f) {
      const double fd = finite_difference_gradient(p, prof, f, 1e-6 * t0);
      EXPECT_LE(std::abs(g.values[f] - fd) / std::abs(fd), 1e-5) << "face " << f;
    }
  }
}

TEST(FiniteDifference, TruncationErrorIsSecondOrderInStep) {
  const FinProblem p = reference_problem();
  const double t0 = optimal_solution(p).root_thickness;
  const ThicknessProfile prof = test_profiles(p, 64)[0];
  const auto g = compliance_gradient(p, prof, solve_temperature(p, prof), solve_adjoint(p, prof));
  const std::size_t face = 5;
  const double e1 = std::abs(finite_difference_gradient(p, prof, face, 0.2 * t0) - g.values[face]);
  const double e2 = std::abs(finite_difference_gradient(p, prof, face, 0.1 * t0) - g.values[face]);
  EXPECT_GT(e1, 1e-6 * std::abs(g.values[face]));
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.3);
}

TEST(FiniteDifference, InvalidRequests) {
  const FinProblem p = reference_problem();
  const ThicknessProfile prof = test_profiles(p, 64)[0];
  EXPECT_THROW(finite_difference_gradient(p, prof, 3, 0.0), DomainError);
  EXPECT_THROW(finite_difference_gradient(p, prof, 3, -1e-9), DomainError);
  EXPECT_THROW(finite_difference_gradient(p, prof, 64, 1e-9), DomainError);
  EXPECT_THROW(finite_difference_gradient(p, prof, 63, prof[63]), DomainError);
}

TEST(ComplianceGradient, MeshMismatchIsAnError) {
  const FinProblem p = reference_problem();
  const auto a = test_profiles(p, 64)[0];
  const auto b = test_profiles(p, 65)[0];
  EXPECT_THROW(compliance_gradient(p, a, solve_temperature(p, b), solve_adjoint(p, a)), DomainError);
}
