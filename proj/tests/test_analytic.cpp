#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "finopt/analytic.hpp"
#include "oracles.hpp"

using namespace finopt;
using finopt::test::reference_problem;

// Hand-evaluated closed-form values for k = 200, A = 1.6e-4, q0 = 20:
//   h = 20:  L = cbrt(0.0048) = 0.16868653306034986, t0 = h L^2 / k = 2.8455146435920507e-3,
//            theta0 = q0 / (h L) = 5.928155507483438, C = q0^2 / (h L) = 118.56311014966874,
//            r_fin = 1 / (h L) = 0.2964077753741719, duffin flux = cbrt(38.4) = 3.373730661206997
//   h = 200: L = cbrt(4.8e-4) = 0.07829735282337728

TEST(OptimalLength, ReferenceValues) {
  EXPECT_NEAR(optimal_length(reference_problem(20.0)), 0.16868653306034986, 1e-15);
  EXPECT_NEAR(optimal_length(reference_problem(20.0)), 0.16869, 1e-5);
  EXPECT_NEAR(optimal_length(reference_problem(200.0)), 0.07829735282337728, 1e-15);
}

TEST(OptimalLength, EightTimesAreaDoublesLength) {
  FinProblem p = reference_problem();
  const double L = optimal_length(p);
  p.area *= 8.0;
  EXPECT_NEAR(optimal_length(p), 2.0 * L, 1e-15 * L);
}

TEST(OptimalLength, RejectsNonPositiveParameters) {
  for (auto mutate : {+[](FinProblem& p) { p.k = 0.0; }, +[](FinProblem& p) { p.h = -1.0; },
                      +[](FinProblem& p) { p.area = 0.0; }, +[](FinProblem& p) { p.width = 0.0; },
                      +[](FinProblem& p) { p.q0 = -1.0; }}) {
    FinProblem p = reference_problem();
    mutate(p);
    EXPECT_THROW(optimal_length(p), DomainError);
  }
}

TEST(OptimalThickness, TipRootAndRange) {
  const FinProblem p = reference_problem();
  const double L = optimal_length(p);
  EXPECT_EQ(optimal_thickness(p, L, L), 0.0);
  EXPECT_NEAR(optimal_thickness(p, 0.0, L), 2.8455146435920507e-3, 1e-15);
  EXPECT_NEAR(optimal_thickness(p, 0.0, 0.16869), 2.846e-3, 1e-6);
  EXPECT_THROW(optimal_thickness(p, -1e-9, L), DomainError);
  EXPECT_THROW(optimal_thickness(p, 1.01 * L, L), DomainError);
}

TEST(OptimalThickness, AreaIntegralMatchesBudget) {
  const FinProblem p = reference_problem();
  const double L = optimal_length(p);
  const double area = test::simpson([&](double x) { return optimal_thickness(p, x, L); }, 0.0, L);
  EXPECT_NEAR(area, p.area, 1e-13 * p.area);
}

TEST(OptimalTemperature, ValuesAndZeroLoad) {
  FinProblem p = reference_problem();
  const double L = optimal_length(p);
  EXPECT_NEAR(optimal_temperature(p, 0.0, L), 5.928155507483438, 1e-13);
  EXPECT_NEAR(optimal_temperature(p, 0.0, 0.16869), 5.928, 1e-3);
  EXPECT_EQ(optimal_temperature(p, L, L), 0.0);
  p.q0 = 0.0;
  for (double x : {0.0, 0.3 * L, L}) EXPECT_EQ(optimal_temperature(p, x, L), 0.0);
}

TEST(OptimalTemperature, SecondDifferencesVanish) {
  const FinProblem p = reference_problem();
  const double L = optimal_length(p);
  const double theta0 = optimal_temperature(p, 0.0, L);
  const int n = 97;
  for (int i = 1; i < n; ++i) {
    const double dx = L / n;
    const double d2 = optimal_temperature(p, (i - 1) * dx, L) - 2.0 * optimal_temperature(p, i * dx, L) +
                      optimal_temperature(p, std::min((i + 1) * dx, L), L);
    EXPECT_LE(std::abs(d2), 1e-12 * theta0);
  }
}

TEST(OptimalCompliance, Values) {
  FinProblem p = reference_problem();
  const double L = optimal_length(p);
  EXPECT_NEAR(optimal_compliance(p, L), 118.56311014966874, 1e-12);
  EXPECT_NEAR(optimal_compliance(p, 0.16869), 118.56, 0.01);
  EXPECT_NEAR(optimal_compliance(p, L), optimal_temperature(p, 0.0, L) * p.q0, 1e-12);
  EXPECT_THROW(optimal_compliance(p, 0.0), DomainError);
  p.q0 = 0.0;
  EXPECT_EQ(optimal_compliance(p, L), 0.0);
}

TEST(ResistanceBreakdown, AnalyticOptimumHasUnitBiot) {
  const OptimalSolution s = optimal_solution(reference_problem());
  const ResistanceBreakdown r = s.resistance();
  EXPECT_EQ(r.biot, 1.0);
  EXPECT_EQ(r.r_fin, r.r_cond + r.r_conv);
  EXPECT_NEAR(r.r_fin, 0.2964077753741719, 1e-15);
  EXPECT_NEAR(r.r_fin, 0.29641, 1e-5);
}

TEST(ResistanceBreakdown, GeneralRouteAgreesWithClosedForm) {
  const FinProblem p = reference_problem();
  const OptimalSolution s = optimal_solution(p);
  const ResistanceBreakdown r = resistance_breakdown(p, s.compliance, s.length);
  EXPECT_NEAR(r.biot, 1.0, 1e-14);
  EXPECT_NEAR(r.r_fin, r.compliance / (p.q0 * p.q0), 0.0);
  EXPECT_NEAR(r.r_conv, 1.0 / (2.0 * p.h * s.length), 0.0);
}

TEST(ResistanceBreakdown, ZeroLoadIsAnError) {
  FinProblem p = reference_problem();
  p.q0 = 0.0;
  EXPECT_THROW(resistance_breakdown(p, 0.0, 0.1), DomainError);
}

TEST(DuffinFlux, ReferenceValueAndUnitRootTemperature) {
  FinProblem p = reference_problem();
  const double q = duffin_equivalent_flux(p);
  EXPECT_NEAR(q, 3.373730661206997, 1e-14);
  EXPECT_NEAR(q, 3.3738, 1e-4);
  EXPECT_NEAR(q, p.h * optimal_length(p), 1e-14 * q);
  p.q0 = q;
  EXPECT_NEAR(optimal_temperature(p, 0.0, optimal_length(p)), 1.0, 1e-14);
}

TEST(AnalyticProperties, RandomProblems) {
  std::mt19937_64 rng(20240607);
  for (int trial = 0; trial < 200; ++trial) {
    const FinProblem p = test::random_problem(rng);
    const OptimalSolution s = optimal_solution(p);
    SCOPED_TRACE(trial);

    EXPECT_EQ(s.thickness(s.length), 0.0);
    EXPECT_EQ(s.temperature(s.length), 0.0);
    EXPECT_EQ(s.resistance().biot, 1.0);
    EXPECT_GT(s.length, 0.0);
    EXPECT_GT(s.root_thickness, 0.0);
    EXPECT_GT(s.root_temp_diff, 0.0);
    EXPECT_GT(s.compliance, 0.0);

    // closed-form area (h/k) L^3 / 3 and exact quadrature both return A
    EXPECT_NEAR(p.h / p.k * s.length * s.length * s.length / 3.0, p.area, 1e-14 * p.area);
    EXPECT_NEAR(test::simpson([&](double x) { return s.thickness(x); }, 0.0, s.length), p.area,
                1e-13 * p.area);

    FinProblem scaled = p;
    scaled.area *= 3.7;
    EXPECT_NEAR(optimal_length(scaled), std::cbrt(3.7) * s.length, 1e-14 * s.length);

    EXPECT_NEAR(s.compliance, s.root_temp_diff * p.q0, 1e-14 * s.compliance);
  }
}
