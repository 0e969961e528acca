#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "finopt/tridiagonal.hpp"
#include "oracles.hpp"

using namespace finopt;

namespace {

ChainMatrix random_chain(std::mt19937_64& rng, std::size_t n, double spread) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> coupling(n - 1), shunt(n);
  for (double& c : coupling) c = std::pow(10.0, spread * u(rng));
  for (double& s : shunt) s = std::pow(10.0, -spread * u(rng));
  return ChainMatrix(coupling, shunt);
}

std::vector<std::vector<double>> dense(const ChainMatrix& m) {
  std::vector<std::vector<double>> a(m.size(), std::vector<double>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) a[i][j] = m.entry(i, j);
  return a;
}

}  // namespace

TEST(ChainMatrix, AssembledEntriesAreSymmetric) {
  std::mt19937_64 rng(1);
  const ChainMatrix m = random_chain(rng, 12, 3.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) EXPECT_EQ(m.entry(i, j), m.entry(j, i));
  EXPECT_EQ(m.entry(0, 5), 0.0);
}

TEST(ChainMatrix, MatchesDenseEliminationOnRandomSystems) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + trial % 30;
    const ChainMatrix m = random_chain(rng, n, 2.0);
    std::vector<double> b(n);
    for (double& v : b) v = u(rng);
    const auto x = m.solve(b);
    const auto ref = test::dense_solve(dense(m), b);
    double scale = 0.0;
    for (double v : ref) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], ref[i], 1e-9 * scale);
  }
}

TEST(ChainMatrix, ResidualIsSmallForStiffChains) {
  std::mt19937_64 rng(3);
  const ChainMatrix m = random_chain(rng, 400, 6.0);
  std::vector<double> b(m.size(), 0.0);
  b[0] = 1.0;
  const auto x = m.solve(b);
  for (double v : x) EXPECT_GT(v, 0.0);
  const auto r = m.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i], b[i], 1e-9);
}

TEST(ChainMatrix, SingularAndInvalidInputs) {
  EXPECT_THROW(ChainMatrix({1.0, 1.0}, {0.0, 0.0, 0.0}).solve(std::vector<double>{1.0, 0.0, 0.0}), SolverError);
  EXPECT_THROW(ChainMatrix({1.0, 0.0}, {1.0, 1.0, 1.0}).solve(std::vector<double>{1.0, 0.0, 0.0}), SolverError);
  EXPECT_THROW(ChainMatrix({1.0}, {1.0}), DomainError);
}
