#include <cmath>
#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "vdelta/errors.hpp"
#include "vdelta/projection.hpp"

using namespace vdelta;

namespace {

double max_abs_diff(const Grid& a, const Grid& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  }
  return m;
}

}  // namespace

TEST_CASE("projection is the identity inside the band") {
  std::mt19937_64 rng(1);
  const BlockPartition part = make_partition(8, 8, 2, 2);
  const PmfGrid p = testing::random_pmf(rng, 8, 8);
  const ToleranceBand band(block_masses(p, part), 0.02);
  CHECK(is_in_band(p, part, band));
  CHECK(max_abs_diff(project(p, part, band), p) < 1e-12);
}

TEST_CASE("projection of point masses per block moves only block weights") {
  // Two 2x2 blocks side by side, each a point mass, w = (0.7, 0.3).
  Grid raw(2, 4, 0.0);
  raw(0, 1) = 0.7;
  raw(1, 2) = 0.3;
  const PmfGrid p = normalize(raw);
  const BlockPartition part = make_partition(2, 4, 1, 2);
  const ToleranceBand band(MassVector({0.5, 0.5}), 0.1);
  const PmfGrid out = project(p, part, band);
  const MassVector w = block_masses(out, part);
  CHECK(w[0] == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(w[1] == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(out(0, 1) == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(out(1, 2) == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(out(0, 0) < 1e-11);
  CHECK(out(1, 3) < 1e-11);
}

TEST_CASE("KL to the projection equals V_delta") {
  std::mt19937_64 rng(12);
  const BlockPartition part = make_partition(8, 8, 2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const PmfGrid p = testing::random_pmf(rng, 8, 8);
    const ToleranceBand band(MassVector(testing::random_simplex(rng, 4)), 0.03);
    const PmfGrid q = project(p, part, band);
    const double lhs = kl_divergence(p.values(), q.values());
    CHECK(std::abs(lhs - potential_v_delta(p, part, band)) < 1e-9);
  }
}

TEST_CASE("projected output block masses equal w_star") {
  std::mt19937_64 rng(13);
  const BlockPartition part = make_partition(12, 12, 3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const PmfGrid p = testing::random_pmf(rng, 12, 12);
    const ToleranceBand band(MassVector(testing::random_simplex(rng, 9)), 0.01);
    const WStarSolution s = solve_w_star(block_masses(p, part), band);
    const MassVector w = block_masses(project(p, part, band), part);
    for (std::size_t j = 0; j < 9; ++j) CHECK(std::abs(w[j] - s.w_star[j]) < 1e-9);
  }
}

TEST_CASE("projection algebra on random grids") {
  std::mt19937_64 rng(14);
  const BlockPartition part = make_partition(16, 16, 4, 4);
  for (int trial = 0; trial < 300; ++trial) {
    const PmfGrid p = testing::random_pmf(rng, 16, 16);
    const ToleranceBand band(MassVector(testing::random_simplex(rng, 16)), 0.005);
    const PmfGrid q = project(p, part, band);

    CHECK(is_in_band(q, part, band));
    CHECK(max_abs_diff(project(q, part, band), q) < 1e-10);
    CHECK(potential_v_delta(q, part, band) <= 1e-9);

    const auto dp = block_uniform_divergences(p, part);
    const auto dq = block_uniform_divergences(q, part);
    for (std::size_t j = 0; j < part.block_count(); ++j) {
      CHECK(std::abs(dp[j] - dq[j]) < 1e-9);
      CHECK(max_abs_diff(block_conditional(p, part, j), block_conditional(q, part, j)) < 1e-12);
    }
  }
}

TEST_CASE("is_in_band detects a perturbed block") {
  std::mt19937_64 rng(15);
  const BlockPartition part = make_partition(4, 4, 2, 2);
  const PmfGrid q = testing::random_pmf(rng, 4, 4);
  const double delta = 0.01;
  const ToleranceBand band(block_masses(q, part), delta);
  CHECK(is_in_band(q, part, band));

  // Shift 2 delta of mass from block 0 into block 3.
  Grid moved = q.grid();
  const MassVector w = block_masses(q, part);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 2; ++y) moved(x, y) *= (w[0] - 2 * delta) / w[0];
  }
  for (std::size_t x = 2; x < 4; ++x) {
    for (std::size_t y = 2; y < 4; ++y) moved(x, y) *= (w[3] + 2 * delta) / w[3];
  }
  CHECK_FALSE(is_in_band(moved, part, band));
  CHECK_THROWS_AS(is_in_band(Grid(2, 2), part, band), DimensionError);
}

TEST_CASE("projection with a zero-mass block") {
  // Block 1 carries no mass beyond the floor; the band asks for some there.
  Grid raw(2, 2, 0.0);
  raw(0, 0) = 1.0;
  raw(1, 0) = 1.0;
  const PmfGrid p = normalize(raw);
  const BlockPartition part = make_partition(2, 2, 1, 2);
  const ToleranceBand band(MassVector({0.9, 0.1}), 0.05);
  const PmfGrid q = project(p, part, band);
  const MassVector w = block_masses(q, part);
  CHECK(std::abs(q.grid().total() - 1.0) < 1e-12);
  CHECK(w[0] >= 0.85 - 1e-6);
  CHECK(w[0] <= 0.95 + 1e-6);
}

TEST_CASE("projection propagates infeasible bands") {
  CHECK_THROWS_AS(ToleranceBand(MassVector({0.2, 0.2}), 0.01), InfeasibleBand);
}
