#include <cmath>
#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "vdelta/errors.hpp"
#include "vdelta/potentials.hpp"

using namespace vdelta;

namespace {

MassVector mv(std::vector<double> w) { return MassVector(std::move(w)); }

double residual(const MassVector& w, const ToleranceBand& band, double tau) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    s += std::min(std::max(w[j] / tau, band.lower()[j]), band.upper()[j]);
  }
  return s - 1.0;
}

}  // namespace

TEST_CASE("kl_divergence closed forms") {
  const std::vector<double> p{0.2, 0.3, 0.5};
  CHECK(kl_divergence(p, p) == 0.0);
  const std::vector<double> point{1.0, 0.0};
  const std::vector<double> half{0.5, 0.5};
  CHECK(kl_divergence(point, half) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK_THROWS_AS(kl_divergence(point, p), DimensionError);
}

TEST_CASE("kl_divergence agrees with long double summation") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = testing::random_simplex(rng, 8);
    const auto q = testing::random_simplex(rng, 8);
    CHECK(std::abs(kl_divergence(p, q) - static_cast<double>(testing::kl_long(p, q))) < 1e-12);
    CHECK(kl_divergence(p, q) >= -1e-12);
  }
}

TEST_CASE("potential_v examples") {
  SUBCASE("block-constant image has V = 0") {
    Grid raw(8, 8);
    for (std::size_t x = 0; x < 8; ++x) {
      for (std::size_t y = 0; y < 8; ++y) raw(x, y) = 1.0 + static_cast<double>(x / 4 + 2 * (y / 4));
    }
    CHECK(std::abs(potential_v(normalize(raw), make_partition(8, 8, 2, 2))) < 1e-15);
  }
  SUBCASE("point mass in one 2x2 block is ln 4") {
    Grid g(2, 2, 0.0);
    g(1, 0) = 1.0;
    CHECK(potential_v(g, make_partition(2, 2, 1, 1)) ==
          doctest::Approx(1.3862943611198906).epsilon(1e-15));
  }
  SUBCASE("random 8x8 grid matches a direct double loop") {
    std::mt19937_64 rng(4);
    const BlockPartition part = make_partition(8, 8, 2, 2);
    for (int trial = 0; trial < 20; ++trial) {
      const PmfGrid p = testing::random_pmf(rng, 8, 8);
      // sum_x p(x) log(p(x) |X_b| / w_b), block index from coordinates.
      long double w[4] = {0, 0, 0, 0};
      for (std::size_t x = 0; x < 8; ++x) {
        for (std::size_t y = 0; y < 8; ++y) w[(x / 4) * 2 + y / 4] += p(x, y);
      }
      long double direct = 0.0L;
      for (std::size_t x = 0; x < 8; ++x) {
        for (std::size_t y = 0; y < 8; ++y) {
          const long double v = p(x, y);
          direct += v * std::log(v * 16.0L / w[(x / 4) * 2 + y / 4]);
        }
      }
      CHECK(std::abs(potential_v(p, part) - static_cast<double>(direct)) < 1e-12);
    }
  }
}

TEST_CASE("zero-mass blocks contribute nothing to V") {
  Grid g(4, 4, 0.0);
  g(0, 0) = 0.5;
  g(0, 1) = 0.5;
  const BlockPartition part = make_partition(4, 4, 2, 2);
  const auto d = block_uniform_divergences(g, part);
  CHECK(d[1] == 0.0);
  CHECK(d[3] == 0.0);
  CHECK(potential_v(g, part) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("ToleranceBand construction") {
  const ToleranceBand band(mv({0.05, 0.95}), 0.1);
  CHECK(band.lower()[0] == 0.0);
  CHECK(band.upper()[1] == 1.0);
  CHECK(band.lower()[1] == doctest::Approx(0.85));

  CHECK_THROWS_AS(ToleranceBand(mv({0.3, 0.3}), 0.05), InfeasibleBand);
  CHECK_THROWS_AS(ToleranceBand(mv({0.7, 0.7}), 0.05), InfeasibleBand);
  CHECK_THROWS_AS(ToleranceBand(mv({0.5, 0.5}), -0.1), std::invalid_argument);
  CHECK_NOTHROW(ToleranceBand(mv({0.25, 0.25, 0.5}), 0.0));
}

TEST_CASE("solve_w_star examples") {
  SUBCASE("interior point is a fixed point") {
    const MassVector w = mv({0.3, 0.25, 0.45});
    const ToleranceBand band(mv({1.0 / 3, 1.0 / 3, 1.0 / 3}), 0.2);
    const WStarSolution s = solve_w_star(w, band);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(s.w_star[j] - w[j]) < 1e-12);
    CHECK(std::abs(s.tau_star - 1.0) < 1e-12);
    CHECK(std::abs(coarse_divergence(w, s.w_star)) < 1e-12);
  }
  SUBCASE("m = 2, both coordinates clip") {
    // Grid-search oracle (step 1e-6 over v in [0.4, 0.6]) gives (0.6, 0.4).
    const WStarSolution s = solve_w_star(mv({0.7, 0.3}), ToleranceBand(mv({0.5, 0.5}), 0.1));
    CHECK(s.w_star[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(s.w_star[1] == doctest::Approx(0.4).epsilon(1e-12));
    const auto oracle = testing::grid_search_projection({0.7, 0.3}, {0.5, 0.5}, 0.1, 1e-6);
    CHECK(std::abs(oracle[0] - s.w_star[0]) < 2e-6);
  }
  SUBCASE("m = 3 against grid search") {
    // Oracle at step 1e-4: (0.383333, 0.333333, 0.283333).
    const std::vector<double> w{0.5, 0.3, 0.2};
    const std::vector<double> ref{1.0 / 3, 1.0 / 3, 1.0 / 3};
    const WStarSolution s = solve_w_star(mv(w), ToleranceBand(mv(ref), 0.05));
    const std::vector<double> frozen{0.3833333333333, 0.3333333333333, 0.2833333333333};
    const auto oracle = testing::grid_search_projection(w, ref, 0.05, 1e-4);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(s.w_star[j] - frozen[j]) < 2e-4);
      CHECK(std::abs(s.w_star[j] - oracle[j]) < 2e-4);
    }
    CHECK(s.tau_star == doctest::Approx(0.9).epsilon(1e-9));
  }
}

TEST_CASE("solve_w_star validates inputs") {
  CHECK_THROWS_AS(solve_w_star(mv({0.5, 0.5}), ToleranceBand(mv({0.2, 0.3, 0.5}), 0.1)),
                  DimensionError);
  // Positive mass only where the band cannot absorb it: no scaling reaches sum 1.
  const ToleranceBand band(mv({0.2, 0.4, 0.4}), 0.05);
  CHECK_THROWS_AS(solve_w_star(mv({1.0, 0.0, 0.0}), band), SolverFailure);
}

TEST_CASE("solve_w_star recovers tiny masses by widening the bracket") {
  // w_j / 1e-6 stays below b_j, so the initial lower endpoint has the wrong sign.
  const MassVector w = mv({1e-9, 2e-9, 1.0 - 3e-9});
  const ToleranceBand band(mv({0.3, 0.3, 0.4}), 0.35);
  const WStarSolution s = solve_w_star(w, band);
  CHECK(std::abs(s.w_star.total() - 1.0) < 1e-10);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(s.w_star[j] >= band.lower()[j]);
    CHECK(s.w_star[j] <= band.upper()[j]);
  }
}

TEST_CASE("solve_w_star invariants over random feasible triples") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> delta_dist(0.001, 0.3);
  std::uniform_int_distribution<std::size_t> m_dist(2, 20);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = m_dist(rng);
    const MassVector w = mv(testing::random_simplex(rng, m));
    const ToleranceBand band(mv(testing::random_simplex(rng, m)), delta_dist(rng));
    const WStarSolution s = solve_w_star(w, band);
    CHECK(s.tau_star > 0.0);
    CHECK(std::abs(s.w_star.total() - 1.0) < 1e-8);
    CHECK(std::abs(residual(w, band, s.tau_star)) < 1e-10);
    for (std::size_t j = 0; j < m; ++j) {
      CHECK(s.w_star[j] >= band.lower()[j]);
      CHECK(s.w_star[j] <= band.upper()[j]);
    }
    // Residual is nonincreasing in tau.
    double previous = residual(w, band, 1e-3);
    for (double tau = 1e-3; tau < 1e3; tau *= 1.3) {
      const double r = residual(w, band, tau);
      CHECK(r <= previous + 1e-15);
      previous = r;
    }
  }
}

TEST_CASE("solve_w_star minimizes the coarse divergence for m = 2 and 3") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> delta_dist(0.01, 0.08);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = trial % 2 == 0 ? 2 : 3;
    const auto w = testing::random_simplex(rng, m);
    const auto ref = testing::random_simplex(rng, m);
    const double delta = delta_dist(rng);
    const WStarSolution s = solve_w_star(mv(w), ToleranceBand(mv(ref), delta));
    const auto oracle = testing::grid_search_projection(w, ref, delta, m == 2 ? 1e-6 : 1e-4);
    REQUIRE(oracle.size() == m);
    for (std::size_t j = 0; j < m; ++j) CHECK(std::abs(s.w_star[j] - oracle[j]) < 2e-4);
  }
}

TEST_CASE("potential_v_delta examples") {
  const BlockPartition part = make_partition(2, 1, 2, 1);
  auto two_pixel = [](double a, double b) { return normalize(Grid(2, 1, std::vector<double>{a, b})); };

  SUBCASE("masses inside the band give zero") {
    CHECK(std::abs(potential_v_delta(two_pixel(0.55, 0.45), part, ToleranceBand(mv({0.5, 0.5}), 0.1))) <
          1e-12);
  }
  SUBCASE("m = 2 with w = (0.9, 0.1), delta = 0.3") {
    // Oracle: grid search puts w* at (0.8, 0.2); value 0.9 ln(9/8) + 0.1 ln(1/2).
    const double v = potential_v_delta(two_pixel(0.9, 0.1), part, ToleranceBand(mv({0.5, 0.5}), 0.3));
    CHECK(v == doctest::Approx(0.036690014034750584).epsilon(1e-10));
    const auto oracle = testing::grid_search_projection({0.9, 0.1}, {0.5, 0.5}, 0.3, 1e-6);
    const double oracle_value = static_cast<double>(testing::kl_long({0.9, 0.1}, oracle));
    CHECK(std::abs(v - oracle_value) < 1e-9);
    CHECK(v <= oracle_value + 1e-12);
  }
}

TEST_CASE("V_delta vanishes once delta covers every deviation") {
  std::mt19937_64 rng(17);
  const BlockPartition part = make_partition(8, 8, 2, 4);
  for (int trial = 0; trial < 50; ++trial) {
    const PmfGrid p = testing::random_pmf(rng, 8, 8);
    const MassVector ref = mv(testing::random_simplex(rng, 8));
    const MassVector w = block_masses(p, part);
    double max_dev = 0.0;
    for (std::size_t j = 0; j < 8; ++j) max_dev = std::max(max_dev, std::abs(w[j] - ref[j]));
    CHECK(std::abs(potential_v_delta(p, part, ToleranceBand(ref, max_dev))) < 1e-12);
  }
}

TEST_CASE("e_block examples") {
  const BlockPartition part = make_partition(2, 1, 2, 1);
  const Grid g(2, 1, std::vector<double>{0.6, 0.4});
  CHECK(e_block(g, part, mv({0.6, 0.4})) == 0.0);
  CHECK(e_block(g, part, mv({0.5, 0.5})) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK_THROWS_AS(e_block(g, part, mv({1.0})), DimensionError);

  std::mt19937_64 rng(2);
  const BlockPartition p4 = make_partition(8, 8, 2, 2);
  const PmfGrid p = testing::random_pmf(rng, 8, 8);
  const std::vector<double> ref{0.1, 0.2, 0.3, 0.4};
  long double direct = 0.0L;
  for (std::size_t j = 0; j < 4; ++j) {
    long double w = 0.0L;
    for (std::size_t x = 0; x < 8; ++x) {
      for (std::size_t y = 0; y < 8; ++y) {
        if ((x / 4) * 2 + y / 4 == j) w += p(x, y);
      }
    }
    direct += std::abs(w - ref[j]);
  }
  CHECK(std::abs(e_block(p, p4, mv(ref)) - static_cast<double>(direct)) < 1e-14);
}

TEST_CASE("e_pix examples") {
  const Grid a(1, 2, std::vector<double>{1.0, 0.0});
  const Grid b(1, 2, std::vector<double>{0.0, 1.0});
  CHECK(e_pix(a, a) == 0.0);
  CHECK(e_pix(a, b) == 1.0);
  CHECK_THROWS_AS(e_pix(a, Grid(2, 1)), DimensionError);

  std::mt19937_64 rng(6);
  const Grid p = testing::random_grid(rng, 5, 7);
  const Grid q = testing::random_grid(rng, 5, 7);
  long double s = 0.0L;
  for (std::size_t x = 0; x < 5; ++x) {
    for (std::size_t y = 0; y < 7; ++y) {
      const long double d = static_cast<long double>(p(x, y)) - q(x, y);
      s += d * d;
    }
  }
  CHECK(std::abs(e_pix(p, q) - static_cast<double>(s / 35.0L)) < 1e-15);
}

TEST_CASE("potentials are nonnegative on random inputs") {
  std::mt19937_64 rng(31);
  const BlockPartition part = make_partition(12, 12, 3, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const PmfGrid p = testing::random_pmf(rng, 12, 12);
    const PmfGrid q = testing::random_pmf(rng, 12, 12);
    const MassVector ref = block_masses(q, part);
    CHECK(potential_v(p, part) >= -1e-10);
    CHECK(potential_v_delta(p, part, ToleranceBand(ref, 0.005)) >= -1e-10);
    CHECK(e_block(p, part, ref) >= 0.0);
    CHECK(e_pix(p, q) >= 0.0);
  }
}
