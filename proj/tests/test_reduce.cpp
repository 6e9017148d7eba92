#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "blochnet/dynamics.hpp"
#include "blochnet/net.hpp"
#include "blochnet/reduce.hpp"
#include "doctest.h"

using namespace blochnet;
using net::Complex;
using reduce::ReductionScheme;

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXcd random_state(std::mt19937& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex{g(rng), g(rng)};
  v.normalize();
  return v;
}

// Shared certificate: exact decoupling, exact target, matched couplings, and a
// dynamical check that the predicted virtual matrix reproduces the evolution.
void expect_exact(const ReductionScheme& sc, net::Gauge gauge = net::Gauge::SingleLink) {
  auto nw = reduce::scheme_network(sc, gauge);
  auto dec = reduce::reduce_network(nw, sc);
  CHECK(dec.residual <= 1e-13);
  CHECK(dec.target_deviation <= 1e-12);
  CHECK(reduce::matching_residual(nw, sc) <= 1e-14);

  int total = 0;
  for (const auto& [label, len] : dec.partition) total += len;
  CHECK(total == nw.size());

  std::mt19937 rng(99);
  for (double tau : {1.7, 5.0})
    CHECK(reduce::virtual_evolution_oracle(nw, sc, random_state(rng, nw.size()), tau) <= 1e-10);
}

}  // namespace

TEST_CASE("star reduction is exact") {
  for (int m : {2, 3, 5}) {
    auto sc = ReductionScheme::star(m, 6, 5);
    expect_exact(sc);
    auto part = reduce::scheme_partition(sc);
    REQUIRE(static_cast<int>(part.size()) == m);
    CHECK(part[0].first == "a");
    CHECK(part[0].second == 11);
    for (int q = 1; q < m; ++q) CHECK(part[q].second == 5);
  }
}

TEST_CASE("star dark rows use the discrete fourier phases") {
  auto sc = ReductionScheme::star(3, 2, 1);
  auto nw = reduce::scheme_network(sc);
  auto su = reduce::build_unitary(sc, nw);
  const double w = 1.0 / std::sqrt(3.0);
  // rows: a1 a2 a3, then the two dark combinations of the three arm sites
  CHECK(std::abs(su.u(3, nw.site_index("B1", 1)) - w * std::exp(Complex{0, -2 * kPi / 3})) <
        1e-14);
  CHECK(std::abs(su.u(3, nw.site_index("B2", 1)) - w * std::exp(Complex{0, -4 * kPi / 3})) <
        1e-14);
  CHECK(std::abs(su.u(4, nw.site_index("B2", 1)) - w * std::exp(Complex{0, -8 * kPi / 3})) <
        1e-14);
}

TEST_CASE("two-arm splitter reduction") {
  for (double theta : {kPi / 6, kPi / 4, kPi / 3}) {
    auto sc = ReductionScheme::y_beam(theta, 6, 5);
    expect_exact(sc);
    auto dec = reduce::reduce_network(reduce::scheme_network(sc), sc);
    CHECK(dec.end_potentials.empty());
  }
}

TEST_CASE("splitter with equal couplings decouples but misses the matching") {
  auto nw = net::build_network({{"A", 6, 1.0}, {"B", 5, 1.0}, {"C", 5, 1.0}},
                               {{{"A", 6}, {"B", 1}, 1.0}, {{"A", 6}, {"C", 1}, 1.0}});
  auto sc = ReductionScheme::y_beam(kPi / 4, 6, 5);
  auto dec = reduce::reduce_network(nw, sc);
  const double r2 = std::sqrt(2.0);
  CHECK(dec.residual <= 1e-13);
  CHECK(dec.target_deviation == doctest::Approx(r2 - 1).epsilon(1e-12));
  CHECK(reduce::matching_residual(nw, sc) == doctest::Approx(r2 - 1).epsilon(1e-12));

  // the oracle evolves under the ideal target, so the mismatch must show up
  std::mt19937 rng(3);
  CHECK(reduce::virtual_evolution_oracle(nw, sc, random_state(rng, nw.size()), 4.0) > 1e-3);
}

TEST_CASE("splitter matched off the symmetric point") {
  auto nw = net::build_network({{"A", 6, 1.0}, {"B", 5, 1.0}, {"C", 5, 1.0}},
                               {{{"A", 6}, {"B", 1}, 0.6}, {{"A", 6}, {"C", 1}, 0.8}});
  auto sc = ReductionScheme::y_beam(std::atan2(0.8, 0.6), 6, 5);
  auto dec = reduce::reduce_network(nw, sc);
  CHECK(dec.residual <= 1e-13);
  CHECK(dec.target_deviation <= 1e-12);
  CHECK(reduce::matching_residual(nw, sc) <= 1e-14);
}

TEST_CASE("half-quantum ring reduction") {
  for (int n : {0, 1}) {
    auto sc = ReductionScheme::q_half_flux(n, 6, 5);
    expect_exact(sc);
    auto dec = reduce::reduce_network(reduce::scheme_network(sc), sc);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    REQUIRE(dec.end_potentials.size() == 2);
    CHECK(dec.end_potentials[0].first == 10);  // last a site
    CHECK(dec.end_potentials[0].second == doctest::Approx(-sign).epsilon(1e-12));
    CHECK(dec.end_potentials[1].first == 15);  // last b site
    CHECK(dec.end_potentials[1].second == doctest::Approx(+sign).epsilon(1e-12));
  }
}

TEST_CASE("quarter-quantum ring folds into one chain") {
  for (int n : {0, 1, -1}) {
    for (double theta : {kPi / 6, kPi / 4}) {
      auto sc = ReductionScheme::q_quarter_flux(n, theta, 6, 5);
      expect_exact(sc);
      auto part = reduce::scheme_partition(sc);
      REQUIRE(part.size() == 1);
      CHECK(part[0].second == 16);
      auto dec = reduce::reduce_network(reduce::scheme_network(sc), sc);
      CHECK(dec.end_potentials.empty());
    }
  }
}

TEST_CASE("general-flux ring reduction") {
  for (double Phi : {0.0, kPi / 4, kPi / 2, kPi}) {
    auto sc = ReductionScheme::q_film(Phi, 6, 5);
    expect_exact(sc);
    auto dec = reduce::reduce_network(reduce::scheme_network(sc), sc);
    // bridge between the two virtual chain ends, plus opposite end shifts
    CHECK(std::abs(dec.virtual_h(10, 15) - Complex{-std::sin(Phi), 0}) < 1e-13);
    CHECK(std::abs(dec.virtual_h(10, 10) - Complex{-std::cos(Phi), 0}) < 1e-13);
    CHECK(std::abs(dec.virtual_h(15, 15) - Complex{+std::cos(Phi), 0}) < 1e-13);
  }
}

TEST_CASE("general-flux ring certificate is gauge independent") {
  auto sc = ReductionScheme::q_film(1.1, 6, 5);
  for (auto gauge : {net::Gauge::SingleLink, net::Gauge::Uniform}) {
    auto dec = reduce::reduce_network(reduce::scheme_network(sc, gauge), sc);
    CHECK(dec.target_deviation <= 1e-13);
  }
}

TEST_CASE("film reduction is a single homogeneous chain") {
  for (double Phi : {0.0, 0.3, kPi / 2, 2.5}) {
    auto sc = ReductionScheme::film(Phi, 5);
    expect_exact(sc);
    auto dec = reduce::reduce_network(reduce::scheme_network(sc), sc);
    CHECK(dec.end_potentials.empty());
    auto part = reduce::scheme_partition(sc);
    REQUIRE(part.size() == 1);
    CHECK(part[0].second == 10);
  }
}

TEST_CASE("interferometer reductions") {
  for (double theta : {kPi / 6, kPi / 4, kPi / 3}) {
    SUBCASE("half-quantum flux") {
      auto sc = ReductionScheme::iferom_half(theta, 6, 5, 4);
      expect_exact(sc);
      auto nw = reduce::scheme_network(sc);
      auto su = reduce::build_unitary(sc, nw);
      CHECK(su.labels[6 + 5].block == "b");
      CHECK(su.labels[6 + 5].index == 1);
      CHECK(su.labels.back().block == "b");
      CHECK(su.labels.back().index == 9);
    }
    SUBCASE("integer flux") {
      auto sc = ReductionScheme::iferom_int(theta, 6, 5, 4);
      expect_exact(sc);
      auto part = reduce::scheme_partition(sc);
      CHECK(part[0].second == 15);
      CHECK(part[1].second == 5);
    }
  }
}

TEST_CASE("balanced interferometer at arbitrary flux") {
  for (double Phi : {0.0, kPi / 3, kPi}) {
    auto sc = ReductionScheme::iferom_equal(Phi, 6, 5, 4);
    expect_exact(sc);
    auto dec = reduce::reduce_network(reduce::scheme_network(sc), sc);
    const Complex e = std::exp(Complex{0, -Phi / 2});
    const Complex va = -e * std::cos(Phi / 2);
    const Complex vb = Complex{0, -1} * e * std::sin(Phi / 2);
    CHECK(std::abs(dec.virtual_h(10, 16) - va) < 1e-13);
    CHECK(std::abs(dec.virtual_h(15, 16) - vb) < 1e-13);
    size_t expected = (std::abs(va) > 1e-15 ? 1u : 0u) + (std::abs(vb) > 1e-15 ? 1u : 0u);
    CHECK(dec.declared_bonds.size() == expected);
  }
}

TEST_CASE("complex-coupling splitter reduction") {
  for (double Phi : {0.0, kPi / 5, kPi / 2, kPi}) {
    auto sc = ReductionScheme::y_complex(Phi, 6, 5);
    expect_exact(sc);
  }
}

TEST_CASE("oracle rejects a network the scheme cannot decouple") {
  auto sc = ReductionScheme::q_film(0.7, 6, 5);
  auto wrong_flux = reduce::scheme_network(sc, net::Gauge::SingleLink, 0.2);
  std::mt19937 rng(5);
  CHECK_THROWS_AS(
      reduce::virtual_evolution_oracle(wrong_flux, sc, random_state(rng, wrong_flux.size()), 2.0),
      std::invalid_argument);
}

TEST_CASE("layout mismatches are rejected") {
  auto star_net = reduce::scheme_network(ReductionScheme::star(3, 6, 5));
  CHECK_THROWS_AS(reduce::reduce_network(star_net, ReductionScheme::y_beam(kPi / 4, 6, 5)),
                  std::invalid_argument);

  auto extra = net::build_network(
      {{"A", 6, 1.0}, {"B", 5, 1.0}, {"C", 5, 1.0}, {"X", 2, 1.0}},
      {{{"A", 6}, {"B", 1}, 0.7}, {{"A", 6}, {"C", 1}, 0.7}, {{"A", 1}, {"X", 1}, 0.5}});
  CHECK_THROWS_AS(reduce::build_unitary(ReductionScheme::y_beam(kPi / 4, 6, 5), extra),
                  std::invalid_argument);

  auto short_arm = net::build_network({{"A", 6, 1.0}, {"B", 4, 1.0}, {"C", 5, 1.0}},
                                      {{{"A", 6}, {"B", 1}, 0.7}, {{"A", 6}, {"C", 1}, 0.7}});
  CHECK_THROWS_AS(reduce::build_unitary(ReductionScheme::y_beam(kPi / 4, 6, 5), short_arm),
                  std::invalid_argument);
}

TEST_CASE("scheme factories validate their arguments") {
  CHECK_THROWS_AS(ReductionScheme::star(1, 6, 5), std::invalid_argument);
  CHECK_THROWS_AS(ReductionScheme::star(3, 0, 5), std::invalid_argument);
  CHECK_THROWS_AS(ReductionScheme::y_beam(std::nan(""), 6, 5), std::invalid_argument);
  CHECK_THROWS_AS(ReductionScheme::film(0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(ReductionScheme::q_film(0.5, 6, 0), std::invalid_argument);
  CHECK_THROWS_AS(ReductionScheme::iferom_equal(0.5, 6, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(ReductionScheme::y_complex(0.5, 0, 5), std::invalid_argument);
}

TEST_CASE("coupling residual checks its partition") {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4, 4);
  h(0, 3) = Complex{0.25, 0};
  h(3, 0) = Complex{0.25, 0};
  CHECK(reduce::coupling_residual(h, {{"a", 2}, {"b", 2}}) == doctest::Approx(0.25));
  CHECK(reduce::coupling_residual(h, {{"a", 4}}) == 0.0);
  CHECK_THROWS_AS(reduce::coupling_residual(h, {{"a", 3}}), std::invalid_argument);
  CHECK_THROWS_AS(reduce::coupling_residual(h, {{"a", 4}, {"b", 0}}), std::invalid_argument);
}

TEST_CASE("conjugate rejects a non-unitary basis change") {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  h(0, 1) = Complex{-1, 0};
  h(1, 0) = Complex{-1, 0};
  reduce::SiteUnitary bad;
  bad.u = Eigen::MatrixXcd::Zero(2, 2);
  bad.u(0, 0) = 1.0;
  bad.u(1, 1) = 0.5;
  bad.labels = {{"a", 1}, {"a", 2}};
  CHECK_THROWS_AS(reduce::conjugate(h, bad), std::runtime_error);
}
