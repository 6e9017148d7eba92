#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "blochnet/dynamics.hpp"
#include "blochnet/net.hpp"
#include "doctest.h"

using namespace blochnet;
using net::Complex;

namespace {

constexpr double kPi = 3.14159265358979323846;

net::Network ring(int n, double phi = 0, net::Gauge gauge = net::Gauge::SingleLink) {
  auto nw = net::build_network({{"A", n, 1.0}}, {{{"A", n}, {"A", 1}, 1.0}});
  std::vector<net::DirectedLink> loop;
  for (int j = 1; j < n; ++j) loop.push_back({nw.site_index("A", j), nw.site_index("A", j + 1)});
  loop.push_back({nw.site_index("A", n), nw.site_index("A", 1)});
  return net::thread_loop_flux(nw, loop, phi, gauge);
}

std::vector<double> sorted_eigs(const net::Network& nw) {
  auto spec = dynamics::eigendecompose(net::hamiltonian(nw));
  std::vector<double> e(spec.eigenvalues.data(), spec.eigenvalues.data() + spec.size());
  std::sort(e.begin(), e.end());
  return e;
}

// Closed-form ring dispersion: eigenvalues -2 cos(2 pi (m + phi)/n).
std::vector<double> ring_eigs(int n, double phi) {
  std::vector<double> e;
  for (int m = 0; m < n; ++m) e.push_back(-2.0 * std::cos(2.0 * kPi * (m + phi) / n));
  std::sort(e.begin(), e.end());
  return e;
}

}  // namespace

TEST_CASE("two-site chain matrix") {
  auto nw = net::build_network({{"A", 2, 1.0}}, {});
  auto h = nw.matrix();
  CHECK(h.rows() == 2);
  CHECK(h(0, 0) == Complex{0, 0});
  CHECK(h(1, 1) == Complex{0, 0});
  CHECK(h(0, 1) == Complex{-1, 0});
  CHECK(h(1, 0) == Complex{-1, 0});
}

TEST_CASE("three-site chain eigenvalues") {
  auto e = sorted_eigs(net::build_network({{"A", 3, 1.0}}, {}));
  const double r2 = std::sqrt(2.0);
  CHECK(e[0] == doctest::Approx(-r2).epsilon(1e-12));
  CHECK(e[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e[2] == doctest::Approx(r2).epsilon(1e-12));
}

TEST_CASE("four-site ring eigenvalues") {
  auto e = sorted_eigs(ring(4));
  CHECK(e[0] == doctest::Approx(-2.0));
  CHECK(e[1] == doctest::Approx(0.0));
  CHECK(e[2] == doctest::Approx(0.0));
  CHECK(e[3] == doctest::Approx(2.0));
}

TEST_CASE("ring dispersion under flux") {
  for (double phi : {0.0, 0.25, 0.37, 0.5}) {
    auto e = sorted_eigs(ring(6, phi));
    auto want = ring_eigs(6, phi);
    for (int m = 0; m < 6; ++m) CHECK(e[m] == doctest::Approx(want[m]).epsilon(1e-12));
  }
}

TEST_CASE("gauge choice leaves the spectrum alone") {
  for (double phi : {0.0, 0.25, 0.37, 0.5}) {
    auto single = sorted_eigs(ring(7, phi, net::Gauge::SingleLink));
    auto uniform = sorted_eigs(ring(7, phi, net::Gauge::Uniform));
    for (size_t i = 0; i < single.size(); ++i)
      CHECK(std::abs(single[i] - uniform[i]) < 1e-12);
  }
}

TEST_CASE("threading flux preserves bond moduli") {
  auto bare = ring(8);
  auto fluxed = ring(8, 0.37);
  auto h0 = bare.matrix();
  auto h1 = fluxed.matrix();
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v)
      CHECK(std::abs(std::abs(h0(u, v)) - std::abs(h1(u, v))) < 1e-14);
}

TEST_CASE("flux is periodic with period one") {
  for (double phi : {0.1, 0.37}) {
    auto a = sorted_eigs(ring(9, phi));
    auto b = sorted_eigs(ring(9, phi + 1.0));
    for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
  }
}

TEST_CASE("single-link gauge puts the whole phase on one link") {
  auto nw = ring(5, 0.3, net::Gauge::SingleLink);
  int phased = 0;
  double sum = 0;
  for (const auto& b : nw.bonds()) {
    if (std::abs(b.phase) > 1e-15) {
      ++phased;
      sum = b.phase;
    }
  }
  CHECK(phased == 1);
  CHECK(sum == doctest::Approx(2 * kPi * 0.3).epsilon(1e-12));
}

TEST_CASE("uniform gauge spreads the phase evenly") {
  auto nw = ring(5, 0.3, net::Gauge::Uniform);
  for (const auto& b : nw.bonds()) CHECK(std::abs(std::abs(b.phase) - 2 * kPi * 0.3 / 5) < 1e-12);
}

TEST_CASE("hermiticity of assembled matrices") {
  auto nw = net::build_network(
      {{"A", 4, 1.0}, {"B", 3, 0.7}, {"C", 2, 1.3}},
      {{{"A", 4}, {"B", 1}, Complex{0.5, 0.25}}, {{"B", 3}, {"C", 1}, Complex{0, -0.8}}});
  auto h = nw.matrix();
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14 * h.cwiseAbs().maxCoeff());
  CHECK_NOTHROW(net::hamiltonian(nw));
}

TEST_CASE("film network entries") {
  SUBCASE("Phi = pi/2 gives a clean bridge") {
    auto h = net::film_network(5, kPi / 2).matrix();
    const int an = 4;
    const int bn = 9;
    CHECK(std::abs(h(an, bn) - Complex{-1, 0}) < 1e-12);
    for (int j = 0; j < 10; ++j) CHECK(std::abs(h(j, j)) < 1e-12);
  }
  SUBCASE("Phi = 0 decouples the chains") {
    auto nw = net::film_network(5, 0.0);
    auto h = nw.matrix();
    CHECK(std::abs(h(4, 9)) == 0.0);
    CHECK(h(4, 4).real() == doctest::Approx(-1.0));
    CHECK(h(9, 9).real() == doctest::Approx(+1.0));
  }
  SUBCASE("complementary moduli") {
    for (double Phi : {0.3, 1.1, 2.0}) {
      auto h = net::film_network(4, Phi).matrix();
      const double bridge = std::abs(h(3, 7));
      const double mu = std::abs(h(3, 3));
      CHECK(bridge * bridge + mu * mu == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(h(3, 3).real() == doctest::Approx(-std::cos(Phi)));
      CHECK(h(7, 7).real() == doctest::Approx(+std::cos(Phi)));
    }
  }
  CHECK_THROWS_AS(net::film_network(1, 0.5), std::invalid_argument);
}

TEST_CASE("site indexing is a bijection") {
  auto nw = net::build_network({{"A", 50, 1.0}, {"B", 3, 1.0}}, {});
  CHECK(nw.site_index("A", 1) == 0);
  CHECK(nw.site_index("B", 1) == 50);
  for (int g = 0; g < nw.size(); ++g) {
    auto ref = nw.site_ref(g);
    CHECK(nw.site_index(ref) == g);
  }
  CHECK_THROWS_AS(nw.site_index("Z", 1), std::invalid_argument);
  CHECK_THROWS_AS(nw.site_index("A", 0), std::invalid_argument);
  CHECK_THROWS_AS(nw.site_index("A", 51), std::invalid_argument);
}

TEST_CASE("construction rejects bad inputs") {
  CHECK_THROWS_AS(net::build_network({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(net::build_network({{"A", 0, 1.0}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(net::build_network({{"A", 2, 0.0}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(net::build_network({{"A", 2, -1.0}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(net::build_network({{"A", 2, 1.0}, {"A", 3, 1.0}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(net::build_network({{"A", 2, 1.0}}, {{{"A", 1}, {"B", 1}, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(net::build_network({{"A", 2, 1.0}}, {{{"A", 1}, {"A", 5}, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(net::build_network({{"A", 3, 1.0}}, {{{"A", 1}, {"A", 3}, 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(net::build_network({{"A", 2, 1.0}, {"B", 2, 1.0}},
                                     {{{"A", 2}, {"B", 1}, 1.0}, {{"B", 1}, {"A", 2}, 0.5}}),
                  std::invalid_argument);
  // joint duplicating an intra-chain bond
  CHECK_THROWS_AS(net::build_network({{"A", 3, 1.0}}, {{{"A", 1}, {"A", 2}, 0.5}}),
                  std::invalid_argument);
}

TEST_CASE("loop threading rejects bad loops") {
  auto nw = ring(4);
  std::vector<net::DirectedLink> open{{0, 1}, {1, 2}};
  CHECK_THROWS_AS(net::thread_loop_flux(nw, open, 0.3), std::invalid_argument);
  std::vector<net::DirectedLink> absent{{0, 2}, {2, 0}, {0, 2}};
  CHECK_THROWS_AS(net::thread_loop_flux(nw, absent, 0.3), std::invalid_argument);
  std::vector<net::DirectedLink> notclosed{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 1}};
  CHECK_THROWS_AS(net::thread_loop_flux(nw, notclosed, 0.3), std::invalid_argument);
}

TEST_CASE("q-ring with zero flux is real") {
  auto nw = net::build_network({{"A", 3, 1.0}, {"B", 2, 1.0}, {"C", 2, 1.0}},
                               {{{"A", 3}, {"B", 1}, 0.7},
                                {{"A", 3}, {"C", 1}, 0.7},
                                {{"B", 2}, {"C", 2}, 1.0}});
  auto h = nw.matrix();
  CHECK(h.imag().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hermitian matrix wrapper validates") {
  Eigen::MatrixXcd bad(2, 2);
  bad << Complex{0, 0}, Complex{1, 0}, Complex{0.5, 0}, Complex{0, 0};
  CHECK_THROWS_AS(net::HermitianMatrix{bad}, std::runtime_error);
  Eigen::MatrixXcd rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(net::HermitianMatrix{rect}, std::invalid_argument);
}
