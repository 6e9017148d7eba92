#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "blochnet/dynamics.hpp"
#include "blochnet/net.hpp"

namespace blochnet::observe {

inline constexpr double k_half_pi = 1.5707963267948966;

struct ScanGrid2D {
  std::vector<double> x;  // e.g. t_nB values
  std::vector<double> y;  // e.g. t_nC values
  Eigen::MatrixXd z;      // |y| rows by |x| columns
};

struct FluxResponse {
  std::vector<double> phi;
  std::vector<double> q;
  double alpha = 0;
  int path_length = 0;  // hops from the input site to the detector
};

// Uniform time samples t0, t0+step, ..., up to and including t1 (within eps).
std::vector<double> time_grid(double t0, double t1, double step);

// Simple network builders shared by observables, experiments, and tests.
net::Network y_network(int M, int N, double tnb, double tnc);
net::Network q_network(int M, int N, double tnb, double tnc, double tring, double phi,
                       net::Gauge gauge = net::Gauge::SingleLink);
// A(M) feeding arms B(NB), C(NC) that rejoin into D(L); all four junction
// couplings tj; the arm loop carries flux phi.
net::Network interferometer_network(int M, int NB, int NC, int L, double tj, double phi = 0,
                                    net::Gauge gauge = net::Gauge::SingleLink);

// Probability left on the input chain (its last site, the node, excluded)
// after evolving psi0 for tau.
double reflection_factor(const net::Network& nw, const dynamics::StateVector& psi0, double tau,
                         const std::string& input_chain);

// Reflection factor over a (t_nB, t_nC) grid for the Y geometry A(M), B(N),
// C(N), packet (n0, alpha, k) on A, detection instant tau0.
ScanGrid2D reflection_scan(int M, int N, const std::vector<double>& tnb,
                           const std::vector<double>& tnc, double n0, double alpha, double k,
                           double tau0, int threads = 1);

// One-particle mode concurrence between two equal-length arms:
// sum_j |2 Re(conj(psi_B,j) psi_C,j)|.
double concurrence(const net::Network& nw, const dynamics::StateVector& psi,
                   const std::string& chain_b, const std::string& chain_c);

// Max over the sampled window of the B/C concurrence, per (t_nB, t_nC) point.
ScanGrid2D max_concurrence_scan(int M, int N, const std::vector<double>& tnb,
                                const std::vector<double>& tnc, double n0, double alpha, double k,
                                const std::vector<double>& window, int threads = 1);

// |<r0| exp(-iH tau0) |psi0>|^2.
double interference_intensity(const net::Network& nw, const dynamics::StateVector& psi0,
                              const net::SiteRef& r0, double tau0);

// Scatter an alpha-packet (k = pi/2, launched from mid-chain A) off the film
// and report (T, R) = probability on chain B / chain A at the ballistic
// post-scattering instant.
std::pair<double, double> film_coefficients(int N, double Phi, double alpha);

// Peak detector-site probability over the window divided by the peak
// input-site probability; one packet, one diagonalization, many detectors.
std::vector<double> relative_probabilities(const net::Network& nw, const net::SiteRef& input,
                                           const std::vector<net::SiteRef>& detectors,
                                           double alpha, double k,
                                           const std::vector<double>& window);
double relative_probability_Q(const net::Network& nw, const net::SiteRef& input,
                              const net::SiteRef& detector, double alpha,
                              const std::vector<double>& window);

// Q versus flux for the equal-arm interferometer A(M), B=C(N), D(L), all
// junction couplings t/sqrt(2), packet launched at (A, n0), detector (D, j).
FluxResponse flux_sweep_Q(int M, int N, int L, int n0, int detector,
                          const std::vector<double>& phis, double alpha,
                          const std::vector<double>& window,
                          net::Gauge gauge = net::Gauge::SingleLink, int threads = 1);

}  // namespace blochnet::observe
