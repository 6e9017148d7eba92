#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blochnet/net.hpp"

namespace blochnet::reduce {

using net::Complex;

// One site of the virtual (reduced) network: block label plus 1-based position.
struct VirtualSite {
  std::string block;
  int index = 1;
};

// Unitary change of single-particle basis.  Rows act on amplitude vectors,
// psi_virtual = u * psi, so the conjugated Hamiltonian is u * H * u^dag.
struct SiteUnitary {
  Eigen::MatrixXcd u;
  std::vector<VirtualSite> labels;  // one entry per row of u

  int size() const { return static_cast<int>(u.rows()); }
};

// Family of reduction recipes.  Use the named constructors; they validate and
// fix the implied flux / mixing angle where the recipe demands one.
struct ReductionScheme {
  enum class Kind {
    Star,          // m-arm splitter collapsed onto one chain + m-1 dark chains
    YBeam,         // two-arm splitter, mixing angle theta
    QHalfFlux,     // ring with phi = n/2, theta fixed at pi/4
    QQuarterFlux,  // ring with phi = n/2 + 1/4, any theta
    QFilm,         // ring with arbitrary flux, theta = pi/4
    Film,          // two coupled chains with end bridge / end potentials
    IferomHalf,    // interferometer, phi = half-integer
    IferomInt,     // interferometer, phi = integer
    IferomEqual,   // interferometer, equal couplings, any flux
    YComplex,      // two-arm splitter with complex couplings, flux Phi
  };

  Kind kind = Kind::YBeam;
  int m = 0;         // star arm count
  int n = 0;         // parity parameter for the quantized-flux rings
  double theta = 0;  // mixing angle
  double Phi = 0;    // flux angle, 2 pi times the flux quantum count
  int M = 0;         // input chain length (A)
  int N = 0;         // arm length (B, C)
  int L = 0;         // output chain length (D), or input length for YComplex

  static ReductionScheme star(int m, int M, int N);
  static ReductionScheme y_beam(double theta, int M, int N);
  static ReductionScheme q_half_flux(int n, int M, int N);
  static ReductionScheme q_quarter_flux(int n, double theta, int M, int N);
  static ReductionScheme q_film(double Phi, int M, int N);
  static ReductionScheme film(double Phi, int N);
  static ReductionScheme iferom_half(double theta, int M, int N, int L);
  static ReductionScheme iferom_int(double theta, int M, int N, int L);
  static ReductionScheme iferom_equal(double Phi, int M, int N, int L);
  static ReductionScheme y_complex(double Phi, int L, int N);
};

// Predicted coupling between two virtual sites that the recipe does not remove
// (general-flux film bridge, equal-coupling interferometer junction).
struct VirtualBond {
  int r = 0;  // virtual row indices
  int s = 0;
  Complex amplitude;  // predicted matrix entry H_virtual(r, s)
};

struct Decomposition {
  SiteUnitary unitary;
  std::vector<std::pair<std::string, int>> partition;  // block label -> length
  Eigen::MatrixXcd virtual_h;                          // u H u^dag
  Eigen::MatrixXcd target;                             // predicted virtual matrix
  std::vector<VirtualBond> declared_bonds;             // predicted residual couplings
  std::vector<std::pair<int, double>> end_potentials;  // nonzero diagonal entries
  double residual = 0;          // max inter-block |virtual_h - declared|
  double target_deviation = 0;  // max entrywise |virtual_h - target|
};

// Builds the change-of-basis matrix for `scheme` applied to `network`.  Hopping
// phases entering the rows are read off the assembled Hamiltonian, so any gauge
// for the threaded flux gives the same physics.  Throws std::invalid_argument
// if the network's chains do not match the scheme's expected layout.
SiteUnitary build_unitary(const ReductionScheme& scheme, const net::Network& network);

// u * h * u^dag, with a unitarity check on u (tolerance 1e-12) and a
// Hermiticity check on the result.
Eigen::MatrixXcd conjugate(const Eigen::MatrixXcd& h, const SiteUnitary& u);

// Largest |entry| of `h` connecting two different blocks of `partition`.
double coupling_residual(const Eigen::MatrixXcd& h,
                         const std::vector<std::pair<std::string, int>>& partition);

// The block structure the scheme promises for the conjugated Hamiltonian.
std::vector<std::pair<std::string, int>> scheme_partition(const ReductionScheme& scheme);

// Predicted virtual Hamiltonian: homogeneous -t tridiagonal blocks plus the
// scheme's declared bridge couplings and end potentials.
Eigen::MatrixXcd predicted_virtual(const ReductionScheme& scheme);

// Full reduction: conjugate, compare to the predicted target, extract residuals
// and end potentials.
Decomposition reduce_network(const net::Network& network, const ReductionScheme& scheme);

// How far the network's junction couplings are from the scheme's matching
// condition (0 when matched; the reductions above stay exact regardless, only
// the virtual chain's homogeneity near the junction degrades).
double matching_residual(const net::Network& network, const ReductionScheme& scheme);

// Certifies the reduction dynamically: evolves psi0 directly under the network
// Hamiltonian and, separately, maps to the virtual basis, evolves under the
// predicted target matrix, and maps back.  Returns the 2-norm of the
// difference.  Requires reduce_network residual <= 1e-12.
double virtual_evolution_oracle(const net::Network& network, const ReductionScheme& scheme,
                                const Eigen::VectorXcd& psi0, double tau);

// Canonical matched-coupling network realizing `scheme`.  Flux-bearing schemes
// thread their loop with the scheme's flux (override with `phi` to pick another
// representative, e.g. a different integer n).
net::Network scheme_network(const ReductionScheme& scheme,
                            net::Gauge gauge = net::Gauge::SingleLink,
                            std::optional<double> phi = std::nullopt);

}  // namespace blochnet::reduce
