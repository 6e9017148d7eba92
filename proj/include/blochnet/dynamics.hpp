#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blochnet/net.hpp"

namespace blochnet::dynamics {

using net::Complex;

struct StateVector {
  Eigen::VectorXcd amp;
  double norm() const { return amp.norm(); }
  int size() const { return static_cast<int>(amp.size()); }
};

// Eigensystem of a Hermitian matrix; eigenvalues ascending, eigenvectors
// column-wise and orthonormal.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  int size() const { return static_cast<int>(eigenvalues.size()); }
};

struct PacketTrack {
  std::vector<double> tau;
  std::vector<double> center;  // probability-weighted mean local index
  std::vector<double> weight;  // probability carried by the chain
};

Spectrum eigendecompose(const net::HermitianMatrix& h);

// psi_j = exp(-alpha^2 (j - n0)^2 / 2) exp(i k j) / sqrt(Omega) on the given
// chain, with Omega the on-chain envelope normalization. Errors out when the
// envelope does not fit the chain (relative tail mass >= 1e-6).
StateVector gaussian_packet(const net::Network& net, const std::string& chain, double n0,
                            double alpha, double k);

// Half-height full width of the probability envelope: 2 sqrt(ln 2) / alpha.
double half_width(double alpha);

StateVector evolve(const Spectrum& spec, const StateVector& psi0, double tau);

PacketTrack track_packet(const Spectrum& spec, const net::Network& net, const std::string& chain,
                         const StateVector& psi0, const std::vector<double>& times);

double site_probability(const StateVector& psi, const std::vector<int>& sites);

// Probe for repeated single-site amplitude evaluation at many times:
// amplitude(site, tau) costs O(n) after one O(n^2) setup.
class SiteProbe {
 public:
  SiteProbe(const Spectrum& spec, const StateVector& psi0);
  Complex amplitude(int site, double tau) const;
  double probability(int site, double tau) const;

 private:
  const Spectrum& spec_;
  Eigen::VectorXcd coeff_;  // V^dagger psi0
};

}  // namespace blochnet::dynamics
