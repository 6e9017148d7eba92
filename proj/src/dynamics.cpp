#include "blochnet/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace blochnet::dynamics {

Spectrum eigendecompose(const net::HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.m);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecompose: solver did not converge");
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

StateVector gaussian_packet(const net::Network& net, const std::string& chain, double n0,
                            double alpha, double k) {
  if (!(alpha > 0.0)) throw std::invalid_argument("gaussian_packet: alpha must be > 0");
  if (!std::isfinite(n0) || !std::isfinite(k))
    throw std::invalid_argument("gaussian_packet: n0 and k must be finite");
  const int len = net.chain_length(chain);

  auto envelope = [&](double j) { return std::exp(-alpha * alpha * (j - n0) * (j - n0)); };

  double omega = 0.0;
  for (int j = 1; j <= len; ++j) omega += envelope(j);
  if (omega <= 0.0)
    throw std::invalid_argument("gaussian_packet: envelope vanishes on the chain");

  // Envelope mass that falls outside the chain, summed over the lattice range
  // where it is non-negligible.
  const int reach = static_cast<int>(std::ceil(40.0 / alpha)) + 1;
  double outside = 0.0;
  const int lo = static_cast<int>(std::floor(n0)) - reach;
  const int hi = static_cast<int>(std::ceil(n0)) + reach;
  for (int j = lo; j <= hi; ++j)
    if (j < 1 || j > len) outside += envelope(static_cast<double>(j));
  if (outside / (outside + omega) >= 1e-6)
    throw std::invalid_argument("gaussian_packet: packet does not fit the chain");

  StateVector psi;
  psi.amp = Eigen::VectorXcd::Zero(net.size());
  const Complex i_unit(0.0, 1.0);
  const auto sites = net.chain_sites(chain);
  for (int j = 1; j <= len; ++j)
    psi.amp(sites[j - 1]) =
        std::sqrt(envelope(j) / omega) * std::exp(i_unit * (k * static_cast<double>(j)));
  return psi;
}

double half_width(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("half_width: alpha must be > 0");
  return 2.0 * std::sqrt(std::log(2.0)) / alpha;
}

StateVector evolve(const Spectrum& spec, const StateVector& psi0, double tau) {
  if (psi0.size() != spec.size()) throw std::invalid_argument("evolve: dimension mismatch");
  const Complex i_unit(0.0, 1.0);
  Eigen::VectorXcd coeff = spec.eigenvectors.adjoint() * psi0.amp;
  for (int n = 0; n < spec.size(); ++n) coeff(n) *= std::exp(-i_unit * spec.eigenvalues(n) * tau);
  return StateVector{spec.eigenvectors * coeff};
}

PacketTrack track_packet(const Spectrum& spec, const net::Network& net, const std::string& chain,
                         const StateVector& psi0, const std::vector<double>& times) {
  const auto sites = net.chain_sites(chain);
  PacketTrack track;
  const Complex i_unit(0.0, 1.0);
  Eigen::VectorXcd coeff = spec.eigenvectors.adjoint() * psi0.amp;
  for (double tau : times) {
    Eigen::VectorXcd phased = coeff;
    for (int n = 0; n < spec.size(); ++n)
      phased(n) *= std::exp(-i_unit * spec.eigenvalues(n) * tau);
    const Eigen::VectorXcd psi = spec.eigenvectors * phased;
    double weight = 0.0, first_moment = 0.0;
    for (size_t j = 0; j < sites.size(); ++j) {
      const double p = std::norm(psi(sites[j]));
      weight += p;
      first_moment += p * static_cast<double>(j + 1);
    }
    track.tau.push_back(tau);
    track.center.push_back(weight > 0.0 ? first_moment / weight : 0.0);
    track.weight.push_back(weight);
  }
  return track;
}

double site_probability(const StateVector& psi, const std::vector<int>& sites) {
  double p = 0.0;
  for (int s : sites) {
    if (s < 0 || s >= psi.size())
      throw std::invalid_argument("site_probability: site index out of range");
    p += std::norm(psi.amp(s));
  }
  return p;
}

SiteProbe::SiteProbe(const Spectrum& spec, const StateVector& psi0)
    : spec_(spec), coeff_(spec.eigenvectors.adjoint() * psi0.amp) {
  if (psi0.size() != spec.size()) throw std::invalid_argument("SiteProbe: dimension mismatch");
}

Complex SiteProbe::amplitude(int site, double tau) const {
  if (site < 0 || site >= spec_.size())
    throw std::invalid_argument("SiteProbe: site index out of range");
  const Complex i_unit(0.0, 1.0);
  Complex a(0.0, 0.0);
  for (int n = 0; n < spec_.size(); ++n)
    a += spec_.eigenvectors(site, n) * std::exp(-i_unit * spec_.eigenvalues(n) * tau) * coeff_(n);
  return a;
}

double SiteProbe::probability(int site, double tau) const { return std::norm(amplitude(site, tau)); }

}  // namespace blochnet::dynamics
