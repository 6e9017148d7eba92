#include "blochnet/net.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace blochnet::net {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::pair<int, int> canonical(int u, int v) { return {std::min(u, v), std::max(u, v)}; }

}  // namespace

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd mat) : m(std::move(mat)) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("HermitianMatrix: matrix must be square and nonempty");
  const double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
  const double herm_err = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > 1e-14 * scale)
    throw std::runtime_error("HermitianMatrix: matrix is not Hermitian");
  for (int i = 0; i < m.rows(); ++i)
    if (std::abs(m(i, i).imag()) > 1e-14 * scale)
      throw std::runtime_error("HermitianMatrix: diagonal is not real");
}

Network Network::from_parts(std::vector<ChainSpec> chains, std::vector<Bond> bonds,
                            std::vector<SitePotential> potentials) {
  if (chains.empty()) throw std::invalid_argument("Network: at least one chain required");
  Network net;
  std::set<std::string> seen;
  int offset = 0;
  for (const auto& c : chains) {
    if (c.label.empty()) throw std::invalid_argument("Network: empty chain label");
    if (!seen.insert(c.label).second)
      throw std::invalid_argument("Network: duplicate chain label '" + c.label + "'");
    if (c.n_sites < 1) throw std::invalid_argument("Network: chain '" + c.label + "' needs n_sites >= 1");
    net.offsets_.push_back(offset);
    offset += c.n_sites;
  }
  net.chains_ = std::move(chains);
  net.n_sites_ = offset;
  for (const auto& b : bonds) {
    if (b.u < 0 || b.u >= offset || b.v < 0 || b.v >= offset)
      throw std::invalid_argument("Network: bond endpoint out of range");
    if (b.u == b.v) throw std::invalid_argument("Network: bond endpoints must differ");
    if (std::abs(b.amplitude) == 0.0) throw std::invalid_argument("Network: zero bond amplitude");
    auto key = canonical(b.u, b.v);
    if (net.bond_index_.count(key))
      throw std::invalid_argument("Network: duplicate bond between sites " +
                                  std::to_string(b.u) + " and " + std::to_string(b.v));
    net.bond_index_[key] = static_cast<int>(net.bonds_.size());
    net.bonds_.push_back(b);
  }
  for (const auto& p : potentials)
    if (p.site < 0 || p.site >= offset)
      throw std::invalid_argument("Network: potential site out of range");
  net.potentials_ = std::move(potentials);
  return net;
}

bool Network::has_chain(const std::string& label) const {
  for (const auto& c : chains_)
    if (c.label == label) return true;
  return false;
}

int Network::chain_length(const std::string& label) const {
  for (const auto& c : chains_)
    if (c.label == label) return c.n_sites;
  throw std::invalid_argument("Network: unknown chain '" + label + "'");
}

int Network::site_index(const std::string& label, int local) const {
  for (size_t i = 0; i < chains_.size(); ++i) {
    if (chains_[i].label != label) continue;
    if (local < 1 || local > chains_[i].n_sites)
      throw std::invalid_argument("Network: site " + label + ":" + std::to_string(local) +
                                  " out of range");
    return offsets_[i] + local - 1;
  }
  throw std::invalid_argument("Network: unknown chain '" + label + "'");
}

SiteRef Network::site_ref(int global) const {
  if (global < 0 || global >= n_sites_)
    throw std::invalid_argument("Network: global site index out of range");
  for (size_t i = chains_.size(); i-- > 0;) {
    if (global >= offsets_[i]) return SiteRef{chains_[i].label, global - offsets_[i] + 1};
  }
  throw std::logic_error("Network: site_ref lookup failed");
}

std::vector<int> Network::chain_sites(const std::string& label) const {
  for (size_t i = 0; i < chains_.size(); ++i) {
    if (chains_[i].label != label) continue;
    std::vector<int> out(chains_[i].n_sites);
    for (int j = 0; j < chains_[i].n_sites; ++j) out[j] = offsets_[i] + j;
    return out;
  }
  throw std::invalid_argument("Network: unknown chain '" + label + "'");
}

bool Network::has_bond(int u, int v) const { return bond_index_.count(canonical(u, v)) > 0; }

const Bond& Network::bond(int u, int v) const {
  auto it = bond_index_.find(canonical(u, v));
  if (it == bond_index_.end())
    throw std::invalid_argument("Network: no bond between sites " + std::to_string(u) + " and " +
                                std::to_string(v));
  return bonds_[it->second];
}

Eigen::MatrixXcd Network::matrix() const {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n_sites_, n_sites_);
  const Complex i_unit(0.0, 1.0);
  for (const auto& b : bonds_) {
    const Complex entry = -b.amplitude * std::exp(-i_unit * b.phase);
    h(b.u, b.v) += entry;
    h(b.v, b.u) += std::conj(entry);
  }
  for (const auto& p : potentials_) h(p.site, p.site) += p.value;
  return h;
}

Network build_network(const std::vector<ChainSpec>& chains, const std::vector<JointSpec>& joints) {
  for (const auto& c : chains)
    if (!(c.hopping > 0.0))
      throw std::invalid_argument("build_network: chain '" + c.label + "' needs hopping > 0");

  // Lay out chains first so joint endpoints can be resolved to global indices.
  Network layout = Network::from_parts(chains, {}, {});
  std::vector<Bond> bonds;
  for (const auto& c : chains) {
    const auto sites = layout.chain_sites(c.label);
    for (size_t j = 0; j + 1 < sites.size(); ++j)
      bonds.push_back(Bond{sites[j], sites[j + 1], Complex(t_unit * c.hopping, 0.0), 0.0});
  }
  for (const auto& j : joints) {
    if (std::abs(j.amplitude) == 0.0)
      throw std::invalid_argument("build_network: joint amplitude must be nonzero");
    const int u = layout.site_index(j.a);
    const int v = layout.site_index(j.b);
    bonds.push_back(Bond{u, v, j.amplitude, 0.0});
  }
  return Network::from_parts(chains, std::move(bonds), {});
}

Network thread_loop_flux(const Network& net, const std::vector<DirectedLink>& loop, double phi,
                         Gauge gauge) {
  if (loop.size() < 3) throw std::invalid_argument("thread_loop_flux: loop needs >= 3 links");
  std::set<std::pair<int, int>> used;
  for (size_t i = 0; i < loop.size(); ++i) {
    const auto& l = loop[i];
    if (!net.has_bond(l.u, l.v))
      throw std::invalid_argument("thread_loop_flux: loop link (" + std::to_string(l.u) + "," +
                                  std::to_string(l.v) + ") is not a bond of the network");
    if (!used.insert(canonical(l.u, l.v)).second)
      throw std::invalid_argument("thread_loop_flux: loop visits a link twice");
    const auto& next = loop[(i + 1) % loop.size()];
    if (l.v != next.u)
      throw std::invalid_argument("thread_loop_flux: loop is not a closed directed cycle");
  }

  Network out = net;
  const double total = 2.0 * kPi * phi;
  if (gauge == Gauge::Uniform) {
    const double per_link = total / static_cast<double>(loop.size());
    for (const auto& l : loop) {
      Bond& b = out.bonds_[out.bond_index_.at(canonical(l.u, l.v))];
      const bool forward = (b.u == l.u);
      b.phase = forward ? per_link : -per_link;
    }
  } else {
    // Zero every loop link, then place the whole phase on the
    // lexicographically first one, oriented along the traversal.
    size_t first = 0;
    for (size_t i = 1; i < loop.size(); ++i)
      if (canonical(loop[i].u, loop[i].v) < canonical(loop[first].u, loop[first].v)) first = i;
    for (const auto& l : loop) out.bonds_[out.bond_index_.at(canonical(l.u, l.v))].phase = 0.0;
    Bond& b = out.bonds_[out.bond_index_.at(canonical(loop[first].u, loop[first].v))];
    b.phase = (b.u == loop[first].u) ? total : -total;
  }
  return out;
}

HermitianMatrix hamiltonian(const Network& net) { return HermitianMatrix(net.matrix()); }

Network film_network(int n_side, double Phi) {
  if (n_side < 2) throw std::invalid_argument("film_network: need at least 2 sites per side");
  std::vector<ChainSpec> chains{{"A", n_side, 1.0}, {"B", n_side, 1.0}};
  Network layout = Network::from_parts(chains, {}, {});
  std::vector<Bond> bonds;
  for (const auto& c : chains) {
    const auto sites = layout.chain_sites(c.label);
    for (size_t j = 0; j + 1 < sites.size(); ++j)
      bonds.push_back(Bond{sites[j], sites[j + 1], Complex(t_unit, 0.0), 0.0});
  }
  const int an = layout.site_index("A", n_side);
  const int bn = layout.site_index("B", n_side);
  const double bridge = t_unit * std::sin(Phi);
  if (std::abs(bridge) > 1e-15) bonds.push_back(Bond{an, bn, Complex(bridge, 0.0), 0.0});
  std::vector<SitePotential> pots{{an, -t_unit * std::cos(Phi)}, {bn, +t_unit * std::cos(Phi)}};
  return Network::from_parts(std::move(chains), std::move(bonds), std::move(pots));
}

}  // namespace blochnet::net
