#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace blochnet::net {

using Complex = std::complex<double>;

// Global energy scale: all hoppings are expressed in units of t = 1.
inline constexpr double t_unit = 1.0;

struct ChainSpec {
  std::string label;
  int n_sites = 1;
  double hopping = 1.0;  // per internal bond, in units of t
};

// 1-based site reference within a named chain.
struct SiteRef {
  std::string chain;
  int index = 1;
};

struct JointSpec {
  SiteRef a;
  SiteRef b;
  Complex amplitude{1.0, 0.0};  // nonzero, in units of t
};

// Directed link between two global site indices.
struct DirectedLink {
  int u = -1;
  int v = -1;
};

enum class Gauge { SingleLink, Uniform };

// Undirected bond. A particle hopping u -> v picks up exp(+i phase);
// the matrix entry is H(u,v) = -amplitude * exp(-i phase).
struct Bond {
  int u = 0;
  int v = 0;
  Complex amplitude{1.0, 0.0};
  double phase = 0.0;
};

struct SitePotential {
  int site = 0;
  double value = 0.0;
};

// Dense complex Hermitian matrix with a validating constructor.
struct HermitianMatrix {
  Eigen::MatrixXcd m;
  explicit HermitianMatrix(Eigen::MatrixXcd mat);
  int size() const { return static_cast<int>(m.rows()); }
};

class Network {
 public:
  // Low-level assembly; bonds and potentials refer to global indices laid out
  // by the given chains. Validates topology but not amplitude signs.
  static Network from_parts(std::vector<ChainSpec> chains, std::vector<Bond> bonds,
                            std::vector<SitePotential> potentials);

  int size() const { return n_sites_; }
  const std::vector<ChainSpec>& chains() const { return chains_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const std::vector<SitePotential>& potentials() const { return potentials_; }

  bool has_chain(const std::string& label) const;
  int chain_length(const std::string& label) const;
  int site_index(const std::string& label, int local) const;
  int site_index(const SiteRef& ref) const { return site_index(ref.chain, ref.index); }
  SiteRef site_ref(int global) const;
  std::vector<int> chain_sites(const std::string& label) const;

  bool has_bond(int u, int v) const;
  const Bond& bond(int u, int v) const;

  Eigen::MatrixXcd matrix() const;

 private:
  friend Network thread_loop_flux(const Network& net, const std::vector<DirectedLink>& loop,
                                  double phi, Gauge gauge);
  std::vector<ChainSpec> chains_;
  std::vector<int> offsets_;
  int n_sites_ = 0;
  std::vector<Bond> bonds_;
  std::map<std::pair<int, int>, int> bond_index_;  // key (min,max) -> bonds_ slot
  std::vector<SitePotential> potentials_;
};

// Chains in declaration order, ascending local index; joints checked for
// dangling endpoints, zero amplitude, and duplicate pairs.
Network build_network(const std::vector<ChainSpec>& chains, const std::vector<JointSpec>& joints);

// Re-gauges the links of a closed directed loop so the directed phase sum
// equals 2*pi*phi. Gauge::SingleLink puts the whole phase on the loop's
// lexicographically first link; Gauge::Uniform spreads it evenly.
Network thread_loop_flux(const Network& net, const std::vector<DirectedLink>& loop, double phi,
                         Gauge gauge = Gauge::SingleLink);

HermitianMatrix hamiltonian(const Network& net);

// Two N-site chains A,B bridged at their far ends: bond (A,N)-(B,N) with
// amplitude t*sin(Phi) (omitted when it vanishes) and on-site potentials
// -t*cos(Phi) at (A,N), +t*cos(Phi) at (B,N).
Network film_network(int n_side, double Phi);

}  // namespace blochnet::net
