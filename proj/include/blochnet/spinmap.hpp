#pragma once

#include <string>
#include <vector>

#include "blochnet/net.hpp"

namespace blochnet::spinmap {

// XY chain of spins with per-bond exchange couplings (size n_spins-1; empty
// means uniform 1). Couplings are real energies and may be negative.
struct SpinChainSpec {
  std::string label;
  int n_spins = 1;
  std::vector<double> exchange;
};

struct SpinJointSpec {
  net::SiteRef a;
  net::SiteRef b;
  double exchange = 1.0;
};

struct SpinNetworkSpec {
  std::vector<SpinChainSpec> chains;
  std::vector<SpinJointSpec> joints;
};

// One-magnon image of the spin network: a Network whose matrix equals the
// single-flip block of the spin Hamiltonian entrywise (bond amplitude -J, so
// the matrix entry is +J). Matching conditions transfer with |J| in place of t.
net::Network magnon_to_tbn(const SpinNetworkSpec& spec);

}  // namespace blochnet::spinmap
