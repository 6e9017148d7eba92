#include "blochnet/spinmap.hpp"

#include <cmath>
#include <stdexcept>

namespace blochnet::spinmap {

net::Network magnon_to_tbn(const SpinNetworkSpec& spec) {
  std::vector<net::ChainSpec> chains;
  chains.reserve(spec.chains.size());
  for (const auto& sc : spec.chains) {
    if (sc.n_spins < 1) throw std::invalid_argument("spin chain needs at least one spin");
    if (!sc.exchange.empty() && static_cast<int>(sc.exchange.size()) != sc.n_spins - 1)
      throw std::invalid_argument("chain '" + sc.label + "' needs " +
                                  std::to_string(sc.n_spins - 1) + " exchange couplings");
    for (double j : sc.exchange)
      if (!std::isfinite(j)) throw std::invalid_argument("exchange couplings must be finite");
    chains.push_back({sc.label, sc.n_spins, 1.0});
  }
  // Layout pass so bonds can refer to global indices.
  const net::Network layout = net::Network::from_parts(chains, {}, {});
  std::vector<net::Bond> bonds;
  for (const auto& sc : spec.chains)
    for (int j = 1; j < sc.n_spins; ++j) {
      const double J =
          sc.exchange.empty() ? 1.0 : sc.exchange[static_cast<size_t>(j - 1)];
      if (J == 0.0) continue;  // zero exchange contributes no matrix entry
      bonds.push_back({layout.site_index(sc.label, j), layout.site_index(sc.label, j + 1),
                       net::Complex{-J, 0.0}, 0.0});
    }
  for (const auto& sj : spec.joints) {
    if (!std::isfinite(sj.exchange)) throw std::invalid_argument("joint exchange must be finite");
    if (sj.exchange == 0.0) continue;
    bonds.push_back({layout.site_index(sj.a), layout.site_index(sj.b),
                     net::Complex{-sj.exchange, 0.0}, 0.0});
  }
  return net::Network::from_parts(chains, bonds, {});
}

}  // namespace blochnet::spinmap
