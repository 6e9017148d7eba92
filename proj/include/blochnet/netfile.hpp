#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blochnet/net.hpp"
#include "blochnet/spinmap.hpp"

namespace blochnet::netfile {

struct FluxDecl {
  std::vector<std::pair<net::SiteRef, net::SiteRef>> loop;
  double phi = 0;
};

// Parsed form of a network description file:
//   [chain]  label = A / sites = 50 / hopping = 1
//   [joint]  a = A:50 / b = B:1 / amplitude_re = 0.7071 / amplitude_im = 0
//   [flux]   loop = A:50>C:1,C:1>C:2,... / phi = 0.25
//   [spin]   switches the file to spin mode: chains take `exchange` (one value
//            or a comma list of sites-1 values) instead of `hopping`, joints
//            take `exchange` instead of amplitudes, [flux] is rejected.
// Unknown keys are rejected with the offending line number.
struct ParsedNetwork {
  bool spin = false;
  std::vector<net::ChainSpec> chains;
  std::vector<net::JointSpec> joints;
  spinmap::SpinNetworkSpec spin_network;
  std::vector<FluxDecl> fluxes;
};

ParsedNetwork parse_network_text(const std::string& text);
ParsedNetwork parse_network_file(const std::string& path);

// Builds the Network (threading declared fluxes for tight-binding files,
// mapping through the one-magnon sector for spin files).
net::Network realize(const ParsedNetwork& parsed, net::Gauge gauge = net::Gauge::SingleLink);

}  // namespace blochnet::netfile
