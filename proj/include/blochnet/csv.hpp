#pragma once

#include <string>
#include <vector>

#include "blochnet/dynamics.hpp"
#include "blochnet/observe.hpp"

namespace blochnet::io {

// Shortest round-trip-exact decimal form; used for every numeric cell so that
// identical runs produce identical bytes.
std::string format_double(double v);

void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);

void write_state_csv(const std::string& path, const dynamics::StateVector& psi);
void write_track_csv(const std::string& path, const dynamics::PacketTrack& track);
// Long form x,y,z plus a gnuplot-compatible matrix alongside (suffix .mat).
void write_scan_csv(const std::string& path, const observe::ScanGrid2D& grid);
void write_flux_csv(const std::string& path, const observe::FluxResponse& response);

}  // namespace blochnet::io
