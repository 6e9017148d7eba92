#include "blochnet/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace blochnet::io {
namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline games
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::runtime_error("row width does not match header in '" + path + "'");
    for (size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

void write_state_csv(const std::string& path, const dynamics::StateVector& psi) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<size_t>(psi.size()));
  for (int j = 0; j < psi.size(); ++j)
    rows.push_back({static_cast<double>(j), psi.amp[j].real(), psi.amp[j].imag()});
  write_table(path, {"site", "re", "im"}, rows);
}

void write_track_csv(const std::string& path, const dynamics::PacketTrack& track) {
  std::vector<std::vector<double>> rows;
  rows.reserve(track.tau.size());
  for (size_t i = 0; i < track.tau.size(); ++i)
    rows.push_back({track.tau[i], track.center[i], track.weight[i]});
  write_table(path, {"tau", "center", "weight"}, rows);
}

void write_scan_csv(const std::string& path, const observe::ScanGrid2D& grid) {
  std::vector<std::vector<double>> rows;
  rows.reserve(grid.x.size() * grid.y.size());
  for (size_t iy = 0; iy < grid.y.size(); ++iy)
    for (size_t ix = 0; ix < grid.x.size(); ++ix)
      rows.push_back({grid.x[ix], grid.y[iy], grid.z(static_cast<int>(iy), static_cast<int>(ix))});
  write_table(path, {"x", "y", "z"}, rows);

  auto mat = open_out(path + ".mat");
  for (size_t iy = 0; iy < grid.y.size(); ++iy) {
    for (size_t ix = 0; ix < grid.x.size(); ++ix)
      mat << (ix ? " " : "")
          << format_double(grid.z(static_cast<int>(iy), static_cast<int>(ix)));
    mat << "\n";
  }
}

void write_flux_csv(const std::string& path, const observe::FluxResponse& response) {
  std::vector<std::vector<double>> rows;
  rows.reserve(response.phi.size());
  for (size_t i = 0; i < response.phi.size(); ++i)
    rows.push_back({response.phi[i], response.q[i]});
  write_table(path, {"phi", "Q"}, rows);
}

}  // namespace blochnet::io
