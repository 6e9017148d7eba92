#include "blochnet/observe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace blochnet::observe {
namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Hop count between two sites along declared bonds; -1 if disconnected.
int graph_distance(const net::Network& nw, int from, int to) {
  const int n = nw.size();
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (const auto& b : nw.bonds()) {
    adj[static_cast<size_t>(b.u)].push_back(b.v);
    adj[static_cast<size_t>(b.v)].push_back(b.u);
  }
  std::vector<int> dist(static_cast<size_t>(n), -1);
  std::deque<int> queue{from};
  dist[static_cast<size_t>(from)] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (u == to) return dist[static_cast<size_t>(u)];
    for (int v : adj[static_cast<size_t>(u)])
      if (dist[static_cast<size_t>(v)] < 0) {
        dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
        queue.push_back(v);
      }
  }
  return -1;
}

void append_arm_run(std::vector<net::DirectedLink>& loop, const net::Network& nw,
                    const std::string& chain, int from, int to) {
  const int step = (to >= from) ? 1 : -1;
  for (int j = from; j != to; j += step)
    loop.push_back({nw.site_index(chain, j), nw.site_index(chain, j + step)});
}

}  // namespace

std::vector<double> time_grid(double t0, double t1, double step) {
  if (!(step > 0) || t1 < t0) throw std::invalid_argument("bad time grid bounds");
  std::vector<double> out;
  const int count = static_cast<int>(std::floor((t1 - t0) / step + 1e-9));
  out.reserve(static_cast<size_t>(count) + 1);
  for (int i = 0; i <= count; ++i) out.push_back(t0 + step * i);
  return out;
}

net::Network y_network(int M, int N, double tnb, double tnc) {
  std::vector<net::ChainSpec> chains{{"A", M, 1.0}, {"B", N, 1.0}, {"C", N, 1.0}};
  std::vector<net::JointSpec> joints;
  if (std::abs(tnb) > 1e-15) joints.push_back({{"A", M}, {"B", 1}, tnb});
  if (std::abs(tnc) > 1e-15) joints.push_back({{"A", M}, {"C", 1}, tnc});
  return net::build_network(chains, joints);
}

net::Network q_network(int M, int N, double tnb, double tnc, double tring, double phi,
                       net::Gauge gauge) {
  std::vector<net::ChainSpec> chains{{"A", M, 1.0}, {"B", N, 1.0}, {"C", N, 1.0}};
  std::vector<net::JointSpec> joints;
  if (std::abs(tnb) > 1e-15) joints.push_back({{"A", M}, {"B", 1}, tnb});
  if (std::abs(tnc) > 1e-15) joints.push_back({{"A", M}, {"C", 1}, tnc});
  if (std::abs(tring) > 1e-15) joints.push_back({{"B", N}, {"C", N}, tring});
  net::Network nw = net::build_network(chains, joints);
  std::vector<net::DirectedLink> loop;
  loop.push_back({nw.site_index("A", M), nw.site_index("C", 1)});
  append_arm_run(loop, nw, "C", 1, N);
  loop.push_back({nw.site_index("C", N), nw.site_index("B", N)});
  append_arm_run(loop, nw, "B", N, 1);
  loop.push_back({nw.site_index("B", 1), nw.site_index("A", M)});
  return net::thread_loop_flux(nw, loop, phi, gauge);
}

net::Network interferometer_network(int M, int NB, int NC, int L, double tj, double phi,
                                    net::Gauge gauge) {
  std::vector<net::ChainSpec> chains{{"A", M, 1.0}, {"B", NB, 1.0}, {"C", NC, 1.0}, {"D", L, 1.0}};
  std::vector<net::JointSpec> joints{{{"A", M}, {"B", 1}, tj},
                                     {{"A", M}, {"C", 1}, tj},
                                     {{"B", NB}, {"D", 1}, tj},
                                     {{"C", NC}, {"D", 1}, tj}};
  net::Network nw = net::build_network(chains, joints);
  std::vector<net::DirectedLink> loop;
  loop.push_back({nw.site_index("A", M), nw.site_index("C", 1)});
  append_arm_run(loop, nw, "C", 1, NC);
  loop.push_back({nw.site_index("C", NC), nw.site_index("D", 1)});
  loop.push_back({nw.site_index("D", 1), nw.site_index("B", NB)});
  append_arm_run(loop, nw, "B", NB, 1);
  loop.push_back({nw.site_index("B", 1), nw.site_index("A", M)});
  return net::thread_loop_flux(nw, loop, phi, gauge);
}

double reflection_factor(const net::Network& nw, const dynamics::StateVector& psi0, double tau,
                         const std::string& input_chain) {
  const auto spec = dynamics::eigendecompose(net::hamiltonian(nw));
  const auto psi = dynamics::evolve(spec, psi0, tau);
  auto sites = nw.chain_sites(input_chain);
  sites.pop_back();  // the node site does not count as reflected weight
  return dynamics::site_probability(psi, sites);
}

ScanGrid2D reflection_scan(int M, int N, const std::vector<double>& tnb,
                           const std::vector<double>& tnc, double n0, double alpha, double k,
                           double tau0, int threads) {
  if (tnb.empty() || tnc.empty()) throw std::invalid_argument("empty coupling grid");
  ScanGrid2D grid;
  grid.x = tnb;
  grid.y = tnc;
  grid.z.resize(static_cast<int>(tnc.size()), static_cast<int>(tnb.size()));
  const int nx = static_cast<int>(tnb.size());
  parallel_for(static_cast<int>(tnb.size() * tnc.size()), threads, [&](int idx) {
    const int iy = idx / nx;
    const int ix = idx % nx;
    const net::Network nw = y_network(M, N, tnb[static_cast<size_t>(ix)],
                                      tnc[static_cast<size_t>(iy)]);
    const auto psi0 = dynamics::gaussian_packet(nw, "A", n0, alpha, k);
    grid.z(iy, ix) = reflection_factor(nw, psi0, tau0, "A");
  });
  return grid;
}

double concurrence(const net::Network& nw, const dynamics::StateVector& psi,
                   const std::string& chain_b, const std::string& chain_c) {
  const auto sb = nw.chain_sites(chain_b);
  const auto sc = nw.chain_sites(chain_c);
  if (sb.size() != sc.size())
    throw std::invalid_argument("concurrence needs equal-length arms");
  double total = 0.0;
  for (size_t j = 0; j < sb.size(); ++j)
    total += std::abs(2.0 * std::real(std::conj(psi.amp[sb[j]]) * psi.amp[sc[j]]));
  return total;
}

ScanGrid2D max_concurrence_scan(int M, int N, const std::vector<double>& tnb,
                                const std::vector<double>& tnc, double n0, double alpha, double k,
                                const std::vector<double>& window, int threads) {
  if (tnb.empty() || tnc.empty()) throw std::invalid_argument("empty coupling grid");
  if (window.empty()) throw std::invalid_argument("empty time window");
  ScanGrid2D grid;
  grid.x = tnb;
  grid.y = tnc;
  grid.z.resize(static_cast<int>(tnc.size()), static_cast<int>(tnb.size()));
  const int nx = static_cast<int>(tnb.size());
  parallel_for(static_cast<int>(tnb.size() * tnc.size()), threads, [&](int idx) {
    const int iy = idx / nx;
    const int ix = idx % nx;
    const net::Network nw = y_network(M, N, tnb[static_cast<size_t>(ix)],
                                      tnc[static_cast<size_t>(iy)]);
    const auto psi0 = dynamics::gaussian_packet(nw, "A", n0, alpha, k);
    const auto spec = dynamics::eigendecompose(net::hamiltonian(nw));
    double best = 0.0;
    for (const double tau : window) {
      const auto psi = dynamics::evolve(spec, psi0, tau);
      best = std::max(best, concurrence(nw, psi, "B", "C"));
    }
    grid.z(iy, ix) = best;
  });
  return grid;
}

double interference_intensity(const net::Network& nw, const dynamics::StateVector& psi0,
                              const net::SiteRef& r0, double tau0) {
  const int site = nw.site_index(r0);
  const auto spec = dynamics::eigendecompose(net::hamiltonian(nw));
  const dynamics::SiteProbe probe(spec, psi0);
  return probe.probability(site, tau0);
}

std::pair<double, double> film_coefficients(int N, double Phi, double alpha) {
  const net::Network nw = net::film_network(N, Phi);
  const double n0 = std::floor(N / 2.0);
  const auto psi0 = dynamics::gaussian_packet(nw, "A", n0, alpha, k_half_pi);
  const double tau = ((N - n0) + N / 2.0) / (2.0 * net::t_unit);
  const auto spec = dynamics::eigendecompose(net::hamiltonian(nw));
  const auto psi = dynamics::evolve(spec, psi0, tau);
  const double transmitted = dynamics::site_probability(psi, nw.chain_sites("B"));
  const double reflected = dynamics::site_probability(psi, nw.chain_sites("A"));
  return {transmitted, reflected};
}

std::vector<double> relative_probabilities(const net::Network& nw, const net::SiteRef& input,
                                           const std::vector<net::SiteRef>& detectors,
                                           double alpha, double k,
                                           const std::vector<double>& window) {
  if (window.empty()) throw std::invalid_argument("time window must be nonempty");
  if (detectors.empty()) throw std::invalid_argument("need at least one detector");
  const int in_site = nw.site_index(input);
  std::vector<int> det_sites;
  det_sites.reserve(detectors.size());
  for (const auto& d : detectors) {
    const int site = nw.site_index(d);
    const int dist = graph_distance(nw, in_site, site);
    if (dist < 0) throw std::invalid_argument("detector is not connected to the input site");
    const double ballistic = dist / (2.0 * net::t_unit);
    if (window.back() < 1.5 * ballistic)
      throw std::invalid_argument("time window shorter than 1.5x the ballistic arrival time");
    det_sites.push_back(site);
  }
  const auto psi0 = dynamics::gaussian_packet(nw, input.chain, input.index, alpha, k);
  const auto spec = dynamics::eigendecompose(net::hamiltonian(nw));
  const dynamics::SiteProbe probe(spec, psi0);
  double peak_in = 0.0;
  std::vector<double> peak_det(detectors.size(), 0.0);
  for (const double tau : window) {
    peak_in = std::max(peak_in, probe.probability(in_site, tau));
    for (size_t d = 0; d < det_sites.size(); ++d)
      peak_det[d] = std::max(peak_det[d], probe.probability(det_sites[d], tau));
  }
  if (peak_in <= 0.0) throw std::invalid_argument("input site carries no probability");
  std::vector<double> q(detectors.size());
  for (size_t d = 0; d < q.size(); ++d) q[d] = peak_det[d] / peak_in;
  return q;
}

double relative_probability_Q(const net::Network& nw, const net::SiteRef& input,
                              const net::SiteRef& detector, double alpha,
                              const std::vector<double>& window) {
  return relative_probabilities(nw, input, {detector}, alpha, k_half_pi, window)[0];
}

FluxResponse flux_sweep_Q(int M, int N, int L, int n0, int detector,
                          const std::vector<double>& phis, double alpha,
                          const std::vector<double>& window, net::Gauge gauge, int threads) {
  if (phis.empty()) throw std::invalid_argument("empty flux list");
  for (size_t i = 1; i < phis.size(); ++i)
    if (phis[i] <= phis[i - 1]) throw std::invalid_argument("flux values must increase strictly");
  FluxResponse out;
  out.phi = phis;
  out.q.resize(phis.size());
  out.alpha = alpha;
  out.path_length = (M - n0) + N + detector;
  const double tj = net::t_unit / std::sqrt(2.0);
  parallel_for(static_cast<int>(phis.size()), threads, [&](int i) {
    const net::Network nw =
        interferometer_network(M, N, N, L, tj, phis[static_cast<size_t>(i)], gauge);
    out.q[static_cast<size_t>(i)] =
        relative_probability_Q(nw, {"A", n0}, {"D", detector}, alpha, window);
  });
  return out;
}

}  // namespace blochnet::observe
