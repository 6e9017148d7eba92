#include "blochnet/reduce.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blochnet/dynamics.hpp"

namespace blochnet::reduce {
namespace {

constexpr double kPi = 3.14159265358979323846;
const Complex kI{0.0, 1.0};

void check_positive(int v, const char* what) {
  if (v < 1) throw std::invalid_argument(std::string(what) + " must be >= 1");
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

std::vector<std::pair<std::string, int>> expected_chains(const ReductionScheme& sc) {
  using K = ReductionScheme::Kind;
  switch (sc.kind) {
    case K::Star: {
      std::vector<std::pair<std::string, int>> v{{"A", sc.M}};
      for (int p = 1; p <= sc.m; ++p) v.emplace_back("B" + std::to_string(p), sc.N);
      return v;
    }
    case K::YBeam:
    case K::QHalfFlux:
    case K::QQuarterFlux:
    case K::QFilm:
      return {{"A", sc.M}, {"B", sc.N}, {"C", sc.N}};
    case K::Film:
      return {{"A", sc.N}, {"B", sc.N}};
    case K::IferomHalf:
    case K::IferomInt:
    case K::IferomEqual:
      return {{"A", sc.M}, {"B", sc.N}, {"C", sc.N}, {"D", sc.L}};
    case K::YComplex:
      return {{"A", sc.L}, {"B", sc.N}, {"C", sc.N}};
  }
  throw std::logic_error("unknown scheme kind");
}

void require_layout(const net::Network& nw, const ReductionScheme& sc) {
  int total = 0;
  for (const auto& [label, len] : expected_chains(sc)) {
    if (!nw.has_chain(label))
      throw std::invalid_argument("scheme expects a chain labeled '" + label + "'");
    if (nw.chain_length(label) != len)
      throw std::invalid_argument("chain '" + label + "' must have " + std::to_string(len) +
                                  " sites for this scheme");
    total += len;
  }
  if (nw.size() != total)
    throw std::invalid_argument("network has sites outside the chains the scheme maps");
}

// arg of the hop entry, referred to the -|t| e^{i...} form.
double hop_phase(const Eigen::MatrixXcd& h, int u, int v) {
  const Complex e = h(u, v);
  if (std::abs(e) == 0.0)
    throw std::invalid_argument("a bond the scheme relies on is missing from the network");
  return std::arg(-e);
}

// Cumulative phases along one arm: slot l-1 holds the phase gained hopping from
// the junction site out to arm site l (sign +1 for the B convention, -1 for C).
// When `out` is a valid site index, one extra link arm:len -> out is appended.
std::vector<double> arm_phase_sums(const net::Network& nw, const Eigen::MatrixXcd& h,
                                   const std::string& root, int root_local,
                                   const std::string& arm, double sign, int out) {
  const int len = nw.chain_length(arm);
  std::vector<double> acc;
  acc.reserve(static_cast<size_t>(len) + 1);
  acc.push_back(sign * hop_phase(h, nw.site_index(root, root_local), nw.site_index(arm, 1)));
  for (int j = 1; j < len; ++j)
    acc.push_back(acc.back() + sign * hop_phase(h, nw.site_index(arm, j), nw.site_index(arm, j + 1)));
  if (out >= 0) acc.push_back(acc.back() + sign * hop_phase(h, nw.site_index(arm, len), out));
  return acc;
}

std::vector<VirtualBond> declared_bonds_for(const ReductionScheme& sc) {
  using K = ReductionScheme::Kind;
  std::vector<VirtualBond> out;
  if (sc.kind == K::QFilm) {
    const Complex v{-net::t_unit * std::sin(sc.Phi), 0.0};
    if (std::abs(v) > 1e-15) out.push_back({sc.M + sc.N - 1, sc.M + 2 * sc.N - 1, v});
  } else if (sc.kind == K::IferomEqual) {
    const double half = sc.Phi / 2;
    const Complex e = std::exp(-kI * half);
    const Complex va = -net::t_unit * e * std::cos(half);
    const Complex vb = -kI * net::t_unit * e * std::sin(half);
    const int c_first = sc.M + 2 * sc.N;
    if (std::abs(va) > 1e-15) out.push_back({sc.M + sc.N - 1, c_first, va});
    if (std::abs(vb) > 1e-15) out.push_back({sc.M + 2 * sc.N - 1, c_first, vb});
  }
  return out;
}

std::vector<net::DirectedLink> q_loop(const net::Network& nw, int M, int N) {
  std::vector<net::DirectedLink> loop;
  loop.push_back({nw.site_index("A", M), nw.site_index("C", 1)});
  for (int j = 1; j < N; ++j) loop.push_back({nw.site_index("C", j), nw.site_index("C", j + 1)});
  loop.push_back({nw.site_index("C", N), nw.site_index("B", N)});
  for (int j = N; j > 1; --j) loop.push_back({nw.site_index("B", j), nw.site_index("B", j - 1)});
  loop.push_back({nw.site_index("B", 1), nw.site_index("A", M)});
  return loop;
}

std::vector<net::DirectedLink> iferom_loop(const net::Network& nw, int M, int N) {
  std::vector<net::DirectedLink> loop;
  loop.push_back({nw.site_index("A", M), nw.site_index("C", 1)});
  for (int j = 1; j < N; ++j) loop.push_back({nw.site_index("C", j), nw.site_index("C", j + 1)});
  loop.push_back({nw.site_index("C", N), nw.site_index("D", 1)});
  loop.push_back({nw.site_index("D", 1), nw.site_index("B", N)});
  for (int j = N; j > 1; --j) loop.push_back({nw.site_index("B", j), nw.site_index("B", j - 1)});
  loop.push_back({nw.site_index("B", 1), nw.site_index("A", M)});
  return loop;
}

double bond_mod(const net::Network& nw, const std::string& ca, int ia, const std::string& cb,
                int ib) {
  const int u = nw.site_index(ca, ia);
  const int v = nw.site_index(cb, ib);
  if (!nw.has_bond(u, v)) return 0.0;
  return std::abs(nw.bond(u, v).amplitude);
}

double potential_at(const net::Network& nw, const std::string& chain, int local) {
  const int u = nw.site_index(chain, local);
  double v = 0.0;
  for (const auto& p : nw.potentials())
    if (p.site == u) v += p.value;
  return v;
}

}  // namespace

ReductionScheme ReductionScheme::star(int m, int M, int N) {
  if (m < 2) throw std::invalid_argument("star needs at least two arms");
  check_positive(M, "M");
  check_positive(N, "N");
  ReductionScheme sc;
  sc.kind = Kind::Star;
  sc.m = m;
  sc.M = M;
  sc.N = N;
  return sc;
}

ReductionScheme ReductionScheme::y_beam(double theta, int M, int N) {
  check_finite(theta, "theta");
  check_positive(M, "M");
  check_positive(N, "N");
  ReductionScheme sc;
  sc.kind = Kind::YBeam;
  sc.theta = theta;
  sc.M = M;
  sc.N = N;
  return sc;
}

ReductionScheme ReductionScheme::q_half_flux(int n, int M, int N) {
  check_positive(M, "M");
  check_positive(N, "N");
  ReductionScheme sc;
  sc.kind = Kind::QHalfFlux;
  sc.n = n;
  sc.theta = kPi / 4;
  sc.Phi = n * kPi;
  sc.M = M;
  sc.N = N;
  return sc;
}

ReductionScheme ReductionScheme::q_quarter_flux(int n, double theta, int M, int N) {
  check_finite(theta, "theta");
  check_positive(M, "M");
  check_positive(N, "N");
  ReductionScheme sc;
  sc.kind = Kind::QQuarterFlux;
  sc.n = n;
  sc.theta = theta;
  sc.Phi = n * kPi + kPi / 2;
  sc.M = M;
  sc.N = N;
  return sc;
}

ReductionScheme ReductionScheme::q_film(double Phi, int M, int N) {
  check_finite(Phi, "Phi");
  check_positive(M, "M");
  check_positive(N, "N");
  ReductionScheme sc;
  sc.kind = Kind::QFilm;
  sc.theta = kPi / 4;
  sc.Phi = Phi;
  sc.M = M;
  sc.N = N;
  return sc;
}

ReductionScheme ReductionScheme::film(double Phi, int N) {
  check_finite(Phi, "Phi");
  if (N < 2) throw std::invalid_argument("film needs N >= 2");
  ReductionScheme sc;
  sc.kind = Kind::Film;
  sc.Phi = Phi;
  sc.N = N;
  return sc;
}

ReductionScheme ReductionScheme::iferom_half(double theta, int M, int N, int L) {
  check_finite(theta, "theta");
  check_positive(M, "M");
  check_positive(N, "N");
  check_positive(L, "L");
  ReductionScheme sc;
  sc.kind = Kind::IferomHalf;
  sc.theta = theta;
  sc.Phi = kPi;
  sc.M = M;
  sc.N = N;
  sc.L = L;
  return sc;
}

ReductionScheme ReductionScheme::iferom_int(double theta, int M, int N, int L) {
  check_finite(theta, "theta");
  check_positive(M, "M");
  check_positive(N, "N");
  check_positive(L, "L");
  ReductionScheme sc;
  sc.kind = Kind::IferomInt;
  sc.theta = theta;
  sc.Phi = 0;
  sc.M = M;
  sc.N = N;
  sc.L = L;
  return sc;
}

ReductionScheme ReductionScheme::iferom_equal(double Phi, int M, int N, int L) {
  check_finite(Phi, "Phi");
  check_positive(M, "M");
  check_positive(N, "N");
  check_positive(L, "L");
  ReductionScheme sc;
  sc.kind = Kind::IferomEqual;
  sc.theta = kPi / 4;
  sc.Phi = Phi;
  sc.M = M;
  sc.N = N;
  sc.L = L;
  return sc;
}

ReductionScheme ReductionScheme::y_complex(double Phi, int L, int N) {
  check_finite(Phi, "Phi");
  check_positive(L, "L");
  check_positive(N, "N");
  ReductionScheme sc;
  sc.kind = Kind::YComplex;
  sc.Phi = Phi;
  sc.L = L;
  sc.N = N;
  return sc;
}

std::vector<std::pair<std::string, int>> scheme_partition(const ReductionScheme& sc) {
  using K = ReductionScheme::Kind;
  switch (sc.kind) {
    case K::Star: {
      std::vector<std::pair<std::string, int>> part{{"a", sc.M + sc.N}};
      for (int q = 1; q < sc.m; ++q) part.emplace_back("b" + std::to_string(q), sc.N);
      return part;
    }
    case K::YBeam:
    case K::QHalfFlux:
    case K::QFilm:
      return {{"a", sc.M + sc.N}, {"b", sc.N}};
    case K::QQuarterFlux:
      return {{"a", sc.M + 2 * sc.N}};
    case K::Film:
      return {{"a", 2 * sc.N}};
    case K::IferomHalf:
      return {{"a", sc.M + sc.N}, {"b", sc.N + sc.L}};
    case K::IferomInt:
      return {{"a", sc.M + sc.N + sc.L}, {"b", sc.N}};
    case K::IferomEqual:
      return {{"a", sc.M + sc.N}, {"b", sc.N}, {"c", sc.L}};
    case K::YComplex:
      return {{"a", sc.L + sc.N}, {"b", sc.N}};
  }
  throw std::logic_error("unknown scheme kind");
}

SiteUnitary build_unitary(const ReductionScheme& sc, const net::Network& nw) {
  using K = ReductionScheme::Kind;
  require_layout(nw, sc);
  const int n = nw.size();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(n, n);
  std::vector<VirtualSite> labels(n);
  int row = 0;
  auto put = [&](const std::string& block, int index) {
    labels[row] = VirtualSite{block, index};
    return row++;
  };

  switch (sc.kind) {
    case K::Star: {
      const double w = 1.0 / std::sqrt(static_cast<double>(sc.m));
      for (int j = 1; j <= sc.M; ++j) u(put("a", j), nw.site_index("A", j)) = 1.0;
      for (int l = 1; l <= sc.N; ++l) {
        const int r = put("a", sc.M + l);
        for (int p = 1; p <= sc.m; ++p) u(r, nw.site_index("B" + std::to_string(p), l)) = w;
      }
      for (int q = 1; q < sc.m; ++q)
        for (int l = 1; l <= sc.N; ++l) {
          const int r = put("b" + std::to_string(q), l);
          for (int p = 1; p <= sc.m; ++p)
            u(r, nw.site_index("B" + std::to_string(p), l)) =
                w * std::exp(-kI * (2.0 * kPi * p * q / static_cast<double>(sc.m)));
        }
      break;
    }
    case K::YBeam: {
      const double c = std::cos(sc.theta);
      const double s = std::sin(sc.theta);
      for (int j = 1; j <= sc.M; ++j) u(put("a", j), nw.site_index("A", j)) = 1.0;
      for (int l = 1; l <= sc.N; ++l) {
        const int r = put("a", sc.M + l);
        u(r, nw.site_index("B", l)) = c;
        u(r, nw.site_index("C", l)) = s;
      }
      for (int l = 1; l <= sc.N; ++l) {
        const int r = put("b", l);
        u(r, nw.site_index("B", l)) = s;
        u(r, nw.site_index("C", l)) = -c;
      }
      break;
    }
    case K::QHalfFlux:
    case K::QFilm:
    case K::QQuarterFlux: {
      const double c = std::cos(sc.theta);
      const double s = std::sin(sc.theta);
      const Eigen::MatrixXcd h = nw.matrix();
      const auto phib = arm_phase_sums(nw, h, "A", sc.M, "B", +1.0, -1);
      const auto phic = arm_phase_sums(nw, h, "A", sc.M, "C", -1.0, -1);
      for (int j = 1; j <= sc.M; ++j) u(put("a", j), nw.site_index("A", j)) = 1.0;
      for (int l = 1; l <= sc.N; ++l) {
        const int r = put("a", sc.M + l);
        u(r, nw.site_index("B", l)) = c * std::exp(kI * phib[l - 1]);
        u(r, nw.site_index("C", l)) = s * std::exp(-kI * phic[l - 1]);
      }
      if (sc.kind == K::QQuarterFlux) {
        // trailing half of the single virtual chain, attached through the ring
        // bond, runs back from arm site N down to 1
        const Complex cu = (sc.n % 2 == 0) ? -kI : kI;
        for (int rr = 1; rr <= sc.N; ++rr) {
          const int l = sc.N + 1 - rr;
          const int r = put("a", sc.M + sc.N + rr);
          u(r, nw.site_index("B", l)) = cu * s * std::exp(kI * phib[l - 1]);
          u(r, nw.site_index("C", l)) = -cu * c * std::exp(-kI * phic[l - 1]);
        }
      } else {
        const Complex f = (sc.kind == K::QFilm) ? -kI : Complex{1.0, 0.0};
        for (int l = 1; l <= sc.N; ++l) {
          const int r = put("b", l);
          u(r, nw.site_index("B", l)) = f * s * std::exp(kI * phib[l - 1]);
          u(r, nw.site_index("C", l)) = -f * c * std::exp(-kI * phic[l - 1]);
        }
      }
      break;
    }
    case K::Film: {
      const double fp = std::cos(sc.Phi / 2) + std::sin(sc.Phi / 2);
      const double fm = std::cos(sc.Phi / 2) - std::sin(sc.Phi / 2);
      const double w = std::sqrt(0.5);
      for (int j = 1; j <= sc.N; ++j) {
        const int r = put("a", j);
        u(r, nw.site_index("A", j)) = w * fp;
        u(r, nw.site_index("B", j)) = -w * fm;
      }
      for (int rr = 1; rr <= sc.N; ++rr) {
        const int j = sc.N + 1 - rr;
        const int r = put("a", sc.N + rr);
        u(r, nw.site_index("A", j)) = w * fm;
        u(r, nw.site_index("B", j)) = w * fp;
      }
      break;
    }
    case K::IferomHalf:
    case K::IferomInt:
    case K::IferomEqual: {
      const double c = std::cos(sc.theta);
      const double s = std::sin(sc.theta);
      const Eigen::MatrixXcd h = nw.matrix();
      const int d1 = nw.site_index("D", 1);
      const auto phib = arm_phase_sums(nw, h, "A", sc.M, "B", +1.0, d1);
      const auto phic = arm_phase_sums(nw, h, "A", sc.M, "C", -1.0, d1);
      const Complex dphase = std::exp(kI * phib[sc.N]);
      for (int j = 1; j <= sc.M; ++j) u(put("a", j), nw.site_index("A", j)) = 1.0;
      for (int l = 1; l <= sc.N; ++l) {
        const int r = put("a", sc.M + l);
        u(r, nw.site_index("B", l)) = c * std::exp(kI * phib[l - 1]);
        u(r, nw.site_index("C", l)) = s * std::exp(-kI * phic[l - 1]);
      }
      if (sc.kind == K::IferomInt)
        for (int j = 1; j <= sc.L; ++j) u(put("a", sc.M + sc.N + j), nw.site_index("D", j)) = dphase;
      for (int l = 1; l <= sc.N; ++l) {
        const int r = put("b", l);
        u(r, nw.site_index("B", l)) = s * std::exp(kI * phib[l - 1]);
        u(r, nw.site_index("C", l)) = -c * std::exp(-kI * phic[l - 1]);
      }
      if (sc.kind == K::IferomHalf)
        for (int j = 1; j <= sc.L; ++j) u(put("b", sc.N + j), nw.site_index("D", j)) = dphase;
      if (sc.kind == K::IferomEqual)
        for (int j = 1; j <= sc.L; ++j) u(put("c", j), nw.site_index("D", j)) = dphase;
      break;
    }
    case K::YComplex: {
      const double c = std::cos(sc.Phi / 2);
      const double s = std::sin(sc.Phi / 2);
      const Complex ea = std::exp(-kI * (sc.Phi / 2));
      const Complex eb = std::exp(kI * (sc.Phi / 2));
      for (int j = 1; j <= sc.L; ++j) u(put("a", j), nw.site_index("A", j)) = 1.0;
      for (int l = 1; l <= sc.N; ++l) {
        const int r = put("a", sc.L + l);
        u(r, nw.site_index("B", l)) = ea * c;
        u(r, nw.site_index("C", l)) = kI * ea * s;
      }
      for (int l = 1; l <= sc.N; ++l) {
        const int r = put("b", l);
        u(r, nw.site_index("B", l)) = -kI * eb * s;
        u(r, nw.site_index("C", l)) = -eb * c;
      }
      break;
    }
  }
  return SiteUnitary{std::move(u), std::move(labels)};
}

Eigen::MatrixXcd conjugate(const Eigen::MatrixXcd& h, const SiteUnitary& su) {
  if (h.rows() != h.cols()) throw std::invalid_argument("matrix must be square");
  if (su.u.rows() != h.rows() || su.u.cols() != h.rows())
    throw std::invalid_argument("unitary and matrix dimensions disagree");
  const int n = static_cast<int>(h.rows());
  const double udev =
      (su.u.adjoint() * su.u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (udev > 1e-12)
    throw std::runtime_error("basis change is not unitary, U^dag U off by " + std::to_string(udev));
  Eigen::MatrixXcd out = su.u * h * su.u.adjoint();
  const double scale = std::max(1.0, out.cwiseAbs().maxCoeff());
  if ((out - out.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::runtime_error("conjugated matrix lost Hermiticity");
  return out;
}

double coupling_residual(const Eigen::MatrixXcd& h,
                         const std::vector<std::pair<std::string, int>>& partition) {
  int total = 0;
  for (const auto& b : partition) {
    if (b.second < 1) throw std::invalid_argument("partition blocks must be nonempty");
    total += b.second;
  }
  if (h.rows() != h.cols() || total != h.rows())
    throw std::invalid_argument("partition does not cover the matrix");
  std::vector<int> block(static_cast<size_t>(total));
  int at = 0;
  int id = 0;
  for (const auto& b : partition) {
    for (int j = 0; j < b.second; ++j) block[static_cast<size_t>(at++)] = id;
    ++id;
  }
  double worst = 0.0;
  for (int r = 0; r < total; ++r)
    for (int s = 0; s < total; ++s)
      if (block[static_cast<size_t>(r)] != block[static_cast<size_t>(s)])
        worst = std::max(worst, std::abs(h(r, s)));
  return worst;
}

Eigen::MatrixXcd predicted_virtual(const ReductionScheme& sc) {
  using K = ReductionScheme::Kind;
  const auto part = scheme_partition(sc);
  int total = 0;
  for (const auto& b : part) total += b.second;
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(total, total);
  int at = 0;
  for (const auto& b : part) {
    for (int j = 0; j + 1 < b.second; ++j) {
      t(at + j, at + j + 1) = -net::t_unit;
      t(at + j + 1, at + j) = -net::t_unit;
    }
    at += b.second;
  }
  if (sc.kind == K::QHalfFlux || sc.kind == K::QFilm) {
    const double mu = (sc.kind == K::QHalfFlux) ? net::t_unit * (sc.n % 2 == 0 ? 1.0 : -1.0)
                                                : net::t_unit * std::cos(sc.Phi);
    t(sc.M + sc.N - 1, sc.M + sc.N - 1) = -mu;
    t(sc.M + 2 * sc.N - 1, sc.M + 2 * sc.N - 1) = mu;
  }
  for (const auto& vb : declared_bonds_for(sc)) {
    t(vb.r, vb.s) = vb.amplitude;
    t(vb.s, vb.r) = std::conj(vb.amplitude);
  }
  return t;
}

Decomposition reduce_network(const net::Network& nw, const ReductionScheme& sc) {
  Decomposition dec;
  dec.unitary = build_unitary(sc, nw);
  dec.partition = scheme_partition(sc);
  dec.virtual_h = conjugate(nw.matrix(), dec.unitary);
  dec.target = predicted_virtual(sc);
  dec.declared_bonds = declared_bonds_for(sc);
  const Eigen::MatrixXcd diff = dec.virtual_h - dec.target;
  dec.residual = coupling_residual(diff, dec.partition);
  dec.target_deviation = diff.cwiseAbs().maxCoeff();
  for (int r = 0; r < dec.virtual_h.rows(); ++r)
    if (std::abs(dec.virtual_h(r, r)) > 1e-9)
      dec.end_potentials.emplace_back(r, dec.virtual_h(r, r).real());
  return dec;
}

double matching_residual(const net::Network& nw, const ReductionScheme& sc) {
  using K = ReductionScheme::Kind;
  require_layout(nw, sc);
  const double t = net::t_unit;
  switch (sc.kind) {
    case K::Star: {
      const double want = t / std::sqrt(static_cast<double>(sc.m));
      double worst = 0.0;
      for (int p = 1; p <= sc.m; ++p)
        worst = std::max(worst,
                         std::abs(bond_mod(nw, "A", sc.M, "B" + std::to_string(p), 1) - want));
      return worst;
    }
    case K::YBeam:
    case K::QHalfFlux:
    case K::QQuarterFlux:
    case K::QFilm:
      return std::abs(
          std::hypot(bond_mod(nw, "A", sc.M, "B", 1), bond_mod(nw, "A", sc.M, "C", 1)) - t);
    case K::Film:
      return std::abs(
          std::hypot(bond_mod(nw, "A", sc.N, "B", sc.N), potential_at(nw, "A", sc.N)) - t);
    case K::IferomHalf:
    case K::IferomInt:
    case K::IferomEqual: {
      const double in = std::abs(
          std::hypot(bond_mod(nw, "A", sc.M, "B", 1), bond_mod(nw, "A", sc.M, "C", 1)) - t);
      const double out = std::abs(
          std::hypot(bond_mod(nw, "B", sc.N, "D", 1), bond_mod(nw, "C", sc.N, "D", 1)) - t);
      return std::max(in, out);
    }
    case K::YComplex:
      return std::abs(
          std::hypot(bond_mod(nw, "A", sc.L, "B", 1), bond_mod(nw, "A", sc.L, "C", 1)) - t);
  }
  throw std::logic_error("unknown scheme kind");
}

double virtual_evolution_oracle(const net::Network& nw, const ReductionScheme& sc,
                                const Eigen::VectorXcd& psi0, double tau) {
  if (psi0.size() != nw.size())
    throw std::invalid_argument("state dimension does not match the network");
  const Decomposition dec = reduce_network(nw, sc);
  if (dec.residual > 1e-12)
    throw std::invalid_argument("scheme does not decouple this network, residual " +
                                std::to_string(dec.residual));
  const auto spec = dynamics::eigendecompose(net::hamiltonian(nw));
  const dynamics::StateVector direct = dynamics::evolve(spec, dynamics::StateVector{psi0}, tau);

  net::HermitianMatrix target(dec.target);
  const auto vspec = dynamics::eigendecompose(target);
  const dynamics::StateVector mapped{dec.unitary.u * psi0};
  const dynamics::StateVector evolved = dynamics::evolve(vspec, mapped, tau);
  const Eigen::VectorXcd back = dec.unitary.u.adjoint() * evolved.amp;
  return (direct.amp - back).norm();
}

net::Network scheme_network(const ReductionScheme& sc, net::Gauge gauge,
                            std::optional<double> phi) {
  using K = ReductionScheme::Kind;
  const double t = net::t_unit;
  auto maybe_joint = [](std::vector<net::JointSpec>& js, net::SiteRef a, net::SiteRef b,
                        Complex amp) {
    if (std::abs(amp) > 1e-15) js.push_back({a, b, amp});
  };
  switch (sc.kind) {
    case K::Star: {
      std::vector<net::ChainSpec> chains{{"A", sc.M, 1.0}};
      std::vector<net::JointSpec> joints;
      const double tn = t / std::sqrt(static_cast<double>(sc.m));
      for (int p = 1; p <= sc.m; ++p) {
        const std::string arm = "B" + std::to_string(p);
        chains.push_back({arm, sc.N, 1.0});
        joints.push_back({{"A", sc.M}, {arm, 1}, tn});
      }
      return net::build_network(chains, joints);
    }
    case K::YBeam: {
      std::vector<net::ChainSpec> chains{{"A", sc.M, 1.0}, {"B", sc.N, 1.0}, {"C", sc.N, 1.0}};
      std::vector<net::JointSpec> joints;
      maybe_joint(joints, {"A", sc.M}, {"B", 1}, t * std::cos(sc.theta));
      maybe_joint(joints, {"A", sc.M}, {"C", 1}, t * std::sin(sc.theta));
      return net::build_network(chains, joints);
    }
    case K::QHalfFlux:
    case K::QQuarterFlux:
    case K::QFilm: {
      std::vector<net::ChainSpec> chains{{"A", sc.M, 1.0}, {"B", sc.N, 1.0}, {"C", sc.N, 1.0}};
      std::vector<net::JointSpec> joints;
      maybe_joint(joints, {"A", sc.M}, {"B", 1}, t * std::cos(sc.theta));
      maybe_joint(joints, {"A", sc.M}, {"C", 1}, t * std::sin(sc.theta));
      joints.push_back({{"B", sc.N}, {"C", sc.N}, t});
      net::Network nw = net::build_network(chains, joints);
      return net::thread_loop_flux(nw, q_loop(nw, sc.M, sc.N), phi.value_or(sc.Phi / (2 * kPi)),
                                   gauge);
    }
    case K::Film:
      return net::film_network(sc.N, sc.Phi);
    case K::IferomHalf:
    case K::IferomInt:
    case K::IferomEqual: {
      std::vector<net::ChainSpec> chains{
          {"A", sc.M, 1.0}, {"B", sc.N, 1.0}, {"C", sc.N, 1.0}, {"D", sc.L, 1.0}};
      std::vector<net::JointSpec> joints;
      const double c = std::cos(sc.theta);
      const double s = std::sin(sc.theta);
      maybe_joint(joints, {"A", sc.M}, {"B", 1}, t * c);
      maybe_joint(joints, {"A", sc.M}, {"C", 1}, t * s);
      const double bd = (sc.kind == K::IferomInt) ? t * c : t * s;
      const double cd = (sc.kind == K::IferomInt) ? t * s : t * c;
      maybe_joint(joints, {"B", sc.N}, {"D", 1}, bd);
      maybe_joint(joints, {"C", sc.N}, {"D", 1}, cd);
      net::Network nw = net::build_network(chains, joints);
      return net::thread_loop_flux(nw, iferom_loop(nw, sc.M, sc.N),
                                   phi.value_or(sc.Phi / (2 * kPi)), gauge);
    }
    case K::YComplex: {
      std::vector<net::ChainSpec> chains{{"A", sc.L, 1.0}, {"B", sc.N, 1.0}, {"C", sc.N, 1.0}};
      std::vector<net::JointSpec> joints;
      const double c = std::cos(sc.Phi / 2);
      const double s = std::sin(sc.Phi / 2);
      const Complex e = std::exp(-kI * (sc.Phi / 2));
      maybe_joint(joints, {"A", sc.L}, {"B", 1}, t * e * c);
      maybe_joint(joints, {"A", sc.L}, {"C", 1}, kI * t * e * s);
      return net::build_network(chains, joints);
    }
  }
  throw std::logic_error("unknown scheme kind");
}

}  // namespace blochnet::reduce
