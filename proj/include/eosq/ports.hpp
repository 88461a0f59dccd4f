#ifndef EOSQ_PORTS_HPP
#define EOSQ_PORTS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spectral.hpp"

namespace eosq {

using Jones = Eigen::Matrix2cd;

enum class Waveplate { none, half, quarter };

inline double retardance(Waveplate w) {
  switch (w) {
    case Waveplate::half: return kPi;
    case Waveplate::quarter: return kPi / 2;
    default: return 0.0;
  }
}

struct Retarder {
  Waveplate kind = Waveplate::none;
  double angle = 0.0;  // fast axis from z, rad
};

// Basis (z, s). R(th) diag(1, e^{i G}) R(-th).
inline Jones jones(const Retarder& r) {
  double c = std::cos(r.angle), s = std::sin(r.angle);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;
  Jones d = Jones::Zero();
  d(0, 0) = 1.0;
  d(1, 1) = std::polar(1.0, retardance(r.kind));
  return rot.cast<cplx>() * d * rot.transpose().cast<cplx>();
}

// One spectral channel of the filter bank, analyzed by a Wollaston prism and a
// balanced pair (N_z - N_s), multiplied by sign.
struct Port {
  double omega_min = 0.0;
  double omega_max = 0.0;
  std::vector<Retarder> plates;  // in the order the light meets them
  double sign = 1.0;
  std::string readout = "E";

  Jones jones_matrix() const {
    Jones j = Jones::Identity();
    for (const auto& p : plates) j = jones(p) * j;
    return j;
  }
  // Coefficient of conj(alpha) s in N_z - N_s (before the sign).
  cplx quadrature() const {
    Jones j = jones_matrix();
    return std::conj(j(0, 0)) * j(0, 1) - std::conj(j(1, 0)) * j(1, 1);
  }
  // |J11|^2 - |J21|^2; zero for a balanced port.
  double imbalance() const {
    Jones j = jones_matrix();
    return std::norm(j(0, 0)) - std::norm(j(1, 0));
  }
  bool contains(double w) const { return w >= omega_min && w < omega_max; }
};

inline Port make_port(double lo, double hi, Waveplate w, double angle, const std::string& readout, double sign = 1.0) {
  Port p{lo, hi, {}, sign, readout};
  if (w != Waveplate::none) p.plates.push_back({w, angle});
  return p;
}

// Waveplate pair (half then quarter) whose port reads q = e^{-i psi}.
inline std::vector<Retarder> plates_for_quadrature(cplx q) {
  double psi = -std::arg(q);
  auto wrap = [](double a) {
    a = std::fmod(a, kPi);
    if (a < 0) a += kPi;
    return a >= kPi ? 0.0 : a;
  };
  std::vector<Retarder> v{{Waveplate::half, wrap((kPi / 2 - psi) / 4)}, {Waveplate::quarter, wrap(-psi / 2)}};
  return v;
}

struct PortConfig {
  std::vector<Port> ports;

  std::vector<Port> readout(const std::string& tag) const {
    std::vector<Port> out;
    for (const auto& p : ports)
      if (p.readout == tag) out.push_back(p);
    return out;
  }

  void validate(const FrequencyGrid& grid) const {
    for (std::size_t i = 0; i < ports.size(); ++i) {
      const Port& p = ports[i];
      if (!(p.omega_max > p.omega_min)) throw ConfigError("port band is empty");
      if (p.omega_min < 0 || p.omega_min > grid.omega_max()) throw ConfigError("port band leaves the grid");
      if (grid.count_below(p.omega_max) <= grid.count_below(p.omega_min)) throw ConfigError("port band holds no bins");
      if (p.sign != 1.0 && p.sign != -1.0) throw ConfigError("port sign must be +1 or -1");
      for (const auto& r : p.plates)
        if (r.angle < 0 || r.angle >= kPi) throw ConfigError("waveplate angle outside [0, pi)");
      if (i > 0 && p.omega_min < ports[i - 1].omega_max) {
        if (p.readout != ports[i - 1].readout)
          throw NonCommutingError("ports of different readouts share a band");
        throw ConfigError("ports overlap or are out of order");
      }
    }
  }
};

}  // namespace eosq

#endif
