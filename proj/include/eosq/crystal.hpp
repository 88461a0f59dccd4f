#ifndef EOSQ_CRYSTAL_HPP
#define EOSQ_CRYSTAL_HPP

#include <algorithm>
#include <cmath>

#include "field.hpp"

namespace eosq {

// n^2 = a + b l^2 / (l^2 - c), l in micrometres (ZnTe: Marple).
struct SellmeierIndex {
  double a = 4.27;
  double b = 3.01;
  double c_um2 = 0.142;
  double operator()(double omega) const {
    double lam = 2.0 * kPi * kSpeedOfLight / omega * 1e6;
    double l2 = lam * lam;
    return std::sqrt(a + b * l2 / (l2 - c_um2));
  }
};

// n = c0 + c1 f + c2 f^2, f in THz.
struct QuadraticIndex {
  double c0 = 2.74537877;
  double c1 = -4.22583767e-4;
  double c2 = 1.89356886e-6;
  double operator()(double omega) const {
    double f = to_thz(omega);
    return c0 + c1 * f + c2 * f * f;
  }
};

// Slowly varying MIR index: linear from n_low at DC to n_high at f_span, flat beyond.
struct RampIndex {
  double n_low = 2.55;
  double n_high = 2.59;
  double f_span_thz = 40.0;
  double operator()(double omega) const {
    double x = std::clamp(to_thz(omega) / f_span_thz, 0.0, 1.0);
    return n_low + (n_high - n_low) * x;
  }
};

struct CrystalParams {
  double length_L = 7e-6;
  double r41 = 4e-12;
  IndexFn n_mir = RampIndex{};
  IndexFn n_nir = SellmeierIndex{};
  bool phase_matching = true;

  // d = -n^4 r41 and lambda = A eps0 d / 2 with n taken at the probe carrier.
  double d_eff(double omega_probe) const {
    double n = n_nir(omega_probe);
    return -n * n * n * n * r41;
  }
  double lambda_coupling(const PhysicalConstants& pc, double omega_probe) const {
    return pc.cross_section_A * pc.epsilon_0 * d_eff(omega_probe) / 2.0;
  }

  void validate() const {
    if (!(length_L > 0)) throw DomainError("crystal length must be positive");
    if (!std::isfinite(r41)) throw DomainError("r41 must be finite");
    if (!n_mir || !n_nir) throw DomainError("crystal needs MIR and NIR index models");
  }

  void check_index(const IndexFn& n, double lo, double hi, const char* what) const {
    for (int i = 0; i <= 16; ++i) {
      double w = lo + (hi - lo) * i / 16.0;
      if (w <= 0) continue;
      double v = n(w);
      if (!(v > 1.0 && v < 4.0)) throw DomainError(std::string(what) + " refractive index leaves (1, 4)");
    }
  }
};

}  // namespace eosq

#endif
