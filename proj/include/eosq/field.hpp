#ifndef EOSQ_FIELD_HPP
#define EOSQ_FIELD_HPP

#include <functional>
#include <vector>

#include "spectral.hpp"

namespace eosq {

using IndexFn = std::function<double(double)>;

inline IndexFn unit_index() {
  return [](double) { return 1.0; };
}

// Positive-frequency coefficients of the electric field operator at (t, x).
inline SpectralMode electric_mode_at(double t, double x, const IndexFn& n, const FrequencyGrid& grid,
                                     const PhysicalConstants& pc) {
  pc.validate();
  SpectralMode m(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double w = grid.omega(k);
    double nw = n(w);
    if (!(nw > 0) || !std::isfinite(nw)) throw DomainError("refractive index must be positive");
    double amp = std::sqrt(pc.hbar * w * pc.c / (4.0 * kPi * nw * pc.cross_section_A));
    double ph = -w * (t - nw * x / pc.c);
    m.coeffs()[static_cast<Eigen::Index>(k)] = cplx(0, -1) * amp * std::polar(1.0, ph);
  }
  return m;
}

inline SpectralMode hilbert_of(const SpectralMode& m) { return m * cplx(0, 1); }

inline SpectralMode lowpass(const SpectralMode& m, double omega_m) {
  SpectralMode out = m;
  for (std::size_t k = m.grid().count_at_or_below(omega_m); k < m.size(); ++k)
    out.coeffs()[static_cast<Eigen::Index>(k)] = 0.0;
  return out;
}

inline void check_band(double omega_m, const FrequencyGrid& grid) {
  if (!(omega_m > 0)) throw RangeError("band limit must be positive");
  if (omega_m > grid.omega_max() * (1 + 1e-12)) throw RangeError("band limit exceeds grid support");
}

inline SpectralMode bandlimited_E(double t, double omega_m, const FrequencyGrid& grid,
                                  const PhysicalConstants& pc = PhysicalConstants::natural(),
                                  const IndexFn& n = unit_index()) {
  check_band(omega_m, grid);
  return lowpass(electric_mode_at(t, 0.0, n, grid, pc), omega_m);
}

inline SpectralMode bandlimited_H(double t, double omega_m, const FrequencyGrid& grid,
                                  const PhysicalConstants& pc = PhysicalConstants::natural(),
                                  const IndexFn& n = unit_index()) {
  return hilbert_of(bandlimited_E(t, omega_m, grid, pc, n));
}

struct Waveform {
  std::vector<double> real;
  std::vector<cplx> analytic;
};

// w(t) = sum_k c_k e^{i w_k t} dw; the real waveform adds the mirrored
// negative-frequency half, 2 Re w(t). With this pairing a mode built at t0
// peaks at t0.
inline Waveform time_waveform(const SpectralMode& m, const std::vector<double>& t) {
  Waveform out;
  out.real.reserve(t.size());
  out.analytic.reserve(t.size());
  const auto& g = m.grid();
  for (double ti : t) {
    cplx s = 0;
    for (std::size_t k = 0; k < m.size(); ++k) s += m[k] * std::polar(1.0, g.omega(k) * ti);
    s *= g.delta_omega();
    out.analytic.push_back(s);
    out.real.push_back(2.0 * s.real());
  }
  return out;
}

// Temporal kernel of a mode against the bare field: coefficients divided by
// those of the electric field at t = 0, so E_BL(t0) renders as a band-limited
// delta centred on t0 and H_BL as its odd partner.
inline Waveform field_kernel(const SpectralMode& m, const std::vector<double>& t,
                             const PhysicalConstants& pc = PhysicalConstants::natural(),
                             const IndexFn& n = unit_index()) {
  SpectralMode ref = electric_mode_at(0.0, 0.0, n, m.grid(), pc);
  SpectralMode k(m.grid());
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto e = static_cast<Eigen::Index>(i);
    k.coeffs()[e] = m.coeffs()[e] / ref.coeffs()[e];
  }
  return time_waveform(k, t);
}

}  // namespace eosq

#endif
