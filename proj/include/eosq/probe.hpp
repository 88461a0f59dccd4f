#ifndef EOSQ_PROBE_HPP
#define EOSQ_PROBE_HPP

#include <string>
#include <utility>
#include <vector>

#include "spectral.hpp"

namespace eosq {

enum class ProbeShape { sinc, odd_phase, custom };

inline std::string to_string(ProbeShape s) {
  switch (s) {
    case ProbeShape::sinc: return "sinc";
    case ProbeShape::odd_phase: return "delocalized-odd-phase";
    default: return "custom";
  }
}

// Coherent probe: unit-norm spectral shape, photon number carried separately.
struct ProbePulse {
  SpectralMode spectrum;
  double photon_number = 5e9;
  ProbeShape shape = ProbeShape::custom;
  double central_frequency = 0.0;
  double delay = 0.0;

  ProbePulse(SpectralMode s, double n, ProbeShape sh, double wc, double t = 0.0)
      : spectrum(std::move(s)), photon_number(n), shape(sh), central_frequency(wc), delay(t) {
    validate();
  }

  void validate() const {
    if (!(photon_number > 0)) throw DomainError("probe photon number must be positive");
    if (std::abs(spectrum.norm2() - 1.0) > 1e-9) throw DomainError("probe spectrum must have unit norm");
  }

  const FrequencyGrid& grid() const { return spectrum.grid(); }

  ProbePulse delayed_to(double t) const {
    ProbePulse p = *this;
    p.delay = t;
    return p;
  }
  ProbePulse with_photons(double n) const {
    ProbePulse p = *this;
    p.photon_number = n;
    p.validate();
    return p;
  }

  // Amplitude density sqrt(N) s(w) e^{i w delay} on bin centres.
  cplx amplitude(std::size_t k) const {
    double w = grid().omega(k);
    return std::sqrt(photon_number) * spectrum[k] * std::polar(1.0, w * delay);
  }
  // Same at w = m dw (bin edges), by linear interpolation of the undelayed shape.
  cplx amplitude_at_edge(long m) const {
    long n = static_cast<long>(grid().size());
    cplx lo = (m - 1 >= 0 && m - 1 < n) ? spectrum[static_cast<std::size_t>(m - 1)] : cplx(0);
    cplx hi = (m >= 0 && m < n) ? spectrum[static_cast<std::size_t>(m)] : cplx(0);
    double w = static_cast<double>(m) * grid().delta_omega();
    return std::sqrt(photon_number) * 0.5 * (lo + hi) * std::polar(1.0, w * delay);
  }

  // First and one-past-last bin with non-zero amplitude.
  std::pair<std::size_t, std::size_t> support() const {
    std::size_t lo = spectrum.size(), hi = 0;
    for (std::size_t k = 0; k < spectrum.size(); ++k)
      if (spectrum[k] != cplx(0)) {
        lo = std::min(lo, k);
        hi = k + 1;
      }
    if (hi == 0) lo = 0;
    return {lo, hi};
  }
};

// Rectangular spectrum of width B centred on wc, flat phase.
inline ProbePulse sinc_probe(const FrequencyGrid& grid, double wc, double bandwidth, double photons) {
  if (!(bandwidth > 0)) throw DomainError("probe bandwidth must be positive");
  double lo = wc - bandwidth / 2, hi = wc + bandwidth / 2;
  if (lo <= 0 || hi > grid.omega_max() * (1 + 1e-12)) throw RangeError("probe band leaves the grid");
  SpectralMode s(grid);
  std::size_t k0 = grid.count_below(lo), k1 = grid.count_below(hi);
  if (k1 <= k0) throw RangeError("probe band narrower than one bin");
  for (std::size_t k = k0; k < k1; ++k) s.coeffs()[static_cast<Eigen::Index>(k)] = 1.0;
  return ProbePulse(s.normalized(), photons, ProbeShape::sinc, wc);
}

// Narrow Gaussian carrier plus flat sidebands of total width B, phase +pi/2
// above the carrier and -pi/2 below; carrier_fraction of the photons sit in
// the carrier.
inline ProbePulse odd_phase_probe(const FrequencyGrid& grid, double wc, double bandwidth, double photons,
                                  double carrier_fraction, double carrier_width) {
  if (!(bandwidth > 0) || !(carrier_width > 0)) throw DomainError("probe widths must be positive");
  if (carrier_fraction < 0 || carrier_fraction > 1) throw DomainError("carrier fraction outside [0,1]");
  double lo = wc - bandwidth / 2, hi = wc + bandwidth / 2;
  if (lo <= 0 || hi > grid.omega_max() * (1 + 1e-12)) throw RangeError("probe band leaves the grid");
  SpectralMode car(grid), side(grid);
  std::size_t k0 = grid.count_below(lo), k1 = grid.count_below(hi);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double w = grid.omega(k);
    double x = (w - wc) / carrier_width;
    auto e = static_cast<Eigen::Index>(k);
    car.coeffs()[e] = x * x < 100.0 ? std::exp(-0.5 * x * x) : 0.0;
    if (k >= k0 && k < k1) side.coeffs()[e] = w > wc ? cplx(0, 1) : cplx(0, -1);
  }
  SpectralMode s = car.normalized() * std::sqrt(carrier_fraction);
  if (carrier_fraction < 1) s = s + side.normalized() * std::sqrt(1 - carrier_fraction);
  return ProbePulse(s.normalized(), photons, ProbeShape::odd_phase, wc);
}

// Sum of component probes, each keeping its own photon number.
inline ProbePulse combine_probes(const std::vector<ProbePulse>& parts) {
  if (parts.empty()) throw DomainError("nothing to combine");
  SpectralMode s(parts.front().grid());
  for (const auto& p : parts) s = s + p.spectrum * std::sqrt(p.photon_number);
  double wc = parts.front().central_frequency;
  return ProbePulse(s.normalized(), s.norm2(), ProbeShape::custom, wc);
}

}  // namespace eosq

#endif
