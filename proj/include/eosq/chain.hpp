#ifndef EOSQ_CHAIN_HPP
#define EOSQ_CHAIN_HPP

#include <Eigen/LU>
#include <string>
#include <utility>
#include <vector>

#include "crystal.hpp"
#include "detection.hpp"
#include "gaussian.hpp"
#include "ports.hpp"
#include "probe.hpp"

namespace eosq {

enum class Evolution { linearized, unitary };

struct ChainOptions {
  double signal_edge = thz(150.0);  // bins below are signal (MIR), above probe (NIR)
  Evolution evolution = Evolution::linearized;
  PhysicalConstants constants = PhysicalConstants::si();
  double neumann_tol = 1e-15;
  int max_iterations = 400;
};

// Discretised chi(2) scattering of probe-band (S-polarised) output bins from
// signal-band bins: s'_j = s_j + sum_k (m_plus(j,k) a_k + m_minus(j,k) a_k^dag),
// sum-frequency and difference-frequency respectively. Rows are NIR bins
// row0 .. row0 + rows - 1, columns are all signal bins.
struct CouplingKernel {
  std::size_t n_signal = 0;
  std::size_t row0 = 0;
  CMat m_plus;
  CMat m_minus;
  std::vector<std::string> warnings;

  std::size_t rows() const { return static_cast<std::size_t>(m_plus.rows()); }
  double spectral_norm_bound() const {
    return std::sqrt(m_plus.squaredNorm()) + std::sqrt(m_minus.squaredNorm());
  }
};

namespace detail {

inline double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

inline double field_prefactor(double w, double n, const PhysicalConstants& pc) {
  return std::sqrt(pc.hbar * w / (4.0 * kPi * pc.epsilon_0 * pc.c * n * pc.cross_section_A));
}

}  // namespace detail

// Rows [row_begin, row_end) of the coupling; pass the full NIR range for the
// exact transform, or the probe support when only a first-order readout is needed.
inline CouplingKernel coupling_kernel(const ProbePulse& probe, const CrystalParams& crystal, const ChainOptions& opt,
                                      std::size_t row_begin, std::size_t row_end) {
  crystal.validate();
  opt.constants.validate();
  const FrequencyGrid& g = probe.grid();
  const std::size_t n = g.size();
  const double dw = g.delta_omega();
  const PhysicalConstants& pc = opt.constants;
  CouplingKernel kern;
  kern.n_signal = g.count_below(opt.signal_edge);
  if (kern.n_signal == 0 || kern.n_signal >= n) throw ConfigError("signal edge leaves no signal or probe bins");
  row_begin = std::max(row_begin, kern.n_signal);
  row_end = std::min(row_end, n);
  if (row_end < row_begin) row_end = row_begin;
  kern.row0 = row_begin;
  const std::size_t ns = kern.n_signal, nr = row_end - row_begin;
  kern.m_plus = CMat::Zero(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(ns));
  kern.m_minus = CMat::Zero(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(ns));

  auto [lo, hi] = probe.support();
  if (hi == 0) return kern;
  if (lo < ns) kern.warnings.push_back("probe spectrum overlaps the signal band; self-mixing is not modelled");

  const double wc = probe.central_frequency > 0 ? probe.central_frequency : g.omega((lo + hi) / 2);
  const double K = 2.0 * kPi * crystal.length_L * crystal.lambda_coupling(pc, wc) / pc.hbar;
  if (K == 0.0 || nr == 0) return kern;
  const double L = crystal.length_L;

  // Probe values are needed at w_j -/+ W_k = m dw, the bin edges m in [lo, hi].
  const long m0 = static_cast<long>(lo), m1 = static_cast<long>(hi);
  std::vector<cplx> alpha(static_cast<std::size_t>(m1 - m0 + 1));
  std::vector<double> pref_e(alpha.size()), kv_e(alpha.size());
  for (long m = m0; m <= m1; ++m) {
    auto i = static_cast<std::size_t>(m - m0);
    double w = static_cast<double>(m) * dw;
    alpha[i] = probe.amplitude_at_edge(m);
    if (w <= 0 || alpha[i] == cplx(0)) continue;
    double nw = crystal.n_nir(w);
    if (!(nw > 1.0 && nw < 4.0)) throw DomainError("NIR refractive index leaves (1, 4) inside the probe band");
    pref_e[i] = detail::field_prefactor(w, nw, pc);
    kv_e[i] = nw * w / pc.c;
  }
  std::vector<double> pref_s(ns), kv_s(ns);
  for (std::size_t k = 0; k < ns; ++k) {
    double w = g.omega(k), nw = crystal.n_mir(w);
    if (!(nw > 1.0 && nw < 4.0)) throw DomainError("MIR refractive index leaves (1, 4)");
    pref_s[k] = detail::field_prefactor(w, nw, pc);
    kv_s[k] = nw * w / pc.c;
  }

  for (std::size_t r = 0; r < nr; ++r) {
    const std::size_t j = row_begin + r;
    const long jl = static_cast<long>(j);
    // Skip rows no probe edge can reach.
    if (jl - static_cast<long>(ns) + 1 > m1 && jl + 1 > m1) continue;
    if (jl < m0 && jl + static_cast<long>(ns) < m0) continue;
    const double w = g.omega(j);
    const double nw = crystal.n_nir(w);
    if (!(nw > 1.0 && nw < 4.0)) throw DomainError("NIR refractive index leaves (1, 4)");
    const double pj = detail::field_prefactor(w, nw, pc), kj = nw * w / pc.c;
    for (std::size_t k = 0; k < ns; ++k) {
      const long ms = jl - static_cast<long>(k);
      if (ms >= m0 && ms <= m1) {
        auto i = static_cast<std::size_t>(ms - m0);
        if (alpha[i] != cplx(0)) {
          double pm = crystal.phase_matching ? detail::sinc((kj - kv_e[i] - kv_s[k]) * L / 2) : 1.0;
          kern.m_plus(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
              -2.0 * K * pm * pj * pref_e[i] * pref_s[k] * dw * alpha[i];
        }
      }
      const long md = jl + static_cast<long>(k) + 1;
      if (md >= m0 && md <= m1) {
        auto i = static_cast<std::size_t>(md - m0);
        if (alpha[i] != cplx(0)) {
          double pm = crystal.phase_matching ? detail::sinc((kj - kv_e[i] + kv_s[k]) * L / 2) : 1.0;
          kern.m_minus(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
              2.0 * K * pm * pj * pref_e[i] * pref_s[k] * dw * alpha[i];
        }
      }
    }
  }
  return kern;
}

inline CouplingKernel coupling_kernel(const ProbePulse& probe, const CrystalParams& crystal, const ChainOptions& opt) {
  return coupling_kernel(probe, crystal, opt, 0, probe.grid().size());
}

// Full transform on every grid bin via the Cayley map of the first-order
// generator, which is exactly symplectic and agrees with the Dyson series to
// second order.
inline BogoliubovTransform interaction_kernel(const ProbePulse& probe, const CrystalParams& crystal,
                                              const ChainOptions& opt = {},
                                              std::vector<std::string>* warnings = nullptr) {
  CouplingKernel kern = coupling_kernel(probe, crystal, opt);
  if (warnings) *warnings = kern.warnings;
  const auto n = static_cast<Eigen::Index>(probe.grid().size());
  CMat x11 = CMat::Zero(n, n), x12 = CMat::Zero(n, n);
  const auto r0 = static_cast<Eigen::Index>(kern.row0), nr = static_cast<Eigen::Index>(kern.rows()),
             ns = static_cast<Eigen::Index>(kern.n_signal);
  x11.block(r0, 0, nr, ns) = kern.m_plus;
  x11.block(0, r0, ns, nr) = -kern.m_plus.adjoint();
  x12.block(r0, 0, nr, ns) = kern.m_minus;
  x12.block(0, r0, ns, nr) = kern.m_minus.transpose();
  CMat x(2 * n, 2 * n);
  x << x11, x12, x12.conjugate(), x11.conjugate();
  CMat id = CMat::Identity(2 * n, 2 * n);
  CMat t = (id - 0.5 * x).partialPivLu().solve(id + 0.5 * x);
  return BogoliubovTransform(t.topLeftCorner(n, n), t.topRightCorner(n, n));
}

namespace detail {

struct PortWeights {
  CVec w;  // discrete readout weights on output bins, unit shot noise
  double photons = 0;
  double offset = 0;
};

inline PortWeights port_weights(const ProbePulse& probe, const std::vector<Port>& ports) {
  const FrequencyGrid& g = probe.grid();
  const double dw = g.delta_omega();
  PortWeights pw;
  pw.w = CVec::Zero(static_cast<Eigen::Index>(g.size()));
  if (ports.empty()) throw ConfigError("readout has no ports");
  double coherent = 0;
  for (const auto& p : ports) {
    cplx q = p.sign * p.quadrature();
    double np = 0;
    for (std::size_t k = g.count_below(p.omega_min); k < g.count_below(p.omega_max); ++k) {
      cplx a = probe.amplitude(k) * std::sqrt(dw);
      np += std::norm(a);
      pw.w[static_cast<Eigen::Index>(k)] = q * std::conj(a);
    }
    pw.photons += np;
    coherent += p.sign * p.imbalance() * np;
  }
  if (!(pw.photons > 0)) throw ConfigError("readout ports receive no probe light");
  pw.w /= std::sqrt(pw.photons);
  pw.offset = coherent / std::sqrt(pw.photons) / std::sqrt(2.0);
  return pw;
}

// y = w + F(y)/2, u = y + F(y)/2 with F the first half of X^T acting on (y, conj y).
inline CVec heisenberg_unitary(const CouplingKernel& kern, const CVec& w, const ChainOptions& opt) {
  const auto r0 = static_cast<Eigen::Index>(kern.row0), nr = static_cast<Eigen::Index>(kern.rows()),
             ns = static_cast<Eigen::Index>(kern.n_signal);
  auto apply_f = [&](const CVec& y) {
    CVec f = CVec::Zero(y.size());
    CVec yn = y.segment(r0, nr), ym = y.head(ns);
    f.segment(r0, nr) = kern.m_minus.conjugate() * ym.conjugate() - kern.m_plus.conjugate() * ym;
    f.head(ns) = kern.m_minus.adjoint() * yn.conjugate() + kern.m_plus.transpose() * yn;
    return f;
  };
  CVec y = w;
  const double scale = std::max(w.norm(), 1e-300);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    CVec next = w + 0.5 * apply_f(y);
    double d = (next - y).norm();
    y = std::move(next);
    if (d <= opt.neumann_tol * scale) break;
  }
  if (it == opt.max_iterations) throw InvariantError("Heisenberg solve did not converge; coupling too strong");
  return y + 0.5 * apply_f(y);
}

}  // namespace detail

// Balanced readout summed over the given ports and normalised by their total
// probe photon number.
inline DetectionOperator detect_readout(const ProbePulse& probe, const CrystalParams& crystal,
                                        const std::vector<Port>& ports, const ChainOptions& opt = {}) {
  const FrequencyGrid& g = probe.grid();
  PortConfig{ports}.validate(g);
  detail::PortWeights pw = detail::port_weights(probe, ports);
  CVec u;
  if (opt.evolution == Evolution::linearized) {
    std::size_t lo = g.size(), hi = 0;
    for (std::size_t k = 0; k < g.size(); ++k)
      if (pw.w[static_cast<Eigen::Index>(k)] != cplx(0)) {
        lo = std::min(lo, k);
        hi = k + 1;
      }
    CouplingKernel kern = coupling_kernel(probe, crystal, opt, lo, hi);
    u = pw.w;
    CVec wr = pw.w.segment(static_cast<Eigen::Index>(kern.row0), static_cast<Eigen::Index>(kern.rows()));
    u.head(static_cast<Eigen::Index>(kern.n_signal)) +=
        kern.m_plus.transpose() * wr + (kern.m_minus.transpose() * wr).conjugate();
  } else {
    CouplingKernel kern = coupling_kernel(probe, crystal, opt);
    u = detail::heisenberg_unitary(kern, pw.w, opt);
  }
  DetectionOperator op(SpectralMode(g, u / std::sqrt(g.delta_omega())), pw.photons, opt.signal_edge);
  op.set_offset(pw.offset);
  if (pw.w.squaredNorm() > 0) op.set_probe_reference(pw.w.squaredNorm());
  return op;
}

// Port weights alone, as density coefficients: the readout's action on an
// auxiliary vacuum entering the probe bins.
inline CVec readout_vacuum_coeffs(const ProbePulse& probe, const std::vector<Port>& ports) {
  return detail::port_weights(probe, ports).w / std::sqrt(probe.grid().delta_omega());
}

inline DetectionOperator detected_E_operator(const ProbePulse& probe, const CrystalParams& crystal,
                                             const PortConfig& ports, double t, const ChainOptions& opt = {}) {
  auto p = ports.readout("E");
  if (p.empty()) throw ConfigError("no port assigned to the E readout");
  return detect_readout(probe.delayed_to(t), crystal, p, opt);
}

inline DetectionOperator detected_H_operator(const ProbePulse& probe, const CrystalParams& crystal,
                                             const PortConfig& ports, double t, const ChainOptions& opt = {}) {
  auto p = ports.readout("H");
  if (p.empty()) throw ConfigError("no port assigned to the H readout");
  return detect_readout(probe.delayed_to(t), crystal, p, opt);
}

inline std::pair<DetectionOperator, DetectionOperator> multiplexed_EH(const ProbePulse& probe,
                                                                      const CrystalParams& crystal,
                                                                      const PortConfig& ports, double t,
                                                                      const ChainOptions& opt = {}) {
  ports.validate(probe.grid());
  auto e = detected_E_operator(probe, crystal, ports, t, opt);
  auto h = detected_H_operator(probe, crystal, ports, t, opt);
  double c = commutator_im(e, h);
  if (opt.evolution == Evolution::unitary && std::abs(c) > 1e-10)
    throw InvariantError("multiplexed E and H readouts fail to commute");
  return {e, h};
}

// X(phi) readout: probe band split at its carrier, each half analysed with a
// half- and quarter-wave pair so the lower port reads -i e^{-i phi} and the upper
// -i e^{+i phi}.
inline PortConfig phase_ports(const ProbePulse& probe, double phi, const ChainOptions& opt = {}) {
  const FrequencyGrid& g = probe.grid();
  double wc = probe.central_frequency;
  if (!(wc > opt.signal_edge && wc < g.omega_max())) throw ConfigError("probe carrier outside the probe band");
  cplx ql = cplx(0, -1) * std::polar(1.0, -phi), qu = cplx(0, -1) * std::polar(1.0, phi);
  PortConfig cfg;
  cfg.ports.push_back({opt.signal_edge, wc, plates_for_quadrature(ql), 1.0, "X"});
  cfg.ports.push_back({wc, g.omega_max(), plates_for_quadrature(qu), 1.0, "X"});
  return cfg;
}

inline DetectionOperator arbitrary_phase_quadrature(const ProbePulse& probe, const CrystalParams& crystal, double phi,
                                                    double t, const ChainOptions& opt = {}) {
  return detect_readout(probe.delayed_to(t), crystal, phase_ports(probe, phi, opt).readout("X"), opt);
}

// Share of the probe sent to the H arm so that T_H / T_E = theta_E / theta_H.
inline double balanced_transmission(double theta_e, double theta_h) {
  if (!(theta_e > 0 && theta_h > 0)) throw DomainError("coupling intensities must be positive");
  return theta_e / (theta_e + theta_h);
}

// Post-crystal NIR split on a beam splitter: a fraction t_h of the power goes to
// the H arm, the rest to the E arm; the open port adds a shared vacuum.
inline std::pair<DetectionOperator, DetectionOperator> beam_splitter_variant(
    const ProbePulse& probe, const CrystalParams& crystal, double transmission, double t,
    const PortConfig& e_arm, const PortConfig& h_arm, const ChainOptions& opt = {}) {
  if (!(transmission > 0 && transmission < 1)) throw RangeError("beam splitter transmission must lie in (0, 1)");
  ProbePulse p = probe.delayed_to(t);
  auto pe = e_arm.readout("E"), ph = h_arm.readout("H");
  if (pe.empty() || ph.empty()) throw ConfigError("beam splitter arms need E and H readouts");
  DetectionOperator oe = detect_readout(p, crystal, pe, opt);
  DetectionOperator oh = detect_readout(p, crystal, ph, opt);
  const double te = std::sqrt(1 - transmission), th = std::sqrt(transmission);
  DetectionOperator e = oe.scaled(te);
  e.set_aux(th * readout_vacuum_coeffs(p, pe));
  DetectionOperator h = oh.scaled(th);
  h.set_aux(-te * readout_vacuum_coeffs(p, ph));
  return {e, h};
}

}  // namespace eosq

#endif
