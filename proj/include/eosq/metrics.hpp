#ifndef EOSQ_METRICS_HPP
#define EOSQ_METRICS_HPP

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "chain.hpp"
#include "field.hpp"

namespace eosq {

struct Coupling {
  double theta_bl;
  double theta_full;
};

// Signal-band weight in units of the readout's shot noise: theta_bl over
// w <= omega_m, theta_full over the whole signal band.
inline Coupling coupling_intensity(const DetectionOperator& op, double omega_m) {
  double shot = op.shot_weight();
  if (!(shot > 0)) shot = 1.0;
  double edge = op.signal_edge() > 0 ? op.signal_edge() : 2.0 * op.grid().omega_max();
  const FrequencyGrid& g = op.grid();
  std::size_t kb = std::min(g.count_at_or_below(omega_m), g.count_below(edge));
  double bl = 0;
  for (std::size_t k = 0; k < kb; ++k) bl += std::norm(op.a_coeffs()[static_cast<Eigen::Index>(k)]);
  bl *= g.delta_omega();
  return {bl / shot, std::max(op.signal_weight(), bl) / shot};
}

// |Re <target, a>| / sqrt(|target|^2 |a|^2), both restricted to w <= omega_m.
inline double mode_matching(const DetectionOperator& op, const SpectralMode& target, double omega_m) {
  if (target.grid() != op.grid()) throw ShapeError("target and operator live on different grids");
  std::size_t kb = op.grid().count_at_or_below(omega_m);
  if (op.signal_edge() > 0) kb = std::min(kb, op.grid().count_below(op.signal_edge()));
  auto n = static_cast<Eigen::Index>(kb);
  const CVec& a = op.a_coeffs();
  const CVec& t = target.coeffs();
  double ta = t.head(n).squaredNorm(), aa = a.head(n).squaredNorm();
  if (!(ta > 0) || !(aa > 0)) throw UndefinedMatchingError("zero band-limited weight; mode matching undefined");
  double ov = t.head(n).dot(a.head(n)).real();
  return std::min(1.0, std::abs(ov) / std::sqrt(ta * aa));
}

enum class Quadrature { E, H };
enum class Constraint { constant_photon_number, constant_intensity };

inline std::string to_string(Quadrature q) { return q == Quadrature::E ? "E" : "H"; }
inline std::string to_string(Constraint c) {
  return c == Constraint::constant_photon_number ? "constant_photon_number" : "constant_intensity";
}

// Builds a unit-norm probe of the given bandwidth (rad/s) carrying `photons`.
using ProbeFamily = std::function<ProbePulse(double bandwidth, double photons)>;

struct SweepConfig {
  CrystalParams crystal;
  PortConfig ports;
  ChainOptions chain;
  double photon_number = 5e9;
  // Bandwidth whose peak intensity defines the constant-intensity budget and
  // whose mode matching sets the default floor.
  double full_bandwidth = thz(240.0);
  double omega_m = thz(40.0);
  double sample_time = 0.0;
};

inline double photons_for(Constraint c, double bandwidth, const SweepConfig& cfg) {
  if (c == Constraint::constant_photon_number) return cfg.photon_number;
  return cfg.photon_number * cfg.full_bandwidth / bandwidth;
}

inline SpectralMode target_mode(Quadrature q, const FrequencyGrid& grid, double omega_m, double t = 0.0) {
  return q == Quadrature::E ? bandlimited_E(t, omega_m, grid) : bandlimited_H(t, omega_m, grid);
}

struct SweepPoint {
  double bandwidth = 0;
  double theta_bl = 0;
  double theta_full = 0;
  double gamma = 0;
  bool valid = false;
  std::string error;
};

struct SweepResult {
  std::vector<double> bandwidths;
  std::vector<double> theta_bl;
  std::vector<double> theta_full;
  std::vector<double> gamma;
  std::vector<bool> valid;
  Constraint constraint = Constraint::constant_photon_number;
  Quadrature quadrature = Quadrature::E;

  std::size_t size() const { return bandwidths.size(); }
};

inline SweepPoint evaluate_point(Quadrature q, Constraint c, double bandwidth, const ProbeFamily& family,
                                 const SweepConfig& cfg) {
  SweepPoint pt;
  pt.bandwidth = bandwidth;
  try {
    ProbePulse probe = family(bandwidth, photons_for(c, bandwidth, cfg));
    DetectionOperator op = q == Quadrature::E
                               ? detected_E_operator(probe, cfg.crystal, cfg.ports, cfg.sample_time, cfg.chain)
                               : detected_H_operator(probe, cfg.crystal, cfg.ports, cfg.sample_time, cfg.chain);
    Coupling th = coupling_intensity(op, cfg.omega_m);
    pt.theta_bl = th.theta_bl;
    pt.theta_full = th.theta_full;
    pt.gamma = mode_matching(op, target_mode(q, probe.grid(), cfg.omega_m, cfg.sample_time), cfg.omega_m);
    pt.valid = true;
  } catch (const RangeError& e) {
    pt.error = e.what();
  }
  return pt;
}

inline SweepResult bandwidth_sweep(Quadrature q, Constraint c, const std::vector<double>& bandwidths,
                                   const ProbeFamily& family, const SweepConfig& cfg) {
  for (std::size_t i = 1; i < bandwidths.size(); ++i)
    if (!(bandwidths[i] > bandwidths[i - 1])) throw ConfigError("bandwidth list must be strictly increasing");
  SweepResult r;
  r.constraint = c;
  r.quadrature = q;
  for (double b : bandwidths) {
    SweepPoint p = evaluate_point(q, c, b, family, cfg);
    r.bandwidths.push_back(b);
    r.theta_bl.push_back(p.theta_bl);
    r.theta_full.push_back(p.theta_full);
    r.gamma.push_back(p.gamma);
    r.valid.push_back(p.valid);
  }
  return r;
}

inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  std::vector<double> v;
  if (n == 1) return {lo};
  for (std::size_t i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return v;
}

// Golden-section search for a maximum of f on [a, b].
template <class F>
std::pair<double, double> golden_section_max(F&& f, double a, double b, double tol) {
  const double gr = (1 + std::sqrt(5.0)) / 2;
  double c = b - (b - a) / gr, d = a + (b - a) / gr;
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) / gr;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) / gr;
      fd = f(d);
    }
  }
  return fc >= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

enum class FloorMode { full_band_reference, explicit_value };

struct Optimum {
  double bandwidth;
  double theta;
  double gamma;
  double gamma_floor;
};

// Maximise theta_bl subject to gamma >= floor over sweep points up to the full
// band, then refine around the best feasible point.
inline Optimum optimize_bandwidth(Quadrature q, Constraint c, FloorMode mode, const ProbeFamily& family,
                                  const SweepConfig& cfg, const std::vector<double>& bandwidths,
                                  double explicit_floor = 0.0, double tol = thz(0.05)) {
  double floor = explicit_floor;
  if (mode == FloorMode::full_band_reference) {
    SweepPoint ref = evaluate_point(q, c, cfg.full_bandwidth, family, cfg);
    if (!ref.valid) throw RangeError("full-band reference point is not realisable: " + ref.error);
    floor = ref.gamma;
  }
  std::vector<SweepPoint> pts;
  for (double b : bandwidths)
    if (b <= cfg.full_bandwidth * (1 + 1e-12)) pts.push_back(evaluate_point(q, c, b, family, cfg));
  if (mode == FloorMode::full_band_reference && (pts.empty() || pts.back().bandwidth < cfg.full_bandwidth * (1 - 1e-12)))
    pts.push_back(evaluate_point(q, c, cfg.full_bandwidth, family, cfg));
  const double slack = 1e-12;
  long best = -1;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i].valid && pts[i].gamma >= floor - slack && (best < 0 || pts[i].theta_bl > pts[best].theta_bl))
      best = static_cast<long>(i);
  if (best < 0) {
    double cb = 0, cg = -1;
    for (const auto& p : pts)
      if (p.valid && p.gamma > cg) {
        cg = p.gamma;
        cb = p.bandwidth;
      }
    throw InfeasibleError("no bandwidth reaches the mode-matching floor", cb, cg);
  }
  Optimum opt{pts[best].bandwidth, pts[best].theta_bl, pts[best].gamma, floor};
  double a = pts[best > 0 ? best - 1 : best].bandwidth;
  double b = pts[static_cast<std::size_t>(best) + 1 < pts.size() ? best + 1 : best].bandwidth;
  if (b > a) {
    auto obj = [&](double bw) {
      SweepPoint p = evaluate_point(q, c, bw, family, cfg);
      if (!p.valid || p.gamma < floor - slack) return -std::numeric_limits<double>::infinity();
      return p.theta_bl;
    };
    auto [bw, th] = golden_section_max(obj, a, b, tol);
    if (th > opt.theta) {
      SweepPoint p = evaluate_point(q, c, bw, family, cfg);
      opt = {bw, p.theta_bl, p.gamma, floor};
    }
  }
  return opt;
}

}  // namespace eosq

#endif
