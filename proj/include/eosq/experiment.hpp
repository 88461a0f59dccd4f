#ifndef EOSQ_EXPERIMENT_HPP
#define EOSQ_EXPERIMENT_HPP

#include <fftw3.h>

#include <optional>
#include <string>
#include <vector>

#include "chain.hpp"
#include "field.hpp"
#include "io/config.hpp"
#include "io/csv.hpp"
#include "io/files.hpp"
#include "io/manifest.hpp"
#include "io/svg.hpp"
#include "metrics.hpp"
#include "moments.hpp"

namespace eosq {

using io::ExperimentConfig;
using io::json;

// Everything the pipelines need, built and validated from a config.
struct Setup {
  FrequencyGrid grid;
  CrystalParams crystal;
  ChainOptions chain;
  double omega_m;
};

inline PortConfig make_ports(const std::vector<io::PortCfg>& ports) {
  PortConfig cfg;
  for (const auto& p : ports) {
    Port q{thz(p.min_thz), thz(p.max_thz), {}, p.sign, p.readout};
    for (const auto& w : p.waveplates) {
      Waveplate kind = io::parse_waveplate(w.type);
      double a = w.angle_deg * kPi / 180.0;
      if (kind != Waveplate::none) q.plates.push_back({kind, a});
    }
    cfg.ports.push_back(q);
  }
  return cfg;
}

inline ProbePulse make_probe(const io::SincProbeCfg& c, const FrequencyGrid& g) {
  return sinc_probe(g, thz(c.center_thz), thz(c.bandwidth_thz), c.photons);
}

inline ProbePulse make_probe(const io::OddProbeCfg& c, const FrequencyGrid& g) {
  return odd_phase_probe(g, thz(c.center_thz), thz(c.bandwidth_thz), c.photons, c.carrier_fraction,
                         thz(c.carrier_width_thz));
}

inline ProbePulse multiplexed_probe(const ExperimentConfig& c, const FrequencyGrid& g) {
  ProbePulse p = combine_probes({make_probe(c.probe.mux_e, g), make_probe(c.probe.mux_h, g)});
  p.central_frequency = thz(c.probe.mux_h.center_thz);
  return p;
}

inline ProbeFamily probe_family(Quadrature q, const ExperimentConfig& c, const FrequencyGrid& g) {
  if (q == Quadrature::E) {
    double wc = thz(c.probe.e.center_thz);
    return [g, wc](double b, double n) { return sinc_probe(g, wc, b, n); };
  }
  io::OddProbeCfg h = c.probe.h;
  return [g, h](double b, double n) {
    return odd_phase_probe(g, thz(h.center_thz), b, n, h.carrier_fraction, thz(h.carrier_width_thz));
  };
}

inline std::vector<double> sweep_bandwidths(const ExperimentConfig& c) {
  if (c.sweep.bandwidths_thz.empty()) return log_spaced(thz(10), thz(400), 40);
  std::vector<double> v;
  for (double b : c.sweep.bandwidths_thz) v.push_back(thz(b));
  return v;
}

// Validates every block before any computation.
inline Setup make_setup(const ExperimentConfig& c) {
  try {
    if (c.grid.n_points < 2 || c.grid.n_points > (1u << 20)) throw ConfigError("grid.n_points must lie in [2, 2^20]");
    if (c.waveforms.n_times > 1000000 || c.tomography.n_times > 1000000)
      throw ConfigError("time scans are limited to 10^6 samples");
    if (c.tomography.husimi_points > 4096) throw ConfigError("tomography.husimi_points is limited to 4096");
    if (c.tomography.shots > 100000000) throw ConfigError("tomography.shots is limited to 10^8");
    if (c.crystal.r41_pm_per_v == 0) throw ConfigError("crystal.r41_pm_per_v must be non-zero");
    Setup s{FrequencyGrid::from_thz(c.grid.omega_max_thz, c.grid.n_points), {}, {}, c.omega_m()};
    s.crystal.length_L = c.crystal.length_um * 1e-6;
    s.crystal.r41 = c.crystal.r41_pm_per_v * 1e-12;
    s.crystal.phase_matching = c.crystal.phase_matching;
    s.crystal.n_mir = c.crystal.mir;
    if (c.crystal.nir_model == "sellmeier") s.crystal.n_nir = c.crystal.sellmeier;
    else if (c.crystal.nir_model == "quadratic") s.crystal.n_nir = c.crystal.quadratic;
    else throw ConfigError("crystal.n_nir.model must be sellmeier or quadratic");
    s.crystal.validate();
    s.chain.signal_edge = thz(c.ports.signal_edge_thz);
    s.chain.constants.cross_section_A = c.crystal.cross_section_um2 * 1e-12;
    s.chain.constants.validate();
    if (!(s.chain.signal_edge > 0 && s.chain.signal_edge < s.grid.omega_max()))
      throw ConfigError("ports.signal_edge_thz must lie inside the grid");
    check_band(s.omega_m, s.grid);
    s.crystal.check_index(s.crystal.n_mir, s.grid.delta_omega(), s.chain.signal_edge, "MIR");
    s.crystal.check_index(s.crystal.n_nir, s.chain.signal_edge, s.grid.omega_max(), "NIR");
    make_probe(c.probe.e, s.grid);
    make_probe(c.probe.h, s.grid);
    multiplexed_probe(c, s.grid);
    make_ports(c.ports.e).validate(s.grid);
    make_ports(c.ports.h).validate(s.grid);
    make_ports(c.ports.multiplexed).validate(s.grid);
    squeezed_signal(thz(c.signal.omega0_thz), thz(c.signal.sigma_thz), c.signal.r, s.grid);
    io::parse_quadrature(c.sweep.quadrature);
    io::parse_constraint(c.sweep.constraint);
    auto bw = sweep_bandwidths(c);
    if (bw.empty()) throw ConfigError("sweep.bandwidths_thz is empty");
    for (std::size_t i = 0; i < bw.size(); ++i)
      if (!(bw[i] > 0) || (i && !(bw[i] > bw[i - 1]))) throw ConfigError("sweep bandwidths must be positive and increasing");
    if (!(c.sweep.full_bandwidth_thz > 0)) throw ConfigError("sweep.full_bandwidth_thz must be positive");
    if (c.waveforms.n_times > 0 && !(c.waveforms.t_max_fs >= c.waveforms.t_min_fs))
      throw ConfigError("waveforms time range is reversed");
    if (c.tomography.n_times < 2 || !(c.tomography.t_max_fs > c.tomography.t_min_fs))
      throw ConfigError("tomography needs at least two increasing times");
    if (c.tomography.husimi_points < 2 || !(c.tomography.husimi_extent > 0))
      throw ConfigError("tomography Husimi grid is degenerate");
    if (c.variant.variant != "phase_scan" && c.variant.variant != "beam_splitter")
      throw ConfigError("variant must be phase_scan or beam_splitter");
    if (c.variant.transmission && !(*c.variant.transmission >= 0 && *c.variant.transmission <= 1))
      throw ConfigError("variant.transmission must lie in [0, 1]");
    for (const auto& f : c.output.formats)
      if (f != "csv" && f != "svg") throw ConfigError("output format must be csv or svg, got '" + f + "'");
    return s;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v;
  if (n == 0) return v;
  if (n == 1) return {a};
  for (std::size_t i = 0; i < n; ++i) v.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return v;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline std::vector<double> unit_peak(std::vector<double> v) {
  double m = max_abs(v);
  if (m > 0)
    for (double& x : v) x /= m;
  return v;
}

// Relative odd (parity = +1) or even (parity = -1) content of samples taken on
// a grid symmetric about t = 0: 0 for a perfectly even (odd) curve.
inline double parity_defect(const std::vector<double>& w, int parity) {
  double num = 0, den = 0;
  std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) {
    num += std::abs(w[i] - parity * w[n - 1 - i]);
    den += std::abs(w[i]) + std::abs(w[n - 1 - i]);
  }
  return den > 0 ? num / den : 0.0;
}

// Signal-band part of a readout, band-limited to omega_m.
inline SpectralMode signal_profile(const DetectionOperator& op, double omega_m) {
  std::size_t kb = op.grid().count_at_or_below(omega_m);
  if (op.signal_edge() > 0) kb = std::min(kb, op.grid().count_below(op.signal_edge()));
  CVec a = CVec::Zero(op.a_coeffs().size());
  a.head(static_cast<Eigen::Index>(kb)) = op.a_coeffs().head(static_cast<Eigen::Index>(kb));
  return SpectralMode(op.grid(), a);
}

struct RunResult {
  io::FileSet files;
  json summary;
  std::optional<InfeasibleError> infeasible;
};

inline std::string svg_if(const ExperimentConfig& c, const io::LinePlot& p) { return c.wants("svg") ? io::render(p) : ""; }

inline void add(RunResult& r, const ExperimentConfig& c, const std::string& name, const std::string& body) {
  bool svg = name.size() > 4 && name.substr(name.size() - 4) == ".svg";
  bool csv = name.size() > 4 && name.substr(name.size() - 4) == ".csv";
  if ((svg && !c.wants("svg")) || (csv && !c.wants("csv"))) return;
  r.files[name] = body;
}

inline std::string operator_csv(const DetectionOperator& op) {
  io::Csv csv({"omega_thz", "re_a", "im_a"});
  for (std::size_t k = 0; k < op.grid().size(); ++k) {
    cplx a = op.a_coeffs()[static_cast<Eigen::Index>(k)];
    csv.row(std::vector<double>{to_thz(op.grid().omega(k)), a.real(), a.imag()});
  }
  return csv.str();
}

inline RunResult run_waveforms(const ExperimentConfig& c) {
  Setup s = make_setup(c);
  RunResult r;
  std::vector<double> t = linspace(fs(c.waveforms.t_min_fs), fs(c.waveforms.t_max_fs), c.waveforms.n_times);
  auto ke = field_kernel(bandlimited_E(0.0, s.omega_m, s.grid), t).real;
  auto kh = field_kernel(bandlimited_H(0.0, s.omega_m, s.grid), t).real;
  DetectionOperator oe = detected_E_operator(make_probe(c.probe.e, s.grid), s.crystal, make_ports(c.ports.e), 0.0, s.chain);
  DetectionOperator oh = detected_H_operator(make_probe(c.probe.h, s.grid), s.crystal, make_ports(c.ports.h), 0.0, s.chain);
  auto pe = field_kernel(signal_profile(oe, s.omega_m), t).real;
  auto ph = field_kernel(signal_profile(oh, s.omega_m), t).real;
  // Detected profiles carry an overall sign fixed by the crystal; align them with the targets.
  auto align = [](std::vector<double> v, const std::vector<double>& ref) {
    double d = 0;
    for (std::size_t i = 0; i < v.size(); ++i) d += v[i] * ref[i];
    if (d < 0)
      for (double& x : v) x = -x;
    return v;
  };
  ke = unit_peak(ke);
  kh = unit_peak(kh);
  pe = align(unit_peak(pe), ke);
  ph = align(unit_peak(ph), kh);
  io::Csv csv({"t_fs", "e_bl", "h_bl", "e_eos", "h_eos"});
  std::vector<double> tf;
  for (std::size_t i = 0; i < t.size(); ++i) {
    tf.push_back(t[i] * 1e15);
    csv.row(std::vector<double>{tf.back(), ke[i], kh[i], pe[i], ph[i]});
  }
  add(r, c, "waveforms.csv", csv.str());
  add(r, c, "operator_e.csv", operator_csv(oe));
  add(r, c, "operator_h.csv", operator_csv(oh));
  io::LinePlot p{"Band-limited quadratures and EOS-coupled profiles", "t (fs)", "normalized field kernel",
                 {{"E_BL", tf, ke, false}, {"H_BL", tf, kh, false}, {"E (EOS)", tf, pe, true}, {"H (EOS)", tf, ph, true}}};
  add(r, c, "waveforms.svg", svg_if(c, p));
  r.summary = {{"omega_m_thz", to_thz(s.omega_m)},
               {"e_bl_even_defect", parity_defect(ke, 1)},
               {"h_bl_odd_defect", parity_defect(kh, -1)},
               {"e_eos_even_defect", parity_defect(pe, 1)},
               {"h_eos_odd_defect", parity_defect(ph, -1)}};
  return r;
}

inline SweepConfig sweep_config(Quadrature q, const ExperimentConfig& c, const Setup& s) {
  SweepConfig cfg;
  cfg.crystal = s.crystal;
  cfg.ports = make_ports(q == Quadrature::E ? c.ports.e : c.ports.h);
  cfg.chain = s.chain;
  cfg.photon_number = q == Quadrature::E ? c.probe.e.photons : c.probe.h.photons;
  cfg.full_bandwidth = thz(c.sweep.full_bandwidth_thz);
  cfg.omega_m = s.omega_m;
  return cfg;
}

inline RunResult run_sweep(const ExperimentConfig& c, Quadrature q, Constraint k) {
  Setup s = make_setup(c);
  RunResult r;
  SweepConfig cfg = sweep_config(q, c, s);
  ProbeFamily fam = probe_family(q, c, s.grid);
  std::vector<double> bws = sweep_bandwidths(c);
  SweepResult sw = bandwidth_sweep(q, k, bws, fam, cfg);
  std::string tag = "sweep_" + to_string(q) + "_" + to_string(k);
  io::Csv csv({"bandwidth_thz", "theta_bl", "theta_full", "gamma", "constraint"});
  std::vector<double> bx, tb, tf, gm;
  std::size_t missing = 0;
  for (std::size_t i = 0; i < sw.size(); ++i) {
    if (sw.valid[i]) {
      csv.row({io::num(to_thz(sw.bandwidths[i])), io::num(sw.theta_bl[i]), io::num(sw.theta_full[i]),
               io::num(sw.gamma[i]), to_string(k)});
      bx.push_back(to_thz(sw.bandwidths[i]));
      tb.push_back(sw.theta_bl[i]);
      tf.push_back(sw.theta_full[i]);
      gm.push_back(sw.gamma[i]);
    } else {
      ++missing;
      csv.row({io::num(to_thz(sw.bandwidths[i])), "nan", "nan", "nan", to_string(k)});
    }
  }
  add(r, c, tag + ".csv", csv.str());
  io::LinePlot pt{"Coupling intensity, " + to_string(q) + ", " + to_string(k), "probe bandwidth (THz)", "theta",
                  {{"theta_bl", bx, tb, false}, {"theta_full", bx, tf, true}}};
  io::LinePlot pg{"Mode matching, " + to_string(q) + ", " + to_string(k), "probe bandwidth (THz)", "gamma",
                  {{"gamma", bx, gm, false}}};
  add(r, c, tag + "_theta.svg", svg_if(c, pt));
  add(r, c, tag + "_gamma.svg", svg_if(c, pg));
  json opt;
  try {
    FloorMode fm = c.sweep.gamma_floor ? FloorMode::explicit_value : FloorMode::full_band_reference;
    Optimum o = optimize_bandwidth(q, k, fm, fam, cfg, bws, c.sweep.gamma_floor.value_or(0.0));
    opt = {{"quadrature", to_string(q)},     {"constraint", to_string(k)},  {"bandwidth_thz", to_thz(o.bandwidth)},
           {"theta", o.theta},               {"gamma", o.gamma},            {"gamma_floor", o.gamma_floor},
           {"feasible", true}};
  } catch (const InfeasibleError& e) {
    opt = {{"quadrature", to_string(q)},
           {"constraint", to_string(k)},
           {"feasible", false},
           {"closest_bandwidth_thz", to_thz(e.closest_bandwidth())},
           {"closest_gamma", e.closest_gamma()}};
    r.infeasible = e;
  }
  r.files[tag + "_optimum.json"] = opt.dump(2) + "\n";
  r.summary = {{"optimum", opt}, {"points", sw.size()}, {"missing", missing}};
  return r;
}

// Tomography of the squeezed signal with the multiplexed E/H readout.
struct TomographyTrace {
  std::vector<double> t;
  std::vector<double> dv_e, dv_h, dc_eh;
  std::vector<double> pred_e, pred_h;
  std::vector<double> z2_e, z2_h;  // |projection onto the signal mode|^2
  double gamma_e = 0, gamma_h = 0, fbl_e = 0, fbl_h = 0;
};

inline double band_fraction(const DetectionOperator& op, double omega_m) {
  return signal_profile(op, omega_m).norm2() / op.total_weight();
}

inline DetectionOperator ideal_operator(Quadrature q, double t, double omega_m, const FrequencyGrid& g) {
  SpectralMode m = target_mode(q, g, omega_m, t).normalized();
  return DetectionOperator(m);
}

inline TomographyTrace tomography_trace(const DetectionOperator& e0, const DetectionOperator& h0,
                                        const SqueezedSignal& sig, double omega_m, const std::vector<double>& times) {
  MomentOptions mo{1.0};
  TomographyTrace tr;
  const FrequencyGrid& g = e0.grid();
  DetectionOperator en = e0.normalized(), hn = h0.normalized();
  tr.gamma_e = mode_matching(en, target_mode(Quadrature::E, g, omega_m), omega_m);
  tr.gamma_h = mode_matching(hn, target_mode(Quadrature::H, g, omega_m), omega_m);
  tr.fbl_e = band_fraction(en, omega_m);
  tr.fbl_h = band_fraction(hn, omega_m);
  GaussianState vac = GaussianState::vacuum(1, sig.state.basis());
  for (double t : times) {
    DetectionOperator e = en.delayed(t), h = hn.delayed(t);
    JointMoments js = joint_moments(sig.state, e, h, mo), jv = joint_moments(vac, e, h, mo);
    tr.t.push_back(t);
    tr.dv_e.push_back(js.cov(0, 0) - jv.cov(0, 0));
    tr.dv_h.push_back(js.cov(1, 1) - jv.cov(1, 1));
    tr.dc_eh.push_back(js.cov(0, 1) - jv.cov(0, 1));
    tr.z2_e.push_back(std::norm(project(e, sig.state.basis()).z[0]));
    tr.z2_h.push_back(std::norm(project(h, sig.state.basis()).z[0]));
    tr.pred_e.push_back(tr.gamma_e * tr.gamma_e * tr.fbl_e *
                        variance_delta(sig.state, ideal_operator(Quadrature::E, t, omega_m, g), mo));
    tr.pred_h.push_back(tr.gamma_h * tr.gamma_h * tr.fbl_h *
                        variance_delta(sig.state, ideal_operator(Quadrature::H, t, omega_m, g), mo));
  }
  return tr;
}

// Signal-mode covariance recovered from the joint E/H second moments at one time.
inline GaussianState reconstruct_state(const GaussianState& st, const DetectionOperator& e, const DetectionOperator& h) {
  MomentOptions mo{1.0};
  GaussianState vac = GaussianState::vacuum(st.num_modes(), st.basis());
  JointMoments js = joint_moments(st, e, h, mo), jv = joint_moments(vac, e, h, mo);
  RVec ge = project(e, st.basis()).g, gh = project(h, st.basis()).g;
  if (ge.size() != 2) throw ShapeError("reconstruction expects a single-mode basis");
  Eigen::Matrix3d a;
  a << ge[0] * ge[0], 2 * ge[0] * ge[1], ge[1] * ge[1],  //
      gh[0] * gh[0], 2 * gh[0] * gh[1], gh[1] * gh[1],   //
      ge[0] * gh[0], ge[0] * gh[1] + ge[1] * gh[0], ge[1] * gh[1];
  Eigen::Vector3d rhs(js.cov(0, 0) - jv.cov(0, 0), js.cov(1, 1) - jv.cov(1, 1), js.cov(0, 1) - jv.cov(0, 1));
  Eigen::FullPivLU<Eigen::Matrix3d> lu(a);
  if (!lu.isInvertible()) throw InvariantError("E and H readouts do not span the signal phase space");
  Eigen::Vector3d d = lu.solve(rhs);
  Eigen::Matrix2d gm;
  gm << ge[0], ge[1], gh[0], gh[1];
  Eigen::Vector2d mu = gm.fullPivLu().solve(Eigen::Vector2d(js.mean[0] - e.offset(), js.mean[1] - h.offset()));
  RMat cov(2, 2);
  cov << 0.5 + d[0], d[1], d[1], 0.5 + d[2];
  return GaussianState(mu, cov, st.basis());
}

struct Spectrum {
  double peak_frequency;  // Hz
  double bin_width;       // Hz
  double peak_phase;      // rad, of the peak component
};

// Strongest non-DC component of a uniformly sampled real trace.
inline Spectrum spectral_peak(const std::vector<double>& v, double dt) {
  const int n = static_cast<int>(v.size());
  if (n < 4) throw DomainError("trace too short for a spectrum");
  double mean = 0;
  for (double x : v) mean += x / n;
  std::vector<double> in(v.size());
  for (int i = 0; i < n; ++i) in[i] = v[i] - mean;
  std::vector<fftw_complex> out(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), out.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  int best = 1;
  double bm = -1;
  double ph = 0;
  for (int k = 1; k <= n / 2; ++k) {
    double m = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    if (m > bm) {
      bm = m;
      best = k;
      ph = std::atan2(out[k][1], out[k][0]);
    }
  }
  double df = 1.0 / (n * dt);
  return {best * df, df, ph};
}

inline RunResult run_tomography(const ExperimentConfig& c, std::size_t shots, std::uint64_t seed) {
  Setup s = make_setup(c);
  RunResult r;
  ChainOptions ch = s.chain;
  ch.evolution = Evolution::unitary;
  ProbePulse probe = multiplexed_probe(c, s.grid);
  auto [e0, h0] = multiplexed_EH(probe, s.crystal, make_ports(c.ports.multiplexed), 0.0, ch);
  SqueezedSignal sig = squeezed_signal(thz(c.signal.omega0_thz), thz(c.signal.sigma_thz), c.signal.r, s.grid);
  std::vector<double> times = linspace(fs(c.tomography.t_min_fs), fs(c.tomography.t_max_fs), c.tomography.n_times);
  TomographyTrace tr = tomography_trace(e0, h0, sig, s.omega_m, times);

  io::Csv csv({"t_fs", "dv_e", "dv_h", "dc_eh", "dv_e_pred", "dv_h_pred"});
  std::vector<double> tf;
  for (std::size_t i = 0; i < times.size(); ++i) {
    tf.push_back(times[i] * 1e15);
    csv.row(std::vector<double>{tf.back(), tr.dv_e[i], tr.dv_h[i], tr.dc_eh[i], tr.pred_e[i], tr.pred_h[i]});
  }
  add(r, c, "tomography.csv", csv.str());
  io::LinePlot p{"Variance deltas: detected (solid) vs re-scaled single-mode (dashed)", "t (fs)", "Delta V",
                 {{"Delta V_E", tf, tr.dv_e, false},
                  {"Delta V_H", tf, tr.dv_h, false},
                  {"E re-scaled", tf, tr.pred_e, true},
                  {"H re-scaled", tf, tr.pred_h, true}}};
  add(r, c, "tomography.svg", svg_if(c, p));

  double th = fs(c.tomography.husimi_time_fs);
  DetectionOperator e = e0.normalized().delayed(th), h = h0.normalized().delayed(th);
  GaussianState rec = reconstruct_state(sig.state, e, h);
  std::vector<double> ax = linspace(-c.tomography.husimi_extent, c.tomography.husimi_extent, c.tomography.husimi_points);
  std::vector<cplx> alpha;
  for (double y : ax)
    for (double x : ax) alpha.emplace_back(x, y);
  std::vector<double> q = husimi_q(rec, 0, alpha);
  io::Csv hq({"re_alpha", "im_alpha", "q"});
  for (std::size_t i = 0; i < alpha.size(); ++i) hq.row(std::vector<double>{alpha[i].real(), alpha[i].imag(), q[i]});
  add(r, c, "husimi.csv", hq.str());
  if (c.wants("svg")) r.files["husimi.svg"] = io::render_map("Husimi Q of the reconstructed signal mode", ax, ax, q);

  if (shots > 0) {
    auto sm = sample_shots(sig.state, e, h, shots, seed, MomentOptions{1.0});
    io::Csv sc({"shot_index", "e", "h"});
    for (const auto& x : sm) sc.row({std::to_string(x.index), io::num(x.e), io::num(x.h)});
    add(r, c, "shots.csv", sc.str());
  }
  double dt = times.size() > 1 ? times[1] - times[0] : 0.0;
  Spectrum sp = spectral_peak(tr.dv_e, dt);
  r.summary = {{"gamma_e", tr.gamma_e},
               {"gamma_h", tr.gamma_h},
               {"commutator", commutator_im(e0, h0)},
               {"dv_e_peak_thz", sp.peak_frequency / 1e12},
               {"fft_bin_thz", sp.bin_width / 1e12},
               {"reconstructed_cov", {rec.cov()(0, 0), rec.cov()(0, 1), rec.cov()(1, 1)}},
               {"signal_cov", {sig.state.cov()(0, 0), sig.state.cov()(0, 1), sig.state.cov()(1, 1)}}};
  return r;
}

// Variance delta per unit coupling to the signal mode.
inline double normalized_delta(const GaussianState& st, const DetectionOperator& op) {
  MomentOptions mo{1.0};
  double z2 = std::norm(project(op, st.basis()).z[0]);
  if (!(z2 > 0)) throw UndefinedMatchingError("readout does not couple to the signal mode");
  return variance_delta(st, op, mo) / z2;
}

inline RunResult run_variant(const ExperimentConfig& c, const std::string& variant, const std::vector<double>& phis,
                             std::optional<double> transmission) {
  Setup s = make_setup(c);
  RunResult r;
  ChainOptions ch = s.chain;
  ch.evolution = Evolution::unitary;
  ProbePulse probe = make_probe(c.probe.e, s.grid);
  SqueezedSignal sig = squeezed_signal(thz(c.signal.omega0_thz), thz(c.signal.sigma_thz), c.signal.r, s.grid);
  MomentOptions mo{1.0};
  double t0 = fs(c.tomography.husimi_time_fs);
  if (variant == "phase_scan") {
    if (phis.empty()) throw ConfigError("phase scan needs at least one phi");
    io::Csv csv({"phi", "variance", "variance_delta", "normalized_delta", "theta_bl", "gamma_e", "gamma_h"});
    std::vector<double> px, pv;
    for (double phi : phis) {
      DetectionOperator op = arbitrary_phase_quadrature(probe, s.crystal, phi, t0, ch).normalized();
      Moments m = detection_moments(sig.state, op, mo);
      double dv = variance_delta(sig.state, op, mo);
      Coupling th = coupling_intensity(op, s.omega_m);
      double ge = mode_matching(op, target_mode(Quadrature::E, s.grid, s.omega_m, t0), s.omega_m);
      double gh = mode_matching(op, target_mode(Quadrature::H, s.grid, s.omega_m, t0), s.omega_m);
      csv.row(std::vector<double>{phi, m.variance, dv, normalized_delta(sig.state, op), th.theta_bl, ge, gh});
      px.push_back(phi);
      pv.push_back(dv);
    }
    add(r, c, "phase_scan.csv", csv.str());
    io::LinePlot p{"Variance delta vs analysis phase", "phi (rad)", "Delta V", {{"Delta V(phi)", px, pv, false}}};
    add(r, c, "phase_scan.svg", svg_if(c, p));
    // Cross-check against the multiplexed readout at the same time.
    auto [me, mh] = multiplexed_EH(multiplexed_probe(c, s.grid), s.crystal, make_ports(c.ports.multiplexed), t0, ch);
    double x0 = normalized_delta(sig.state, arbitrary_phase_quadrature(probe, s.crystal, 0.0, t0, ch));
    double x90 = normalized_delta(sig.state, arbitrary_phase_quadrature(probe, s.crystal, kPi / 2, t0, ch));
    double ne = normalized_delta(sig.state, me), nh = normalized_delta(sig.state, mh);
    r.summary = {{"ratio_e", x0 / ne}, {"ratio_h", x90 / nh}, {"phase_e", x0}, {"phase_h", x90},
                 {"multiplexed_e", ne}, {"multiplexed_h", nh}};
    return r;
  }
  if (variant != "beam_splitter") throw ConfigError("variant must be phase_scan or beam_splitter");
  PortConfig e_arm = make_ports(c.ports.e);
  PortConfig h_arm = phase_ports(probe, kPi / 2, ch);
  for (auto& p : h_arm.ports) p.readout = "H";
  DetectionOperator se = detected_E_operator(probe, s.crystal, e_arm, t0, ch);
  DetectionOperator sh = detected_H_operator(probe, s.crystal, h_arm, t0, ch);
  Coupling ce = coupling_intensity(se, s.omega_m), chh = coupling_intensity(sh, s.omega_m);
  double tr = transmission.value_or(balanced_transmission(ce.theta_bl, chh.theta_bl));
  io::Csv csv({"arm", "transmission", "theta_bl", "theta_full", "gamma", "variance_delta"});
  auto row = [&](const std::string& arm, double tx, const DetectionOperator& op, Quadrature q) {
    Coupling cc = coupling_intensity(op, s.omega_m);
    double g = mode_matching(op, target_mode(q, s.grid, s.omega_m, t0), s.omega_m);
    csv.row({arm, io::num(tx), io::num(cc.theta_bl), io::num(cc.theta_full), io::num(g),
             io::num(variance_delta(sig.state, op, mo))});
    return cc;
  };
  json sum{{"transmission_h", tr}, {"theta_e_single", ce.theta_bl}, {"theta_h_single", chh.theta_bl}};
  if (tr >= 1.0) {
    row("H", 1.0, sh, Quadrature::H);
    sum["degenerate"] = "single-arm H detection";
  } else if (tr <= 0.0) {
    row("E", 1.0, se, Quadrature::E);
    sum["degenerate"] = "single-arm E detection";
  } else {
    auto [ae, ah] = beam_splitter_variant(probe, s.crystal, tr, t0, e_arm, h_arm, ch);
    Coupling ke = row("E", 1 - tr, ae, Quadrature::E);
    Coupling kh = row("H", tr, ah, Quadrature::H);
    sum["theta_e_arm"] = ke.theta_bl;
    sum["theta_h_arm"] = kh.theta_bl;
    sum["sum_rule_residual"] = ke.theta_bl + kh.theta_bl - ((1 - tr) * ce.theta_bl + tr * chh.theta_bl);
    sum["arm_commutator"] = commutator_im(ae, ah);
  }
  add(r, c, "beam_splitter.csv", csv.str());
  r.summary = sum;
  return r;
}

// One CLI invocation: the command, the resolved config (flags already applied)
// and the run-level knobs that are not part of the config file.
struct Request {
  std::string command;
  ExperimentConfig config;
};

// Runs a command and adds summary.json and manifest.json to the file set.
inline RunResult execute(const Request& rq) {
  const ExperimentConfig& c = rq.config;
  RunResult r;
  if (rq.command == "waveforms") r = run_waveforms(c);
  else if (rq.command == "sweep")
    r = run_sweep(c, io::parse_quadrature(c.sweep.quadrature), io::parse_constraint(c.sweep.constraint));
  else if (rq.command == "tomography") r = run_tomography(c, c.tomography.shots, c.tomography.seed);
  else if (rq.command == "variant") r = run_variant(c, c.variant.variant, c.variant.phi_list, c.variant.transmission);
  else throw ConfigError("unknown command '" + rq.command + "'");
  r.files[rq.command + "_summary.json"] = r.summary.dump(2) + "\n";
  r.files["manifest.json"] = io::manifest(rq.command, io::to_json(c), c.tomography.seed, r.files);
  return r;
}

}  // namespace eosq

#endif
