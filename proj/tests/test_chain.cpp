#include <gtest/gtest.h>

#include "eosq/chain.hpp"
#include "eosq/metrics.hpp"
#include "eosq/moments.hpp"

using namespace eosq;

namespace {

// Coarse grid for dense transforms; 2 THz bins.
FrequencyGrid coarse() { return FrequencyGrid::from_thz(600, 300); }
FrequencyGrid fine() { return FrequencyGrid::from_thz(600, 2400); }

PortConfig e_ports(const FrequencyGrid& g) {
  return {{make_port(thz(150), g.omega_max(), Waveplate::quarter, kPi / 4, "E")}};
}

PortConfig h_ports(const FrequencyGrid& g) {
  return {{make_port(thz(150), thz(340), Waveplate::quarter, kPi / 4, "H"),
           make_port(thz(340), g.omega_max(), Waveplate::quarter, kPi / 4, "H")}};
}

PortConfig mux_ports(const FrequencyGrid& g) {
  return {{make_port(thz(150), thz(275), Waveplate::quarter, kPi / 4, "E"),
           make_port(thz(275), thz(340), Waveplate::quarter, kPi / 4, "H"),
           make_port(thz(340), g.omega_max(), Waveplate::quarter, kPi / 4, "H")}};
}

ChainOptions unitary() {
  ChainOptions o;
  o.evolution = Evolution::unitary;
  return o;
}

double deviation(const BogoliubovTransform& t) {
  std::size_t n = t.size();
  return std::sqrt((t.alpha() - CMat::Identity(n, n)).squaredNorm() + t.beta().squaredNorm());
}

double rel_diff(const CVec& a, const CVec& b) { return (a - b).norm() / std::max(a.norm(), b.norm()); }

}  // namespace

TEST(Crystal, DefaultsAndValidation) {
  CrystalParams c;
  EXPECT_DOUBLE_EQ(c.length_L, 7e-6);
  EXPECT_DOUBLE_EQ(c.r41, 4e-12);
  double n = c.n_nir(thz(350));
  EXPECT_GT(n, 2.5);
  EXPECT_LT(n, 3.0);
  EXPECT_NEAR(c.d_eff(thz(350)), -n * n * n * n * 4e-12, 1e-25);
  EXPECT_GE(c.n_mir(thz(1)), 2.55);
  EXPECT_LE(c.n_mir(thz(149)), 2.59);
  c.length_L = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Probe, InvariantsEnforced) {
  FrequencyGrid g = coarse();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  EXPECT_NEAR(p.spectrum.norm2(), 1.0, 1e-12);
  EXPECT_THROW(p.with_photons(0.0), DomainError);
  EXPECT_THROW(sinc_probe(g, thz(550), thz(240), 5e9), RangeError);
  ProbePulse h = odd_phase_probe(g, thz(340), thz(80), 5e9, 0.9, thz(4));
  EXPECT_NEAR(h.spectrum.norm2(), 1.0, 1e-12);
  // Phase +pi/2 above the carrier, -pi/2 below (outside the carrier peak).
  EXPECT_NEAR(std::arg(h.spectrum[g.count_below(thz(370))]), kPi / 2, 1e-9);
  EXPECT_NEAR(std::arg(h.spectrum[g.count_below(thz(310))]), -kPi / 2, 1e-9);
}

TEST(Waveplates, QuadratureOfStandardPorts) {
  // Half-wave at 22.5 deg reads a real quadrature; quarter-wave at 45 deg reads -i.
  Port hw = make_port(thz(150), thz(600), Waveplate::half, kPi / 8, "E");
  Port qw = make_port(thz(150), thz(600), Waveplate::quarter, kPi / 4, "E");
  EXPECT_NEAR(std::abs(hw.quadrature() - cplx(1, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(qw.quadrature() - cplx(0, -1)), 0.0, 1e-12);
  EXPECT_NEAR(hw.imbalance(), 0.0, 1e-12);
  EXPECT_NEAR(qw.imbalance(), 0.0, 1e-12);
  Port none = make_port(thz(150), thz(600), Waveplate::none, 0.0, "E");
  EXPECT_NEAR(none.imbalance(), 1.0, 1e-12);
}

TEST(Waveplates, PlatesForQuadratureHitTarget) {
  for (int i = 0; i < 24; ++i) {
    double psi = -kPi + 2 * kPi * i / 24.0;
    cplx q = std::polar(1.0, -psi);
    Port p{0.0, 1.0, plates_for_quadrature(q), 1.0, "X"};
    EXPECT_NEAR(std::abs(p.quadrature() - q), 0.0, 1e-12) << "psi=" << psi;
    EXPECT_NEAR(p.imbalance(), 0.0, 1e-12);
    for (const auto& r : p.plates) {
      EXPECT_GE(r.angle, 0.0);
      EXPECT_LT(r.angle, kPi);
    }
  }
}

TEST(PortConfig, Validation) {
  FrequencyGrid g = coarse();
  PortConfig empty{{make_port(thz(200), thz(200), Waveplate::quarter, kPi / 4, "E")}};
  EXPECT_THROW(empty.validate(g), ConfigError);
  PortConfig cross{{make_port(thz(150), thz(300), Waveplate::quarter, kPi / 4, "E"),
                    make_port(thz(280), thz(600), Waveplate::quarter, kPi / 4, "H")}};
  EXPECT_THROW(cross.validate(g), NonCommutingError);
  PortConfig same{{make_port(thz(150), thz(300), Waveplate::quarter, kPi / 4, "E"),
                   make_port(thz(280), thz(600), Waveplate::quarter, kPi / 4, "E")}};
  EXPECT_THROW(same.validate(g), ConfigError);
  PortConfig angle{{make_port(thz(150), thz(300), Waveplate::quarter, kPi, "E")}};
  EXPECT_THROW(angle.validate(g), ConfigError);
  PortConfig off{{make_port(thz(150), thz(700), Waveplate::quarter, kPi / 4, "E")}};
  EXPECT_NO_THROW(off.validate(g));
  PortConfig outside{{make_port(thz(650), thz(700), Waveplate::quarter, kPi / 4, "E")}};
  EXPECT_THROW(outside.validate(g), ConfigError);
}

TEST(InteractionKernel, ZeroR41IsIdentity) {
  FrequencyGrid g = coarse();
  CrystalParams c;
  c.r41 = 0;
  auto t = interaction_kernel(sinc_probe(g, thz(350), thz(240), 5e9), c);
  EXPECT_EQ(deviation(t), 0.0);
}

TEST(InteractionKernel, SymplecticAndUnitary) {
  FrequencyGrid g = coarse();
  auto t = interaction_kernel(sinc_probe(g, thz(350), thz(240), 5e9), CrystalParams{});
  EXPECT_LT(t.symplectic_error(), 1e-9);
  EXPECT_GT(deviation(t), 1e-4);
}

TEST(InteractionKernel, LinearInCrystalLength) {
  FrequencyGrid g = coarse();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  CrystalParams a, b;
  a.length_L = 2e-8;
  b.length_L = 4e-8;
  double ratio = deviation(interaction_kernel(p, b)) / deviation(interaction_kernel(p, a));
  EXPECT_NEAR(ratio, 2.0, 1e-3);
}

TEST(InteractionKernel, MixingDoublesWithAmplitude) {
  FrequencyGrid g = coarse();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e8);
  double b1 = interaction_kernel(p, CrystalParams{}).beta().norm();
  double b2 = interaction_kernel(p.with_photons(4 * 5e8), CrystalParams{}).beta().norm();
  EXPECT_NEAR(b2 / b1, 2.0, 1e-3);
}

TEST(InteractionKernel, WarnsOnSignalBandOverlap) {
  FrequencyGrid g = coarse();
  std::vector<std::string> w;
  interaction_kernel(sinc_probe(g, thz(200), thz(160), 5e9), CrystalParams{}, {}, &w);
  EXPECT_FALSE(w.empty());
  interaction_kernel(sinc_probe(g, thz(350), thz(240), 5e9), CrystalParams{}, {}, &w);
  EXPECT_TRUE(w.empty());
}

TEST(DetectedOperator, MatrixFreeReadoutMatchesDenseTransform) {
  FrequencyGrid g = coarse();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  CrystalParams c;
  auto ports = e_ports(g).readout("E");
  DetectionOperator op = detect_readout(p, c, ports, unitary());
  auto t = interaction_kernel(p, c);
  CVec w = readout_vacuum_coeffs(p, ports) * std::sqrt(g.delta_omega());
  CVec dense = t.alpha().transpose() * w + (t.beta().transpose() * w).conjugate();
  EXPECT_LT(rel_diff(op.a_coeffs() * std::sqrt(g.delta_omega()), dense), 1e-10);
}

TEST(DetectedOperator, LinearizedAgreesToFirstOrder) {
  FrequencyGrid g = fine();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  ChainOptions lin;
  auto a = detected_E_operator(p, CrystalParams{}, e_ports(g), 0.0, lin);
  auto b = detected_E_operator(p, CrystalParams{}, e_ports(g), 0.0, unitary());
  auto n = static_cast<Eigen::Index>(g.count_below(thz(150)));
  EXPECT_LT(rel_diff(a.a_coeffs().head(n), b.a_coeffs().head(n)), 0.05);
}

TEST(DetectedOperator, DelayIsExactPhase) {
  FrequencyGrid g = fine();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  for (ChainOptions opt : {ChainOptions{}, unitary()}) {
    auto a = detected_E_operator(p, CrystalParams{}, e_ports(g), fs(17), opt);
    auto b = detected_E_operator(p, CrystalParams{}, e_ports(g), 0.0, opt).delayed(fs(17));
    EXPECT_LT(rel_diff(a.a_coeffs(), b.a_coeffs()), 1e-12);
  }
}

TEST(DetectedOperator, ShiftedProfileTracksShiftedTarget) {
  FrequencyGrid g = fine();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  double wm = thz(40);
  auto op0 = detected_E_operator(p, CrystalParams{}, e_ports(g), 0.0);
  auto op1 = detected_E_operator(p, CrystalParams{}, e_ports(g), fs(25));
  double g0 = mode_matching(op0, bandlimited_E(0.0, wm, g), wm);
  double g1 = mode_matching(op1, bandlimited_E(fs(25), wm, g), wm);
  EXPECT_NEAR(g0, g1, 1e-12);
  EXPECT_LT(mode_matching(op1, bandlimited_E(0.0, wm, g), wm), 0.5);
}

TEST(DetectedOperator, VacuumMeanZeroAndHalfVariance) {
  FrequencyGrid g = fine();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  auto op = detected_E_operator(p, CrystalParams{}, e_ports(g), 0.0).normalized();
  EXPECT_LT(std::abs(op.offset()), 1e-8);
  EXPECT_NEAR(op.vacuum_variance(), 0.5, 1e-12);
  EXPECT_EQ(op.b_coeffs(), op.a_coeffs().conjugate());
  PortConfig bare{{make_port(thz(150), g.omega_max(), Waveplate::none, 0.0, "E")}};
  EXPECT_GT(std::abs(detected_E_operator(p, CrystalParams{}, bare, 0.0).offset()), 1.0);
}

TEST(DetectedOperator, SincProbeModeMatchingNearUnity) {
  FrequencyGrid g = fine();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  double wm = thz(40);
  auto op = detected_E_operator(p, CrystalParams{}, e_ports(g), 0.0);
  EXPECT_NEAR(mode_matching(op, bandlimited_E(0.0, wm, g), wm), 0.99, 0.02);
}

TEST(DetectedOperator, PhotonScalingInvariants) {
  FrequencyGrid g = fine();
  double wm = thz(40);
  ProbePulse p = sinc_probe(g, thz(350), thz(120), 5e9);
  auto a = detected_E_operator(p, CrystalParams{}, e_ports(g), 0.0);
  auto b = detected_E_operator(p.with_photons(2e10), CrystalParams{}, e_ports(g), 0.0);
  Coupling ca = coupling_intensity(a, wm), cb = coupling_intensity(b, wm);
  EXPECT_NEAR(cb.theta_bl / ca.theta_bl, 4.0, 1e-9);
  EXPECT_NEAR(cb.theta_bl / cb.theta_full, ca.theta_bl / ca.theta_full, 1e-9);
  auto t = bandlimited_E(0.0, wm, g);
  EXPECT_NEAR(mode_matching(a, t, wm), mode_matching(b, t, wm), 1e-9);
}

TEST(DetectedOperator, OddPhaseProbeFavoursHilbertQuadrature) {
  FrequencyGrid g = fine();
  double wm = thz(40);
  ProbePulse p = odd_phase_probe(g, thz(340), thz(80), 5e9, 0.9, thz(4));
  auto op = detected_H_operator(p, CrystalParams{}, h_ports(g), 0.0);
  double gh = mode_matching(op, bandlimited_H(0.0, wm, g), wm), ge = mode_matching(op, bandlimited_E(0.0, wm, g), wm);
  EXPECT_GT(gh, 0.5);
  EXPECT_LT(ge, 0.5 * gh);
  // The flat-phase sinc probe reads E and not H on the same ports.
  auto flat = detected_H_operator(sinc_probe(g, thz(340), thz(80), 5e9), CrystalParams{}, h_ports(g), 0.0);
  EXPECT_LT(mode_matching(flat, bandlimited_H(0.0, wm, g), wm), 1e-6);
}

TEST(DetectedOperator, EmptyPortsRejected) {
  FrequencyGrid g = fine();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  EXPECT_THROW(detected_H_operator(p, CrystalParams{}, e_ports(g), 0.0), ConfigError);
  PortConfig dark{{make_port(thz(150), thz(200), Waveplate::quarter, kPi / 4, "E")}};
  EXPECT_THROW(detected_E_operator(p, CrystalParams{}, dark, 0.0), ConfigError);
}

TEST(Multiplexed, PairCommutesAndMatchesSingleDetection) {
  FrequencyGrid g = fine();
  ProbePulse pe = sinc_probe(g, thz(215), thz(120), 1e10);
  ProbePulse ph = odd_phase_probe(g, thz(340), thz(80), 1.5e10, 0.9, thz(4));
  ProbePulse mux = combine_probes({pe, ph});
  mux.central_frequency = thz(340);
  PortConfig ports = mux_ports(g);
  auto [e, h] = multiplexed_EH(mux, CrystalParams{}, ports, 0.0, unitary());
  EXPECT_LT(std::abs(commutator_im(e, h)), 1e-10);
  // Single detection restricted to each readout's own band.
  auto re = detect_readout(mux, CrystalParams{}, {ports.ports[0]}, unitary());
  auto rh = detect_readout(mux, CrystalParams{}, {ports.ports[1], ports.ports[2]}, unitary());
  EXPECT_LT(rel_diff(e.a_coeffs(), re.a_coeffs()), 1e-14);
  EXPECT_LT(rel_diff(h.a_coeffs(), rh.a_coeffs()), 1e-14);
  // The E band only sees the E probe: the H probe adds no signal-band profile there.
  pe.central_frequency = thz(340);
  auto se = detected_E_operator(pe, CrystalParams{}, ports, 0.0, unitary());
  auto n = static_cast<Eigen::Index>(g.count_below(thz(150)));
  double cosine = std::abs(e.a_coeffs().head(n).dot(se.a_coeffs().head(n))) /
                  (e.a_coeffs().head(n).norm() * se.a_coeffs().head(n).norm());
  EXPECT_GT(cosine, 0.99);
}

TEST(Multiplexed, OverlappingBandsDoNotCommute) {
  FrequencyGrid g = fine();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  PortConfig bad{{make_port(thz(150), thz(300), Waveplate::quarter, kPi / 4, "E"),
                  make_port(thz(290), g.omega_max(), Waveplate::quarter, kPi / 4, "H")}};
  EXPECT_THROW(multiplexed_EH(p, CrystalParams{}, bad, 0.0, unitary()), NonCommutingError);
}

TEST(Multiplexed, VacuumShotsAreIsotropic) {
  FrequencyGrid g = fine();
  ProbePulse mux = combine_probes({sinc_probe(g, thz(215), thz(120), 1e10),
                                   odd_phase_probe(g, thz(340), thz(80), 1.5e10, 0.9, thz(4))});
  mux.central_frequency = thz(340);
  auto [e, h] = multiplexed_EH(mux, CrystalParams{}, mux_ports(g), 0.0, unitary());
  auto sig = squeezed_signal(thz(20), thz(4), 0.0, g);
  auto shots = sample_shots(sig.state, e.normalized(), h.normalized(), 200000, 3, MomentOptions{1.0});
  double ve = 0, vh = 0, c = 0;
  for (const auto& s : shots) {
    ve += s.e * s.e;
    vh += s.h * s.h;
    c += s.e * s.h;
  }
  double n = static_cast<double>(shots.size());
  EXPECT_NEAR(ve / n, 0.5, 0.01);
  EXPECT_NEAR(vh / n, 0.5, 0.01);
  EXPECT_NEAR(c / n, 0.0, 0.01);
}

TEST(PhaseQuadrature, ZeroMatchesEAndPiNegates) {
  FrequencyGrid g = fine();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  CrystalParams c;
  auto x0 = arbitrary_phase_quadrature(p, c, 0.0, 0.0);
  auto xpi = arbitrary_phase_quadrature(p, c, kPi, 0.0);
  EXPECT_LT(rel_diff(xpi.a_coeffs(), -x0.a_coeffs()), 1e-12);
  auto e = detected_E_operator(p, c, e_ports(g), 0.0);
  auto n = static_cast<Eigen::Index>(g.count_below(thz(150)));
  double self = x0.a_coeffs().head(n).squaredNorm();
  double cross = std::abs(x0.a_coeffs().head(n).dot(e.a_coeffs().head(n)).real()) * std::sqrt(self) /
                 e.a_coeffs().head(n).norm();
  EXPECT_GE(cross, 0.99 * self);
}

TEST(PhaseQuadrature, VarianceHasPeriodPi) {
  FrequencyGrid g = fine();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  auto sig = squeezed_signal(thz(20), thz(4), 0.5, g);
  auto var = [&](double phi) {
    auto op = arbitrary_phase_quadrature(p, CrystalParams{}, phi, 0.0, unitary());
    return variance_delta(sig.state, op, MomentOptions{1.0});
  };
  double v0 = var(0), v1 = var(kPi / 4), v2 = var(kPi / 2), v3 = var(3 * kPi / 4), v4 = var(kPi), v6 = var(3 * kPi / 2);
  double scale = std::abs(v0) + std::abs(v2);
  EXPECT_NEAR(v0, v4, 1e-9 * scale);
  EXPECT_NEAR(v2, v6, 1e-9 * scale);
  EXPECT_NEAR(v0 + v2, v1 + v3, 1e-9 * scale);
  EXPECT_GT(v0, 0.0);
  EXPECT_LT(v2, 0.0);
}

TEST(BeamSplitter, HalfSplitOfIdenticalPorts) {
  FrequencyGrid g = fine();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  PortConfig pe = e_ports(g), ph = e_ports(g);
  ph.ports[0].readout = "H";
  auto [e, h] = beam_splitter_variant(p, CrystalParams{}, 0.5, 0.0, pe, ph);
  auto single = detected_E_operator(p, CrystalParams{}, pe, 0.0);
  EXPECT_LT(rel_diff(e.a_coeffs(), h.a_coeffs()), 1e-14);
  EXPECT_LT(rel_diff(e.a_coeffs(), single.a_coeffs() * std::sqrt(0.5)), 1e-14);
  EXPECT_NEAR(e.total_weight(), single.total_weight() * 0.5 + 0.5 * readout_vacuum_coeffs(p, pe.readout("E")).squaredNorm() * g.delta_omega(), 1e-12 * e.total_weight());
}

TEST(BeamSplitter, BalancedRatio) {
  double t = balanced_transmission(0.1, 0.01);
  EXPECT_NEAR(t / (1 - t), 10.0, 1e-12);
  EXPECT_THROW(balanced_transmission(0.0, 0.1), DomainError);
}

TEST(BeamSplitter, CoupledIntensityConserved) {
  FrequencyGrid g = fine();
  ProbePulse p = sinc_probe(g, thz(350), thz(240), 5e9);
  CrystalParams c;
  double wm = thz(40);
  PortConfig pe = e_ports(g), ph = phase_ports(p, kPi / 2, unitary());
  for (auto& port : ph.ports) port.readout = "H";
  double te = coupling_intensity(detected_E_operator(p, c, pe, 0.0, unitary()), wm).theta_bl;
  double th = coupling_intensity(detected_H_operator(p, c, ph, 0.0, unitary()), wm).theta_bl;
  for (double tr : {0.1, 0.5, 0.9}) {
    auto [e, h] = beam_splitter_variant(p, c, tr, 0.0, pe, ph, unitary());
    double sum = coupling_intensity(e, wm).theta_bl + coupling_intensity(h, wm).theta_bl;
    EXPECT_NEAR(sum, (1 - tr) * te + tr * th, 1e-9 * te);
    EXPECT_LT(std::abs(commutator_im(e, h)), 1e-10);
  }
  EXPECT_THROW(beam_splitter_variant(p, c, 1.0, 0.0, pe, ph), RangeError);
  EXPECT_THROW(beam_splitter_variant(p, c, 0.0, 0.0, pe, ph), RangeError);
}
