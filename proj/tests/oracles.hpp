#ifndef EOSQ_TESTS_ORACLES_HPP
#define EOSQ_TESTS_ORACLES_HPP

#include <random>

#include "eosq/moments.hpp"

namespace eosq::oracle {

// Passive unitary from the QR of a random complex matrix.
inline CMat random_unitary(std::size_t m, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  CMat a(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = cplx(n(rng), n(rng));
  Eigen::HouseholderQR<CMat> qr(a);
  return qr.householderQ() * CMat::Identity(m, m);
}

inline GaussianState random_state(const ModeBasis& basis, std::mt19937_64& rng) {
  std::size_t m = basis.size();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CMat sq_a = CMat::Zero(m, m), sq_b = CMat::Zero(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    double r = 0.8 * u(rng), ph = 2 * kPi * u(rng);
    sq_a(i, i) = std::cosh(r);
    sq_b(i, i) = -std::sinh(r) * std::polar(1.0, ph);
  }
  RMat s = BogoliubovTransform(random_unitary(m, rng), CMat::Zero(m, m)).to_real() *
           BogoliubovTransform(sq_a, sq_b).to_real() *
           BogoliubovTransform(random_unitary(m, rng), CMat::Zero(m, m)).to_real();
  RMat th = RMat::Zero(2 * m, 2 * m);
  for (std::size_t i = 0; i < m; ++i) th(2 * i, 2 * i) = th(2 * i + 1, 2 * i + 1) = 0.5 + 1.5 * u(rng);
  RVec mean(2 * m);
  for (std::size_t i = 0; i < 2 * m; ++i) mean[i] = 2 * u(rng) - 1;
  RMat cov = s * th * s.transpose();
  cov = (0.5 * (cov + cov.transpose())).eval();
  return GaussianState(mean, cov, basis);
}

// Dense oracle: lift the state to every grid bin (unit bosons c_k = a_k sqrt(dw)),
// completing the basis with vacuum modes, and evaluate v^T Gamma v directly.
struct Dense {
  double mean, var;
};

inline Dense dense_moments(const GaussianState& st, const DetectionOperator& op) {
  const FrequencyGrid& g = op.grid();
  const std::size_t n = g.size(), m = st.num_modes();
  const double sdw = std::sqrt(g.delta_omega());
  CMat w = CMat::Zero(n, n);  // columns: basis profiles then completion, c = W b
  for (std::size_t j = 0; j < m; ++j) w.col(j) = st.basis()[j].coeffs() * sdw;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  for (std::size_t j = m; j < n; ++j) {
    CVec v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = cplx(nd(rng), nd(rng));
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < j; ++i) v -= w.col(i).dot(v) * w.col(i);
    w.col(j) = v / v.norm();
  }
  // The basis modes carry profile f, b = sum conj(f) c, so c = conj-free W b with W columns f.
  RMat big = 0.5 * RMat::Identity(2 * n, 2 * n);
  big.topLeftCorner(2 * m, 2 * m) = st.cov();
  RVec mu = RVec::Zero(2 * n);
  mu.head(2 * m) = st.mean();
  RMat s = BogoliubovTransform(w, CMat::Zero(n, n)).to_real();
  RMat gc = s * big * s.transpose();
  RVec mc = s * mu;
  RVec v(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx a = op.a_coeffs()[k] * sdw;
    v[2 * k] = a.real();
    v[2 * k + 1] = -a.imag();
  }
  double aux = op.has_aux() ? 0.5 * op.aux_coeffs().squaredNorm() * g.delta_omega() : 0.0;
  return {v.dot(mc) + op.offset(), v.dot(gc * v) + aux};
}

inline ModeBasis random_basis(const FrequencyGrid& g, std::size_t m, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<SpectralMode> modes;
  for (std::size_t j = 0; j < m; ++j) {
    SpectralMode f(g);
    for (std::size_t k = 0; k < g.size(); ++k) f[k] = cplx(nd(rng), nd(rng));
    modes.push_back(f);
  }
  return ModeBasis::orthonormalized(modes);
}

inline DetectionOperator random_operator(const ModeBasis& basis, std::mt19937_64& rng, bool aux) {
  const FrequencyGrid& g = basis[0].grid();
  std::normal_distribution<double> nd;
  CVec a = CVec::Zero(g.size());
  for (std::size_t j = 0; j < basis.size(); ++j) a += cplx(nd(rng), nd(rng)) * basis[j].coeffs().conjugate();
  for (std::size_t k = 0; k < g.size(); ++k) a[k] += 0.1 * cplx(nd(rng), nd(rng));
  DetectionOperator op(SpectralMode(g, a));
  if (aux) {
    CVec x(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) x[k] = 0.2 * cplx(nd(rng), nd(rng));
    op.set_aux(x);
  }
  op.set_offset(nd(rng));
  return op;
}

}  // namespace eosq::oracle

#endif
