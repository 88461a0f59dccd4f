#ifndef EOSQ_GAUSSIAN_HPP
#define EOSQ_GAUSSIAN_HPP

#include <Eigen/Eigenvalues>
#include <optional>
#include <utility>
#include <vector>

#include "detection.hpp"
#include "spectral.hpp"

namespace eosq {

using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

class ModeBasis {
 public:
  ModeBasis() = default;
  explicit ModeBasis(std::vector<SpectralMode> modes, double gram_tolerance = 1e-10)
      : modes_(std::move(modes)), tol_(gram_tolerance) {
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      modes_[i].check_same(modes_.front());
      for (std::size_t j = i; j < modes_.size(); ++j) {
        cplx g = overlap(modes_[i], modes_[j]);
        double want = i == j ? 1.0 : 0.0;
        if (std::abs(g - want) > tol_) throw InvariantError("basis modes are not orthonormal");
      }
    }
  }

  // Modified Gram-Schmidt; drops nothing, fails on linearly dependent input.
  static ModeBasis orthonormalized(const std::vector<SpectralMode>& modes, double gram_tolerance = 1e-10) {
    std::vector<SpectralMode> out;
    for (const auto& m : modes) {
      SpectralMode v = m;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& u : out) v = v - u * overlap(u, v);
      if (v.norm() < 1e-12 * std::max(1.0, m.norm())) throw DomainError("basis modes are linearly dependent");
      out.push_back(v.normalized());
    }
    return ModeBasis(std::move(out), gram_tolerance);
  }

  std::size_t size() const { return modes_.size(); }
  bool empty() const { return modes_.empty(); }
  const SpectralMode& operator[](std::size_t i) const { return modes_[i]; }
  const std::vector<SpectralMode>& modes() const { return modes_; }
  double gram_tolerance() const { return tol_; }

 private:
  std::vector<SpectralMode> modes_;
  double tol_ = 1e-10;
};

// Real symplectic form for ordering (x1, p1, ..., xM, pM) with [x, p] = i.
inline RMat symplectic_form(std::size_t m) {
  RMat om = RMat::Zero(2 * m, 2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    om(2 * i, 2 * i + 1) = 1.0;
    om(2 * i + 1, 2 * i) = -1.0;
  }
  return om;
}

class GaussianState {
 public:
  GaussianState(RVec mean, RMat cov, ModeBasis basis = {}) : mean_(std::move(mean)), cov_(std::move(cov)), basis_(std::move(basis)) {
    validate();
  }

  static GaussianState vacuum(std::size_t m, ModeBasis basis = {}) {
    return GaussianState(RVec::Zero(2 * m), 0.5 * RMat::Identity(2 * m, 2 * m), std::move(basis));
  }

  std::size_t num_modes() const { return static_cast<std::size_t>(mean_.size() / 2); }
  const RVec& mean() const { return mean_; }
  const RMat& cov() const { return cov_; }
  const ModeBasis& basis() const { return basis_; }
  GaussianState with_basis(ModeBasis b) const { return GaussianState(mean_, cov_, std::move(b)); }

  // Smallest eigenvalue of cov + (i/2) Omega.
  double uncertainty_margin() const {
    CMat h = cov_.cast<cplx>() + cplx(0, 0.5) * symplectic_form(num_modes()).cast<cplx>();
    Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  void validate() const {
    if (mean_.size() % 2 != 0 || mean_.size() == 0) throw ShapeError("state mean must have even positive length");
    if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) throw ShapeError("covariance shape mismatch");
    if (!basis_.empty() && basis_.size() != num_modes()) throw ShapeError("basis size does not match state");
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw InvariantError("covariance is not symmetric");
    if (uncertainty_margin() < -1e-10) throw InvariantError("covariance violates the uncertainty relation");
  }

 private:
  RVec mean_;
  RMat cov_;
  ModeBasis basis_;
};

// a' = alpha a + beta a^dag.
class BogoliubovTransform {
 public:
  BogoliubovTransform(CMat alpha, CMat beta) : alpha_(std::move(alpha)), beta_(std::move(beta)) {
    if (alpha_.rows() != alpha_.cols() || beta_.rows() != alpha_.rows() || beta_.cols() != alpha_.cols())
      throw ShapeError("Bogoliubov blocks must be square and equal size");
  }

  static BogoliubovTransform identity(std::size_t m) {
    return {CMat::Identity(m, m), CMat::Zero(m, m)};
  }
  static BogoliubovTransform squeezer(double r) {
    CMat a(1, 1), b(1, 1);
    a(0, 0) = std::cosh(r);
    b(0, 0) = -std::sinh(r);
    return {a, b};
  }
  // Modes (1, 2): a1' = sqrt(eta) a1 + sqrt(1-eta) a2, a2' = -sqrt(1-eta) a1 + sqrt(eta) a2.
  static BogoliubovTransform beam_splitter(double eta) {
    if (eta < 0 || eta > 1) throw RangeError("beam splitter transmission outside [0,1]");
    CMat a(2, 2);
    double t = std::sqrt(eta), r = std::sqrt(1 - eta);
    a << t, r, -r, t;
    return {a, CMat::Zero(2, 2)};
  }

  std::size_t size() const { return static_cast<std::size_t>(alpha_.rows()); }
  const CMat& alpha() const { return alpha_; }
  const CMat& beta() const { return beta_; }

  double symplectic_error() const {
    std::size_t m = size();
    double e1 = (alpha_ * alpha_.adjoint() - beta_ * beta_.adjoint() - CMat::Identity(m, m)).cwiseAbs().maxCoeff();
    double e2 = (alpha_ * beta_.transpose() - beta_ * alpha_.transpose()).cwiseAbs().maxCoeff();
    return std::max(e1, e2);
  }

  // Real symplectic matrix on (x1, p1, ...).
  RMat to_real() const {
    std::size_t m = size();
    CMat s = alpha_ + beta_, d = alpha_ - beta_;
    RMat out(2 * m, 2 * m);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) {
        out(2 * j, 2 * k) = s(j, k).real();
        out(2 * j, 2 * k + 1) = -d(j, k).imag();
        out(2 * j + 1, 2 * k) = s(j, k).imag();
        out(2 * j + 1, 2 * k + 1) = d(j, k).real();
      }
    return out;
  }

  GaussianState apply(const GaussianState& st) const {
    if (st.num_modes() != size()) throw ShapeError("transform size does not match state");
    RMat s = to_real();
    RMat c = s * st.cov() * s.transpose();
    c = 0.5 * (c + c.transpose()).eval();
    return GaussianState(s * st.mean(), c, st.basis());
  }

 private:
  CMat alpha_, beta_;
};

}  // namespace eosq

#endif
