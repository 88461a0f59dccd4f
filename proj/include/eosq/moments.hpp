#ifndef EOSQ_MOMENTS_HPP
#define EOSQ_MOMENTS_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "gaussian.hpp"

namespace eosq {

struct SqueezedSignal {
  SpectralMode mode;
  GaussianState state;
};

// G(W) ~ sqrt(W) exp(-(W0 - W)^2 / (4 sG^2)), unit norm, single-mode squeezed state.
inline SqueezedSignal squeezed_signal(double omega0, double sigma_g, double r, const FrequencyGrid& grid) {
  if (!(omega0 > 0) || !(sigma_g > 0)) throw DomainError("signal centre and width must be positive");
  if (omega0 + 4.0 * sigma_g > grid.omega_max()) throw RangeError("signal spectrum wider than grid support");
  SpectralMode g(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double w = grid.omega(k);
    double d = omega0 - w;
    g.coeffs()[static_cast<Eigen::Index>(k)] = std::sqrt(w) * std::exp(-d * d / (4.0 * sigma_g * sigma_g));
  }
  g = g.normalized();
  RMat cov = RMat::Zero(2, 2);
  cov(0, 0) = 0.5 * std::exp(-2.0 * r);
  cov(1, 1) = 0.5 * std::exp(2.0 * r);
  return {g, GaussianState(RVec::Zero(2), cov, ModeBasis({g}))};
}

// O = sum_m (g_x[m] x_m + g_p[m] p_m) + out-of-basis vacuum part.
struct Projection {
  RVec g;                 // length 2M, (x, p) interleaved
  CVec z;                 // complex amplitudes on the mode annihilators
  CVec residual;          // leftover coefficients over the grid
  double residual_weight; // sum |r|^2 dw, plus aux weight
  double total_weight;
};

inline Projection project(const DetectionOperator& op, const ModeBasis& basis) {
  Projection p;
  std::size_t m = basis.size();
  double dw = op.grid().delta_omega();
  p.z = CVec::Zero(static_cast<Eigen::Index>(m));
  p.g = RVec::Zero(static_cast<Eigen::Index>(2 * m));
  p.residual = op.a_coeffs();
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i].grid() != op.grid()) throw ShapeError("operator and basis live on different grids");
    const CVec& f = basis[i].coeffs();
    cplx z = (op.a_coeffs().array() * f.array()).sum() * dw;
    p.z[static_cast<Eigen::Index>(i)] = z;
    p.g[static_cast<Eigen::Index>(2 * i)] = z.real();
    p.g[static_cast<Eigen::Index>(2 * i + 1)] = -z.imag();
    p.residual -= z * f.conjugate();
  }
  double aux = op.has_aux() ? op.aux_coeffs().squaredNorm() * dw : 0.0;
  p.residual_weight = p.residual.squaredNorm() * dw + aux;
  p.total_weight = op.total_weight();
  return p;
}

struct MomentOptions {
  // Largest tolerated out-of-basis share of the operator weight.
  double max_residual_fraction = 0.5;
};

struct Moments {
  double mean;
  double variance;
  double residual_fraction;
};

inline Projection checked_projection(const GaussianState& st, const DetectionOperator& op, const MomentOptions& opt) {
  if (st.basis().empty()) throw ConfigError("state carries no mode basis");
  Projection p = project(op, st.basis());
  double frac = p.total_weight > 0 ? p.residual_weight / p.total_weight : 0.0;
  if (frac > opt.max_residual_fraction + 1e-12)
    throw BasisTooSmallError("operator lies mostly outside the state's mode basis", frac);
  return p;
}

inline Moments detection_moments(const GaussianState& st, const DetectionOperator& op, const MomentOptions& opt = {}) {
  Projection p = checked_projection(st, op, opt);
  double mean = p.g.dot(st.mean()) + op.offset();
  double var = p.g.dot(st.cov() * p.g) + 0.5 * p.residual_weight;
  return {mean, var, p.total_weight > 0 ? p.residual_weight / p.total_weight : 0.0};
}

inline double variance_delta(const GaussianState& st, const DetectionOperator& op, const MomentOptions& opt = {}) {
  Moments s = detection_moments(st, op, opt);
  GaussianState vac = GaussianState::vacuum(st.num_modes(), st.basis());
  Moments v = detection_moments(vac, op, opt);
  return s.variance - v.variance;
}

struct JointMoments {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
  double commutator_im;
};

inline JointMoments joint_moments(const GaussianState& st, const DetectionOperator& o1, const DetectionOperator& o2,
                                  const MomentOptions& opt = {}) {
  Projection p1 = checked_projection(st, o1, opt), p2 = checked_projection(st, o2, opt);
  double dw = o1.grid().delta_omega();
  JointMoments j;
  j.mean << p1.g.dot(st.mean()) + o1.offset(), p2.g.dot(st.mean()) + o2.offset();
  double c11 = p1.g.dot(st.cov() * p1.g) + 0.5 * p1.residual_weight;
  double c22 = p2.g.dot(st.cov() * p2.g) + 0.5 * p2.residual_weight;
  double c12 = p1.g.dot(st.cov() * p2.g) + 0.5 * (p1.residual.dot(p2.residual) * dw + aux_overlap(o1, o2)).real();
  j.cov << c11, c12, c12, c22;
  j.commutator_im = commutator_im(o1, o2);
  return j;
}

// Q(alpha) for one mode of the state, alpha = (x + i p)/sqrt2.
inline std::vector<double> husimi_q(const GaussianState& st, std::size_t mode, const std::vector<cplx>& alpha) {
  if (mode >= st.num_modes()) throw RangeError("mode index out of range");
  auto i = static_cast<Eigen::Index>(2 * mode);
  Eigen::Matrix2d s = 0.5 * (st.cov().block(i, i, 2, 2) + 0.5 * Eigen::Matrix2d::Identity());
  Eigen::Vector2d mu = st.mean().segment(i, 2) / std::sqrt(2.0);
  double det = s.determinant();
  if (!(det > 0) || s(0, 0) <= 0) throw InvariantError("Husimi covariance is not positive definite");
  Eigen::Matrix2d inv = s.inverse();
  double norm = 1.0 / (2.0 * kPi * std::sqrt(det));
  std::vector<double> q;
  q.reserve(alpha.size());
  for (const auto& a : alpha) {
    Eigen::Vector2d d(a.real() - mu[0], a.imag() - mu[1]);
    q.push_back(norm * std::exp(-0.5 * d.dot(inv * d)));
  }
  return q;
}

// Counter-based normal deviates: shot i depends only on (seed, i).
class CounterNormal {
 public:
  explicit CounterNormal(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }
  double uniform(std::uint64_t counter) const {
    std::uint64_t x = mix(mix(seed_) ^ (counter * 0xD1B54A32D192ED03ull));
    return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
  }
  std::array<double, 2> pair(std::uint64_t i) const {
    double u1 = uniform(2 * i), u2 = uniform(2 * i + 1);
    double rad = std::sqrt(-2.0 * std::log(u1));
    return {rad * std::cos(2.0 * kPi * u2), rad * std::sin(2.0 * kPi * u2)};
  }

 private:
  std::uint64_t seed_;
};

struct Shot {
  std::size_t index;
  double e;
  double h;
};

inline std::vector<Shot> sample_joint(const JointMoments& jm, std::size_t n_shots, std::uint64_t seed) {
  if (n_shots < 1) throw DomainError("need at least one shot");
  Eigen::LLT<Eigen::Matrix2d> llt(jm.cov);
  if (llt.info() != Eigen::Success) throw InvariantError("joint covariance is not positive definite");
  Eigen::Matrix2d l = llt.matrixL();
  CounterNormal rng(seed);
  std::vector<Shot> out(n_shots);
  for (std::size_t i = 0; i < n_shots; ++i) {
    auto z = rng.pair(i);
    Eigen::Vector2d v = jm.mean + l * Eigen::Vector2d(z[0], z[1]);
    out[i] = {i, v[0], v[1]};
  }
  return out;
}

inline std::vector<Shot> sample_shots(const GaussianState& st, const DetectionOperator& op_e, const DetectionOperator& op_h,
                                      std::size_t n_shots, std::uint64_t seed, const MomentOptions& opt = {}) {
  JointMoments jm = joint_moments(st, op_e, op_h, opt);
  double scale = std::sqrt(op_e.total_weight() * op_h.total_weight());
  if (std::abs(jm.commutator_im) > 1e-10 * std::max(scale, 1e-300))
    throw NonCommutingError("E and H readouts do not commute; ports overlap");
  return sample_joint(jm, n_shots, seed);
}

}  // namespace eosq

#endif
