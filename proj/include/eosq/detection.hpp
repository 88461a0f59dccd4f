#ifndef EOSQ_DETECTION_HPP
#define EOSQ_DETECTION_HPP

#include "spectral.hpp"

namespace eosq {

// Hermitian observable O = (1/sqrt2) sum_k dw (a_k a_k + conj(a_k) a_k^dag)
// plus an optional auxiliary vacuum channel on the same grid (an open
// beam-splitter port). Creation coefficients are conj(a) by construction.
class DetectionOperator {
 public:
  DetectionOperator() : grid_(2, 1.0) {}
  DetectionOperator(SpectralMode a, double normalization = 1.0, double signal_edge = -1.0)
      : grid_(a.grid()), a_(a.coeffs()), normalization_(normalization), signal_edge_(signal_edge) {
    if (!(normalization > 0)) throw DomainError("detection normalization must be positive");
  }

  const FrequencyGrid& grid() const { return grid_; }
  SpectralMode a_mode() const { return SpectralMode(grid_, a_); }
  const CVec& a_coeffs() const { return a_; }
  CVec b_coeffs() const { return a_.conjugate(); }
  const CVec& aux_coeffs() const { return aux_; }
  bool has_aux() const { return aux_.size() > 0; }
  double normalization() const { return normalization_; }
  // Boundary between signal (below) and probe (above) bins; negative if unset.
  double signal_edge() const { return signal_edge_; }
  double offset() const { return offset_; }

  void set_aux(CVec aux) {
    if (aux.size() != 0 && static_cast<std::size_t>(aux.size()) != grid_.size())
      throw ShapeError("aux channel length mismatch");
    aux_ = std::move(aux);
  }
  void set_offset(double v) { offset_ = v; }
  // Shot-noise weight of the probe without the crystal; when unset the
  // probe-band weight of the operator itself is used.
  void set_probe_reference(double w) {
    if (!(w > 0)) throw DomainError("probe reference weight must be positive");
    probe_reference_ = w;
  }
  bool has_probe_reference() const { return probe_reference_ > 0; }
  void set_signal_edge(double e) { signal_edge_ = e; }

  double total_weight() const {
    double w = a_.squaredNorm();
    if (has_aux()) w += aux_.squaredNorm();
    return w * grid_.delta_omega();
  }
  double vacuum_variance() const { return 0.5 * total_weight(); }

  // Weight of bins with lo <= w_k < hi.
  double band_weight(double lo, double hi) const {
    std::size_t k0 = grid_.count_below(lo), k1 = grid_.count_below(hi);
    double s = 0;
    for (std::size_t k = k0; k < k1; ++k) s += std::norm(a_[static_cast<Eigen::Index>(k)]);
    return s * grid_.delta_omega();
  }
  double signal_weight() const { return band_weight(0.0, edge_or_max()); }
  double shot_weight() const {
    double w = probe_reference_ > 0 ? probe_reference_ : band_weight(edge_or_max(), 2.0 * grid_.omega_max());
    if (has_aux()) w += aux_.squaredNorm() * grid_.delta_omega();
    return w;
  }

  DetectionOperator scaled(double s) const {
    DetectionOperator o = *this;
    o.a_ *= s;
    if (has_aux()) o.aux_ *= s;
    o.offset_ *= s;
    if (probe_reference_ > 0) o.probe_reference_ *= s * s;
    return o;
  }
  DetectionOperator normalized() const {
    double w = total_weight();
    if (!(w > 0)) throw DomainError("cannot normalize a zero operator");
    return scaled(1.0 / std::sqrt(w));
  }
  // Observable sampled at t later: every coefficient picks up e^{-i w t}.
  DetectionOperator delayed(double t) const {
    DetectionOperator o = *this;
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      cplx ph = std::polar(1.0, -grid_.omega(k) * t);
      auto e = static_cast<Eigen::Index>(k);
      o.a_[e] *= ph;
      if (has_aux()) o.aux_[e] *= ph;
    }
    return o;
  }

 private:
  double edge_or_max() const { return signal_edge_ > 0 ? signal_edge_ : 2.0 * grid_.omega_max(); }

  FrequencyGrid grid_;
  CVec a_;
  CVec aux_;
  double normalization_ = 1.0;
  double signal_edge_ = -1.0;
  double offset_ = 0.0;
  double probe_reference_ = -1.0;
};

inline cplx aux_overlap(const DetectionOperator& x, const DetectionOperator& y) {
  if (!x.has_aux() || !y.has_aux()) return 0.0;
  return x.aux_coeffs().dot(y.aux_coeffs()) * x.grid().delta_omega();
}

// [O1, O2] = i * commutator_im(O1, O2).
inline double commutator_im(const DetectionOperator& o1, const DetectionOperator& o2) {
  if (o1.grid() != o2.grid()) throw ShapeError("operators live on different grids");
  cplx s = o2.a_coeffs().dot(o1.a_coeffs()) * o1.grid().delta_omega() + aux_overlap(o2, o1);
  return s.imag();
}

// Symmetrized vacuum covariance <{O1, O2}>/2.
inline double vacuum_covariance(const DetectionOperator& o1, const DetectionOperator& o2) {
  if (o1.grid() != o2.grid()) throw ShapeError("operators live on different grids");
  cplx s = o1.a_coeffs().dot(o2.a_coeffs()) * o1.grid().delta_omega() + aux_overlap(o1, o2);
  return 0.5 * s.real();
}

}  // namespace eosq

#endif
