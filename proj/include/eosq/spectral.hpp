#ifndef EOSQ_SPECTRAL_HPP
#define EOSQ_SPECTRAL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "error.hpp"
#include "units.hpp"

namespace eosq {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Positive angular frequencies on a half-bin offset grid: w_k = (k + 1/2) dw.
class FrequencyGrid {
 public:
  FrequencyGrid(std::size_t n_points, double omega_max) : n_(n_points), omega_max_(omega_max) {
    if (n_points < 2) throw DomainError("grid needs at least two points");
    if (!(omega_max > 0) || !std::isfinite(omega_max)) throw DomainError("grid omega_max must be positive");
    dw_ = omega_max / static_cast<double>(n_points);
  }

  static FrequencyGrid from_thz(double f_max_thz, std::size_t n_points) {
    return FrequencyGrid(n_points, thz(f_max_thz));
  }

  std::size_t size() const { return n_; }
  double omega_max() const { return omega_max_; }
  double delta_omega() const { return dw_; }
  double omega(std::size_t k) const { return (static_cast<double>(k) + 0.5) * dw_; }

  RVec omegas() const {
    RVec w(static_cast<Eigen::Index>(n_));
    for (std::size_t k = 0; k < n_; ++k) w[static_cast<Eigen::Index>(k)] = omega(k);
    return w;
  }

  // Number of bins whose centre lies strictly below omega.
  std::size_t count_below(double omega) const {
    if (omega <= 0) return 0;
    double p = std::ceil(omega / dw_ - 0.5);
    if (p < 0) return 0;
    return std::min<std::size_t>(n_, static_cast<std::size_t>(p));
  }
  // Number of bins whose centre lies at or below omega.
  std::size_t count_at_or_below(double omega) const {
    if (omega <= 0) return 0;
    double p = std::floor(omega / dw_ - 0.5) + 1.0;
    if (p < 0) return 0;
    return std::min<std::size_t>(n_, static_cast<std::size_t>(p));
  }

  bool operator==(const FrequencyGrid& o) const { return n_ == o.n_ && omega_max_ == o.omega_max_; }
  bool operator!=(const FrequencyGrid& o) const { return !(*this == o); }

 private:
  std::size_t n_;
  double omega_max_;
  double dw_;
};

// Coefficient density over a FrequencyGrid; <a,b> = sum conj(a_k) b_k dw.
class SpectralMode {
 public:
  explicit SpectralMode(const FrequencyGrid& grid)
      : grid_(grid), c_(CVec::Zero(static_cast<Eigen::Index>(grid.size()))) {}
  SpectralMode(const FrequencyGrid& grid, CVec coeffs) : grid_(grid), c_(std::move(coeffs)) {
    if (static_cast<std::size_t>(c_.size()) != grid_.size())
      throw ShapeError("mode length " + std::to_string(c_.size()) + " does not match grid size " +
                       std::to_string(grid_.size()));
  }

  const FrequencyGrid& grid() const { return grid_; }
  const CVec& coeffs() const { return c_; }
  CVec& coeffs() { return c_; }
  cplx operator[](std::size_t k) const { return c_[static_cast<Eigen::Index>(k)]; }
  cplx& operator[](std::size_t k) { return c_[static_cast<Eigen::Index>(k)]; }
  std::size_t size() const { return grid_.size(); }

  double norm2() const { return c_.squaredNorm() * grid_.delta_omega(); }
  double norm() const { return std::sqrt(norm2()); }

  SpectralMode normalized() const {
    double n = norm();
    if (!(n > 0)) throw DomainError("cannot normalize a zero mode");
    return SpectralMode(grid_, c_ / n);
  }

  SpectralMode operator+(const SpectralMode& o) const {
    check_same(o);
    return SpectralMode(grid_, c_ + o.c_);
  }
  SpectralMode operator-(const SpectralMode& o) const {
    check_same(o);
    return SpectralMode(grid_, c_ - o.c_);
  }
  SpectralMode operator-() const { return SpectralMode(grid_, -c_); }
  SpectralMode operator*(cplx s) const { return SpectralMode(grid_, c_ * s); }
  friend SpectralMode operator*(cplx s, const SpectralMode& m) { return m * s; }

  void check_same(const SpectralMode& o) const {
    if (grid_ != o.grid_) throw ShapeError("modes live on different grids");
  }

 private:
  FrequencyGrid grid_;
  CVec c_;
};

inline cplx overlap(const SpectralMode& a, const SpectralMode& b) {
  a.check_same(b);
  return a.coeffs().dot(b.coeffs()) * a.grid().delta_omega();
}

}  // namespace eosq

#endif
