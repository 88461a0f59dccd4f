#ifndef EOSQ_UNITS_HPP
#define EOSQ_UNITS_HPP

#include <cmath>
#include <numbers>

#include "error.hpp"

namespace eosq {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kSpeedOfLight = 2.99792458e8;
inline constexpr double kEpsilon0 = 8.8541878128e-12;

// Ordinary frequency in THz to angular frequency in rad/s and back.
inline constexpr double thz(double f) { return 2.0 * kPi * f * 1e12; }
inline constexpr double to_thz(double omega) { return omega / (2.0 * kPi * 1e12); }
inline constexpr double fs(double t) { return t * 1e-15; }

struct PhysicalConstants {
  double hbar = kHbar;
  double c = kSpeedOfLight;
  double cross_section_A = 4.565e-11;
  double epsilon_0 = kEpsilon0;

  static PhysicalConstants si() { return {}; }
  static PhysicalConstants natural() { return {1.0, 1.0, 1.0, 1.0}; }

  void validate() const {
    if (!(hbar > 0 && c > 0 && cross_section_A > 0 && epsilon_0 > 0))
      throw DomainError("physical constants must be strictly positive");
  }
};

}  // namespace eosq

#endif
