#ifndef EOSQ_ERROR_HPP
#define EOSQ_ERROR_HPP

#include <stdexcept>
#include <string>

namespace eosq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Joint readout requested on ports that do not commute.
class NonCommutingError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

class BasisTooSmallError : public Error {
 public:
  BasisTooSmallError(const std::string& what, double residual_fraction)
      : Error(what), residual_fraction_(residual_fraction) {}
  double residual_fraction() const { return residual_fraction_; }

 private:
  double residual_fraction_;
};

class UndefinedMatchingError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double closest_bandwidth, double closest_gamma)
      : Error(what), closest_bandwidth_(closest_bandwidth), closest_gamma_(closest_gamma) {}
  double closest_bandwidth() const { return closest_bandwidth_; }
  double closest_gamma() const { return closest_gamma_; }

 private:
  double closest_bandwidth_;
  double closest_gamma_;
};

}  // namespace eosq

#endif
