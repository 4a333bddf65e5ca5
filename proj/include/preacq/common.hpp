#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace preacq {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Item identifiers double as 8-bit mask labels, so 0 means background and
/// valid items are 1..255.
using ItemId = std::uint32_t;
inline constexpr ItemId kBackground = 0;
inline constexpr ItemId kMaxItemId = 255;

/// Neumaier compensated summation, for totals that must not drift with the
/// number of terms. T is double or a fixed-size Eigen vector.
template <typename T>
class CompensatedSum {
 public:
  CompensatedSum() { zero(sum_), zero(carry_); }
  void add(const T& v) {
    const T t = sum_ + v;
    carry_ += big_minus(sum_, v, t);
    sum_ = t;
  }
  T value() const { return sum_ + carry_; }

 private:
  static void zero(double& v) { v = 0.0; }
  template <typename M>
  static void zero(M& v) { v.setZero(); }
  static double big_minus(double a, double b, double t) {
    return std::abs(a) >= std::abs(b) ? (a - t) + b : (b - t) + a;
  }
  template <typename M>
  static M big_minus(const M& a, const M& b, const M& t) {
    M out;
    for (int i = 0; i < out.size(); ++i) out[i] = big_minus(a[i], b[i], t[i]);
    return out;
  }
  T sum_;
  T carry_;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed scene configuration. `field` names the offending JSON path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class SimulationError : public Error {
 public:
  enum class Kind { Blowup, Inversion, CflViolation };

  SimulationError(Kind kind, std::int64_t particle, std::int64_t step, const std::string& what)
      : Error(what), kind_(kind), particle_(particle), step_(step) {}

  Kind kind() const { return kind_; }
  std::int64_t particle() const { return particle_; }
  std::int64_t step() const { return step_; }

 private:
  Kind kind_;
  std::int64_t particle_;
  std::int64_t step_;
};

class InfeasibleAction : public Error {
 public:
  using Error::Error;
};

}  // namespace preacq
