#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>
#include <string>

namespace fewlab {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Exact rational scalar. Expression templates are disabled so the type
/// behaves like a plain value inside Eigen containers.
using Rational = boost::multiprecision::number<
    boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point outside the domain of a function (e.g. the characteristic
/// function evaluated on the boundary of the dual cone).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The Minkowski sum is lower dimensional, so its normal fan has no
/// full-dimensional cones.
class DegenerateFanError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Zero test used by templated algorithms: exact for rationals, absolute
/// tolerance for floating point.
template <typename Scalar>
struct Tolerance {
  static Scalar eps() { return Scalar(0); }
};

template <>
struct Tolerance<double> {
  static double eps() { return 1e-11; }
};

template <typename Scalar>
inline double to_double(const Scalar& x) {
  return static_cast<double>(x);
}

}  // namespace fewlab
