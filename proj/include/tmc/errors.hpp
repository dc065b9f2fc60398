#pragma once

#include <stdexcept>
#include <string>

namespace tmc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularTensorError : public Error {
 public:
  using Error::Error;
};

// J <= 0 at a material point. Element and point indices are filled in as the
// error propagates out of element evaluation (-1 while unknown).
class SingularKinematicsError : public Error {
 public:
  explicit SingularKinematicsError(double J, int element = -1, int point = -1)
      : Error(describe(J, element, point)), J_(J), element_(element), point_(point) {}

  double J() const { return J_; }
  int element() const { return element_; }
  int point() const { return point_; }

 private:
  static std::string describe(double J, int element, int point) {
    std::string msg = "non-positive volume ratio J = " + std::to_string(J);
    if (element >= 0) msg += " in element " + std::to_string(element);
    if (point >= 0) msg += " at quadrature point " + std::to_string(point);
    return msg;
  }

  double J_;
  int element_;
  int point_;
};

// Inverted or degenerate element geometry.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IllConditionedError : public Error {
 public:
  using Error::Error;
};

class NotInContactError : public Error {
 public:
  using Error::Error;
};

}  // namespace tmc
