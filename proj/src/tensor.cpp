#include "tmc/tensor.hpp"

#include <algorithm>

namespace tmc {

std::pair<double, Tensor2> det_inv(const Tensor2& a) {
  const double d = a.det();
  const double threshold = 1e-14 * std::max(1.0, frobenius_norm_sq(a));
  if (!(std::abs(d) >= threshold)) {
    throw SingularTensorError("singular 2x2 tensor, det = " + std::to_string(d));
  }
  const double inv = 1.0 / d;
  return {d, Tensor2{a.a22 * inv, -a.a12 * inv, -a.a21 * inv, a.a11 * inv}};
}

}  // namespace tmc
