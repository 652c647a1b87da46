#include "sparsenav/steering.hpp"

#include <cmath>
#include <stdexcept>

#include "sparsenav/errors.hpp"

namespace sparsenav {

void SteeringParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("steering alpha must be positive");
  if (!std::isfinite(v_test)) throw ConfigError("steering v_test must be finite");
}

SteeringCommand compute_turn(double d_left, double d_right, const SteeringParams& params) {
  if (!(d_left >= 0.0) || !(d_right >= 0.0) || !std::isfinite(d_left) || !std::isfinite(d_right)) {
    throw std::invalid_argument("compute_turn: novelty must be finite and nonnegative");
  }
  const double total = d_left + d_right;
  // Ratio first: |fl(l - r)| <= fl(l + r), so |omega| never exceeds alpha by an ulp.
  const double omega = total > 0.0 ? params.alpha * ((d_left - d_right) / total) : 0.0;
  return {params.v_test, omega};
}

}  // namespace sparsenav
