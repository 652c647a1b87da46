#pragma once

namespace sparsenav {

struct SteeringParams {
  double alpha = 1.0;   // gain, rad/s
  double v_test = 0.2;  // linear speed in wheel units

  void validate() const;
};

struct SteeringCommand {
  double v = 0.0;      // wheel speed units (see kSpeedUnitMps)
  double omega = 0.0;  // rad/s, positive = counter-clockwise
};

// omega = alpha * (d_left - d_right) / (d_left + d_right), and 0 when both novelties are 0.
// Throws std::invalid_argument for negative or non-finite novelty.
SteeringCommand compute_turn(double d_left, double d_right, const SteeringParams& params);

}  // namespace sparsenav
