#pragma once

#include <algorithm>
#include <cmath>

namespace gdplan::sim {

struct IdmParams {
  double desired_speed = 13.9;   // m/s, usually the lane limit
  double time_headway = 1.5;     // s
  double min_gap = 2.0;          // m
  double max_accel = 1.5;        // m/s^2
  double comfort_decel = 2.0;    // m/s^2
  double exponent = 4.0;
};

// Classic car-following acceleration. gap is bumper-to-bumper; pass a huge
// gap (and any lead speed) when there is no leader.
inline double idm_accel(double v, double v_lead, double gap, const IdmParams& p) {
  const double v0 = std::max(0.1, p.desired_speed);
  const double free_term = std::pow(std::max(0.0, v) / v0, p.exponent);
  double interaction = 0.0;
  if (gap < 1e8) {
    const double s_star =
        p.min_gap + std::max(0.0, v * p.time_headway +
                                      v * (v - v_lead) /
                                          (2.0 * std::sqrt(p.max_accel * p.comfort_decel)));
    const double s = std::max(0.1, gap);
    interaction = (s_star / s) * (s_star / s);
  }
  return p.max_accel * (1.0 - free_term - interaction);
}

}  // namespace gdplan::sim
