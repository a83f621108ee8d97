#pragma once

#include <string>
#include <vector>

#include "gdplan/scene/types.hpp"

namespace gdplan::scene {

enum class Maneuver { go_straight, turn_left, turn_right, stationary };

struct NavInstruction {
  Maneuver maneuver = Maneuver::stationary;
  double distance_m = 0.0;  // rounded to 0.1 m
  std::string text() const;
};

// Straight/turn split at |net heading change| = pi/12; distance is the path
// arc length rounded to 0.1 m. A path whose length rounds to zero reads
// "Remain stationary".

// future: [t_future, 3] rows (x, y, heading) in the ego frame of the view
// tick; the path starts at the origin.
NavInstruction nav_from_future(const std::vector<double>& future_xyh);

// Inference-time substitute: previews the route centerline ahead of the ego
// for the distance it would cover over the future horizon at current speed
// (at least 2 m), and reads maneuver and length off that stretch.
NavInstruction nav_from_route(const Scenario& s, int tick, const ModelDims& dims = {});

std::string build_navigation_instruction(const std::vector<double>& future_xyh);
std::string build_navigation_instruction(const Scenario& s, int tick, const ModelDims& dims = {});

// Exact inverse of NavInstruction::text().
NavInstruction parse_navigation_instruction(const std::string& text);

}  // namespace gdplan::scene
