#include "gdplan/scene/navigation.hpp"

#include <cmath>
#include <cstdio>

#include "gdplan/errors.hpp"

namespace gdplan::scene {

namespace {

constexpr double kTurnThreshold = geom::kPi / 12.0;

NavInstruction classify(double arc_len, double net_heading_change) {
  NavInstruction nav;
  nav.distance_m = std::round(arc_len * 10.0) / 10.0;
  if (nav.distance_m <= 0.0) {
    nav.maneuver = Maneuver::stationary;
    nav.distance_m = 0.0;
    return nav;
  }
  const double d = geom::wrap_angle(net_heading_change);
  if (std::fabs(d) < kTurnThreshold) nav.maneuver = Maneuver::go_straight;
  else nav.maneuver = d > 0.0 ? Maneuver::turn_left : Maneuver::turn_right;
  return nav;
}

double heading_on_polyline(const std::vector<geom::Vec2>& pts, const std::vector<double>& cum,
                           double s) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (s <= cum[i + 1] || i + 2 == pts.size()) {
      const geom::Vec2 d = pts[i + 1] - pts[i];
      return std::atan2(d.y, d.x);
    }
  }
  return 0.0;
}

}  // namespace

std::string NavInstruction::text() const {
  if (maneuver == Maneuver::stationary) return "Remain stationary";
  const char* verb = maneuver == Maneuver::go_straight ? "Go straight"
                     : maneuver == Maneuver::turn_left ? "Turn left"
                                                       : "Turn right";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s for %.1fm", verb, distance_m);
  return buf;
}

NavInstruction nav_from_future(const std::vector<double>& future_xyh) {
  if (future_xyh.size() % 3 != 0)
    throw InvariantError("nav_from_future: expected [t,3] rows, got length " +
                         std::to_string(future_xyh.size()));
  const std::size_t n = future_xyh.size() / 3;
  double arc = 0.0;
  double px = 0.0, py = 0.0;  // path starts at the ego origin
  for (std::size_t t = 0; t < n; ++t) {
    const double x = future_xyh[t * 3], y = future_xyh[t * 3 + 1];
    arc += std::hypot(x - px, y - py);
    px = x;
    py = y;
  }
  const double net = n > 0 ? future_xyh[(n - 1) * 3 + 2] : 0.0;  // start heading is 0
  return classify(arc, net);
}

NavInstruction nav_from_route(const Scenario& s, int tick, const ModelDims& dims) {
  if (tick < 0 || tick >= s.tick_count())
    throw InvariantError("nav_from_route: tick out of range");
  const std::vector<geom::Vec2> route = s.route_polyline();
  if (route.size() < 2) return classify(0.0, 0.0);
  const std::vector<double> cum = geom::cumulative_arc(route);

  const EgoState& ego = s.ego_log[static_cast<std::size_t>(tick)];
  const geom::Projection proj = geom::project_to_polyline(route, ego.pos());
  const double preview =
      std::max(2.0, ego.speed() * dims.t_future * dims.dt);
  const double s0 = proj.arc_s;
  const double s1 = std::min(cum.back(), s0 + preview);
  if (s1 - s0 < 0.05) return classify(0.0, 0.0);

  const double h0 = heading_on_polyline(route, cum, s0);
  const double h1 = heading_on_polyline(route, cum, s1);
  return classify(s1 - s0, h1 - h0);
}

std::string build_navigation_instruction(const std::vector<double>& future_xyh) {
  return nav_from_future(future_xyh).text();
}

std::string build_navigation_instruction(const Scenario& s, int tick, const ModelDims& dims) {
  return nav_from_route(s, tick, dims).text();
}

NavInstruction parse_navigation_instruction(const std::string& text) {
  NavInstruction nav;
  if (text == "Remain stationary") return nav;
  const char* verbs[] = {"Go straight", "Turn left", "Turn right"};
  const Maneuver kinds[] = {Maneuver::go_straight, Maneuver::turn_left, Maneuver::turn_right};
  for (int i = 0; i < 3; ++i) {
    const std::string prefix = std::string(verbs[i]) + " for ";
    if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size() && text.back() == 'm') {
      nav.maneuver = kinds[i];
      const std::string num = text.substr(prefix.size(), text.size() - prefix.size() - 1);
      try {
        nav.distance_m = std::stod(num);
      } catch (...) {
        throw ParseError("navigation instruction has bad distance: '" + text + "'");
      }
      return nav;
    }
  }
  throw ParseError("unrecognized navigation instruction: '" + text + "'");
}

}  // namespace gdplan::scene
