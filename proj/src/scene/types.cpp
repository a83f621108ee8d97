#include "gdplan/scene/types.hpp"

#include <algorithm>
#include <set>

#include "gdplan/errors.hpp"

namespace gdplan::scene {

const char* agent_class_name(AgentClass c) {
  switch (c) {
    case AgentClass::vehicle: return "vehicle";
    case AgentClass::pedestrian: return "pedestrian";
    case AgentClass::bicycle: return "bicycle";
  }
  return "vehicle";
}

AgentClass agent_class_from_name(const std::string& name) {
  if (name == "vehicle") return AgentClass::vehicle;
  if (name == "pedestrian") return AgentClass::pedestrian;
  if (name == "bicycle") return AgentClass::bicycle;
  throw ParseError("unknown agent class '" + name + "'");
}

const char* light_state_name(LightState s) {
  switch (s) {
    case LightState::red: return "red";
    case LightState::green: return "green";
    case LightState::unknown: return "unknown";
  }
  return "unknown";
}

LightState light_state_from_name(const std::string& name) {
  if (name == "red") return LightState::red;
  if (name == "green") return LightState::green;
  if (name == "unknown") return LightState::unknown;
  throw ParseError("unknown traffic light state '" + name + "'");
}

std::vector<geom::Vec2> LaneSegment::points() const {
  std::vector<geom::Vec2> pts;
  pts.reserve(centerline.size());
  for (const LanePoint& p : centerline) pts.push_back({p.x, p.y});
  return pts;
}

std::vector<geom::Vec2> CrosswalkPolygon::points() const {
  std::vector<geom::Vec2> pts;
  pts.reserve(boundary.size());
  for (const LanePoint& p : boundary) pts.push_back({p.x, p.y});
  return pts;
}

const LaneSegment* Scenario::lane_by_id(int id) const {
  for (const LaneSegment& l : lanes)
    if (l.id == id) return &l;
  return nullptr;
}

std::vector<geom::Vec2> Scenario::route_polyline() const {
  std::vector<geom::Vec2> pts;
  for (int id : route_lane_ids) {
    const LaneSegment* lane = lane_by_id(id);
    if (lane == nullptr) continue;
    for (const LanePoint& p : lane->centerline) {
      const geom::Vec2 v{p.x, p.y};
      if (!pts.empty() && (v - pts.back()).norm() < 1e-9) continue;
      pts.push_back(v);
    }
  }
  return pts;
}

LightState Scenario::light_for_lane(int tick, int lane_id) const {
  if (tick < 0 || tick >= static_cast<int>(traffic_lights.size())) return LightState::unknown;
  for (const auto& [id, state] : traffic_lights[static_cast<std::size_t>(tick)])
    if (id == lane_id) return state;
  return LightState::unknown;
}

void validate_scenario(const Scenario& s, const ModelDims& dims) {
  auto fail = [&](const std::string& check) {
    throw InvariantError("scenario '" + s.id + "': " + check);
  };

  if (s.scenario_type < 0 || s.scenario_type >= kScenarioTypeCount)
    fail("scenario_type must be in [0, 14), got " + std::to_string(s.scenario_type));

  const int ticks = s.tick_count();
  if (ticks < dims.min_ticks())
    fail("tick count " + std::to_string(ticks) + " below required " +
         std::to_string(dims.min_ticks()));
  for (const AgentLog& a : s.agents)
    if (static_cast<int>(a.states.size()) != ticks)
      fail("agent " + std::to_string(a.id) + " log length " + std::to_string(a.states.size()) +
           " != ego log length " + std::to_string(ticks));
  if (!s.traffic_lights.empty() && static_cast<int>(s.traffic_lights.size()) != ticks)
    fail("traffic_lights length " + std::to_string(s.traffic_lights.size()) +
         " != tick count " + std::to_string(ticks));

  std::set<int> lane_ids;
  std::size_t n_points = s.lanes.empty() ? 0 : s.lanes.front().centerline.size();
  for (const LaneSegment& l : s.lanes) {
    if (!lane_ids.insert(l.id).second) fail("duplicate lane id " + std::to_string(l.id));
    if (l.centerline.size() != n_points)
      fail("lane " + std::to_string(l.id) + " has " + std::to_string(l.centerline.size()) +
           " centerline points, expected " + std::to_string(n_points));
    for (std::size_t i = 1; i < l.centerline.size(); ++i) {
      const double dx = l.centerline[i].x - l.centerline[i - 1].x;
      const double dy = l.centerline[i].y - l.centerline[i - 1].y;
      if (dx * dx + dy * dy <= 0.0)
        fail("lane " + std::to_string(l.id) + " centerline not monotone in arc length at point " +
             std::to_string(i));
    }
  }
  for (const LaneSegment& l : s.lanes) {
    for (int succ : l.successors)
      if (!lane_ids.count(succ))
        fail("lane " + std::to_string(l.id) + " successor " + std::to_string(succ) +
             " does not exist");
  }
  for (int id : s.route_lane_ids)
    if (!lane_ids.count(id)) fail("route references missing lane id " + std::to_string(id));

  for (const CrosswalkPolygon& c : s.crosswalks)
    if (c.boundary.size() != n_points && !s.lanes.empty())
      fail("crosswalk " + std::to_string(c.id) + " has " + std::to_string(c.boundary.size()) +
           " boundary points, expected " + std::to_string(n_points));

  auto check_state = [&](const BodyState& st, const std::string& who) {
    if (!(st.length > 0.0) || !(st.width > 0.0))
      fail(who + " must have positive box dimensions");
    if (!(st.heading > -geom::kPi - 1e-12) || !(st.heading <= geom::kPi + 1e-12))
      fail(who + " heading " + std::to_string(st.heading) + " outside (-pi, pi]");
  };
  for (std::size_t t = 0; t < s.ego_log.size(); ++t)
    check_state(s.ego_log[t], "ego tick " + std::to_string(t));
  for (const AgentLog& a : s.agents)
    for (std::size_t t = 0; t < a.states.size(); ++t)
      check_state(a.states[t], "agent " + std::to_string(a.id) + " tick " + std::to_string(t));

  for (const Camera& cam : s.rig.cameras)
    if (!(cam.fx > 0.0) || !(cam.fy > 0.0))
      fail("camera '" + cam.name + "' needs positive focal lengths");
}

}  // namespace gdplan::scene
