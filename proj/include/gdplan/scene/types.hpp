#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gdplan/config.hpp"
#include "gdplan/scene/geometry.hpp"

namespace gdplan::scene {

constexpr int kScenarioTypeCount = 14;

enum class AgentClass { vehicle = 1, pedestrian = 2, bicycle = 3 };
const char* agent_class_name(AgentClass c);
AgentClass agent_class_from_name(const std::string& name);

enum class LightState { red, green, unknown };
const char* light_state_name(LightState s);
LightState light_state_from_name(const std::string& name);

// One tick of any tracked body, global frame, SI units, 10 Hz logs.
struct BodyState {
  double x = 0.0, y = 0.0;
  double heading = 0.0;       // (-pi, pi]
  double vx = 0.0, vy = 0.0;
  double ax = 0.0, ay = 0.0;
  double length = 0.0, width = 0.0;

  geom::Vec2 pos() const { return {x, y}; }
  geom::Vec2 vel() const { return {vx, vy}; }
  double speed() const { return std::hypot(vx, vy); }
  geom::Obb box() const { return {x, y, heading, length, width}; }
};

using EgoState = BodyState;
using AgentState = BodyState;

struct AgentLog {
  int id = 0;
  AgentClass cls = AgentClass::vehicle;
  // Present only in camera features: excluded from scene views and map
  // tokens, but physical for collision checking.
  bool feature_only = false;
  std::vector<AgentState> states;
};

struct LanePoint {
  double x = 0.0, y = 0.0;
  double heading = 0.0;
  double speed_limit = 0.0;  // m/s
};

struct LaneSegment {
  int id = 0;
  std::vector<LanePoint> centerline;  // n_points entries
  std::vector<int> successors;
  int left = -1;   // adjacent lane id or -1
  int right = -1;
  bool is_intersection = false;

  std::vector<geom::Vec2> points() const;
};

struct CrosswalkPolygon {
  int id = 0;
  std::vector<LanePoint> boundary;  // n_points entries, heading/speed fields zero

  std::vector<geom::Vec2> points() const;
};

struct Camera {
  std::string name;
  double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;
  int width = 0, height = 0;
  // rigid pose relative to the ego frame: position + yaw about z
  double x = 0.0, y = 0.0, z = 0.0, yaw = 0.0;
};

struct CameraRig {
  std::vector<Camera> cameras;
};

struct Scenario {
  std::string id;
  int scenario_type = 0;  // 0..13
  std::vector<LaneSegment> lanes;
  std::vector<CrosswalkPolygon> crosswalks;
  std::vector<EgoState> ego_log;
  std::vector<AgentLog> agents;
  std::vector<int> route_lane_ids;
  // per tick: (lane id, state) pairs sorted by lane id
  std::vector<std::vector<std::pair<int, LightState>>> traffic_lights;
  CameraRig rig;

  int tick_count() const { return static_cast<int>(ego_log.size()); }
  const LaneSegment* lane_by_id(int id) const;
  // Route centerline concatenated in route order.
  std::vector<geom::Vec2> route_polyline() const;
  LightState light_for_lane(int tick, int lane_id) const;
};

// Throws InvariantError naming the violated check. `dims` supplies the
// minimum tick count (t_history + t_future).
void validate_scenario(const Scenario& s, const ModelDims& dims = {});

// Ego-centric slice of the world at one tick. Row-major blocks, zero padded;
// a mask bit of 0 means the whole row block is zero.
struct LocalSceneView {
  int t_history = 0, t_future = 0;
  int n_neighbors = 0, n_lanes = 0, n_crosswalks = 0, n_points = 0;
  int d_ego = 0, d_agent = 0, d_point = 0;

  std::vector<double> s_ego;        // [1, t_history, d_ego]
  std::vector<double> s_neighbor;   // [n_neighbors, t_history, d_agent]
  std::vector<double> m_lane;       // [n_lanes, n_points, d_point]
  std::vector<double> m_crosswalk;  // [n_crosswalks, n_points, d_point]
  bool ego_valid = true;
  std::vector<uint8_t> neighbor_mask;   // [n_neighbors]
  std::vector<uint8_t> lane_mask;       // [n_lanes]
  std::vector<uint8_t> crosswalk_mask;  // [n_crosswalks]

  bool has_future = false;
  std::vector<double> future_gt;  // [t_future, 3] (x, y, heading)

  // ego pose at the view tick, global frame (for mapping plans back)
  double origin_x = 0.0, origin_y = 0.0, origin_heading = 0.0;
};

}  // namespace gdplan::scene
