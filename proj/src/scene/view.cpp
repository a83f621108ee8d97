#include "gdplan/scene/view.hpp"

#include <algorithm>
#include <cmath>

#include "gdplan/errors.hpp"

namespace gdplan::scene {

namespace {

struct Ranked {
  double distance;
  int id;
  std::size_t index;
};

// ascending (distance, id)
void rank_sort(std::vector<Ranked>& v) {
  std::sort(v.begin(), v.end(), [](const Ranked& a, const Ranked& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.id < b.id;
  });
}

}  // namespace

LocalSceneView build_view(const ViewInputs& in, const ModelDims& dims) {
  if (static_cast<int>(in.ego_history.size()) != dims.t_history)
    throw InvariantError("view: ego history length " + std::to_string(in.ego_history.size()) +
                         " != t_history " + std::to_string(dims.t_history));

  const EgoState& origin = in.ego_history.back();
  const double c = std::cos(-origin.heading);
  const double s = std::sin(-origin.heading);
  auto to_local_pt = [&](double x, double y) -> geom::Vec2 {
    const double dx = x - origin.x, dy = y - origin.y;
    return {c * dx - s * dy, s * dx + c * dy};
  };
  auto to_local_vec = [&](double x, double y) -> geom::Vec2 {
    return {c * x - s * y, s * x + c * y};
  };

  LocalSceneView view;
  view.t_history = dims.t_history;
  view.t_future = dims.t_future;
  view.n_neighbors = dims.n_neighbors;
  view.n_lanes = dims.n_lanes;
  view.n_crosswalks = dims.n_crosswalks;
  view.n_points = dims.n_points;
  view.d_ego = dims.d_ego;
  view.d_agent = dims.d_agent;
  view.d_point = dims.d_point;
  view.origin_x = origin.x;
  view.origin_y = origin.y;
  view.origin_heading = origin.heading;

  // ego block
  view.s_ego.assign(static_cast<std::size_t>(dims.t_history) * dims.d_ego, 0.0);
  for (int t = 0; t < dims.t_history; ++t) {
    const EgoState& st = in.ego_history[static_cast<std::size_t>(t)];
    const geom::Vec2 p = to_local_pt(st.x, st.y);
    const geom::Vec2 v = to_local_vec(st.vx, st.vy);
    const geom::Vec2 a = to_local_vec(st.ax, st.ay);
    double* row = view.s_ego.data() + static_cast<std::size_t>(t) * dims.d_ego;
    row[0] = p.x;
    row[1] = p.y;
    row[2] = geom::wrap_angle(st.heading - origin.heading);
    row[3] = v.x;
    row[4] = v.y;
    row[5] = a.x;
    row[6] = a.y;
  }

  // neighbors: nearest by current position, feature-only excluded
  std::vector<Ranked> agent_rank;
  for (std::size_t i = 0; i < in.agents.size(); ++i) {
    const AgentTrack& a = in.agents[i];
    if (a.feature_only) continue;
    if (static_cast<int>(a.states.size()) != dims.t_history)
      throw InvariantError("view: agent " + std::to_string(a.id) + " history length mismatch");
    const AgentState& cur = a.states.back();
    agent_rank.push_back({std::hypot(cur.x - origin.x, cur.y - origin.y), a.id, i});
  }
  rank_sort(agent_rank);
  if (static_cast<int>(agent_rank.size()) > dims.n_neighbors)
    agent_rank.resize(static_cast<std::size_t>(dims.n_neighbors));

  view.s_neighbor.assign(
      static_cast<std::size_t>(dims.n_neighbors) * dims.t_history * dims.d_agent, 0.0);
  view.neighbor_mask.assign(static_cast<std::size_t>(dims.n_neighbors), 0);
  for (std::size_t r = 0; r < agent_rank.size(); ++r) {
    const AgentTrack& a = in.agents[agent_rank[r].index];
    view.neighbor_mask[r] = 1;
    for (int t = 0; t < dims.t_history; ++t) {
      const AgentState& st = a.states[static_cast<std::size_t>(t)];
      const geom::Vec2 p = to_local_pt(st.x, st.y);
      const geom::Vec2 v = to_local_vec(st.vx, st.vy);
      double* row = view.s_neighbor.data() +
                    (r * static_cast<std::size_t>(dims.t_history) + t) * dims.d_agent;
      row[0] = p.x;
      row[1] = p.y;
      row[2] = geom::wrap_angle(st.heading - origin.heading);
      row[3] = v.x;
      row[4] = v.y;
      row[5] = st.length;
      row[6] = st.width;
      row[7] = static_cast<double>(static_cast<int>(a.cls));
    }
  }

  // lanes: nearest by min centerline point distance
  const auto& lanes = *in.lanes;
  std::vector<Ranked> lane_rank;
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    double best = 1e18;
    for (const LanePoint& p : lanes[i].centerline)
      best = std::min(best, std::hypot(p.x - origin.x, p.y - origin.y));
    lane_rank.push_back({best, lanes[i].id, i});
  }
  rank_sort(lane_rank);
  if (static_cast<int>(lane_rank.size()) > dims.n_lanes)
    lane_rank.resize(static_cast<std::size_t>(dims.n_lanes));

  view.m_lane.assign(static_cast<std::size_t>(dims.n_lanes) * dims.n_points * dims.d_point, 0.0);
  view.lane_mask.assign(static_cast<std::size_t>(dims.n_lanes), 0);
  for (std::size_t r = 0; r < lane_rank.size(); ++r) {
    const LaneSegment& lane = lanes[lane_rank[r].index];
    view.lane_mask[r] = 1;
    const int npts = std::min<int>(dims.n_points, static_cast<int>(lane.centerline.size()));
    for (int k = 0; k < npts; ++k) {
      const LanePoint& p = lane.centerline[static_cast<std::size_t>(k)];
      const geom::Vec2 lp = to_local_pt(p.x, p.y);
      double* row = view.m_lane.data() +
                    (r * static_cast<std::size_t>(dims.n_points) + k) * dims.d_point;
      row[0] = lp.x;
      row[1] = lp.y;
      row[2] = geom::wrap_angle(p.heading - origin.heading);
      row[3] = p.speed_limit;
    }
  }

  // crosswalks
  const auto& crosswalks = *in.crosswalks;
  std::vector<Ranked> cw_rank;
  for (std::size_t i = 0; i < crosswalks.size(); ++i) {
    double best = 1e18;
    for (const LanePoint& p : crosswalks[i].boundary)
      best = std::min(best, std::hypot(p.x - origin.x, p.y - origin.y));
    cw_rank.push_back({best, crosswalks[i].id, i});
  }
  rank_sort(cw_rank);
  if (static_cast<int>(cw_rank.size()) > dims.n_crosswalks)
    cw_rank.resize(static_cast<std::size_t>(dims.n_crosswalks));

  view.m_crosswalk.assign(
      static_cast<std::size_t>(dims.n_crosswalks) * dims.n_points * dims.d_point, 0.0);
  view.crosswalk_mask.assign(static_cast<std::size_t>(dims.n_crosswalks), 0);
  for (std::size_t r = 0; r < cw_rank.size(); ++r) {
    const CrosswalkPolygon& cw = crosswalks[cw_rank[r].index];
    view.crosswalk_mask[r] = 1;
    const int npts = std::min<int>(dims.n_points, static_cast<int>(cw.boundary.size()));
    for (int k = 0; k < npts; ++k) {
      const geom::Vec2 lp = to_local_pt(cw.boundary[static_cast<std::size_t>(k)].x,
                                        cw.boundary[static_cast<std::size_t>(k)].y);
      double* row = view.m_crosswalk.data() +
                    (r * static_cast<std::size_t>(dims.n_points) + k) * dims.d_point;
      row[0] = lp.x;
      row[1] = lp.y;
      // attributes 2 and 3 stay structurally zero for crosswalks
    }
  }

  // future ground truth
  if (!in.future.empty()) {
    if (static_cast<int>(in.future.size()) != dims.t_future)
      throw InvariantError("view: future length " + std::to_string(in.future.size()) +
                           " != t_future " + std::to_string(dims.t_future));
    view.has_future = true;
    view.future_gt.assign(static_cast<std::size_t>(dims.t_future) * 3, 0.0);
    for (int t = 0; t < dims.t_future; ++t) {
      const EgoState& st = in.future[static_cast<std::size_t>(t)];
      const geom::Vec2 p = to_local_pt(st.x, st.y);
      view.future_gt[static_cast<std::size_t>(t) * 3 + 0] = p.x;
      view.future_gt[static_cast<std::size_t>(t) * 3 + 1] = p.y;
      view.future_gt[static_cast<std::size_t>(t) * 3 + 2] =
          geom::wrap_angle(st.heading - origin.heading);
    }
  }

  return view;
}

LocalSceneView to_ego_frame(const Scenario& s, int tick, const ModelDims& dims) {
  if (tick < dims.t_history - 1 || tick >= s.tick_count())
    throw InvariantError("to_ego_frame: tick " + std::to_string(tick) + " out of range [" +
                         std::to_string(dims.t_history - 1) + ", " +
                         std::to_string(s.tick_count()) + ")");

  ViewInputs in;
  const int h0 = tick - dims.t_history + 1;
  in.ego_history.assign(s.ego_log.begin() + h0, s.ego_log.begin() + tick + 1);
  for (const AgentLog& a : s.agents) {
    AgentTrack track;
    track.id = a.id;
    track.cls = a.cls;
    track.feature_only = a.feature_only;
    track.states.assign(a.states.begin() + h0, a.states.begin() + tick + 1);
    in.agents.push_back(std::move(track));
  }
  in.lanes = &s.lanes;
  in.crosswalks = &s.crosswalks;
  if (tick + dims.t_future < s.tick_count())
    in.future.assign(s.ego_log.begin() + tick + 1, s.ego_log.begin() + tick + 1 + dims.t_future);
  return build_view(in, dims);
}

}  // namespace gdplan::scene
