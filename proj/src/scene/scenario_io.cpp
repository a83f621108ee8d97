#include "gdplan/scene/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gdplan/errors.hpp"
#include "gdplan/util/hash.hpp"

namespace gdplan::scene {

using nlohmann::json;

std::string fmt_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

namespace {

void write_state(std::string& out, const BodyState& st) {
  out += '[';
  out += fmt_g9(st.x); out += ',';
  out += fmt_g9(st.y); out += ',';
  out += fmt_g9(st.heading); out += ',';
  out += fmt_g9(st.vx); out += ',';
  out += fmt_g9(st.vy); out += ',';
  out += fmt_g9(st.ax); out += ',';
  out += fmt_g9(st.ay); out += ',';
  out += fmt_g9(st.length); out += ',';
  out += fmt_g9(st.width);
  out += ']';
}

void write_points(std::string& out, const std::vector<LanePoint>& pts) {
  out += '[';
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ',';
    out += '[';
    out += fmt_g9(pts[i].x); out += ',';
    out += fmt_g9(pts[i].y); out += ',';
    out += fmt_g9(pts[i].heading); out += ',';
    out += fmt_g9(pts[i].speed_limit);
    out += ']';
  }
  out += ']';
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') { out += '\\'; out += c; }
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  return out;
}

BodyState state_from(const json& a, const std::string& where) {
  if (!a.is_array() || a.size() != 9)
    throw ParseError(where + ": state must be an array of 9 numbers");
  BodyState st;
  st.x = a[0].get<double>();
  st.y = a[1].get<double>();
  st.heading = a[2].get<double>();
  st.vx = a[3].get<double>();
  st.vy = a[4].get<double>();
  st.ax = a[5].get<double>();
  st.ay = a[6].get<double>();
  st.length = a[7].get<double>();
  st.width = a[8].get<double>();
  return st;
}

std::vector<LanePoint> points_from(const json& arr, const std::string& where) {
  std::vector<LanePoint> pts;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 4)
      throw ParseError(where + ": point must be an array of 4 numbers");
    pts.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>(), p[3].get<double>()});
  }
  return pts;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  std::string out;
  out.reserve(1 << 16);
  out += "{\"schema\":\"gdsv1\",\"id\":\"" + escape(s.id) + "\"";
  out += ",\"scenario_type\":\"type" + std::to_string(s.scenario_type) + "\"";

  out += ",\"map\":{\"lanes\":[";
  for (std::size_t i = 0; i < s.lanes.size(); ++i) {
    const LaneSegment& l = s.lanes[i];
    if (i) out += ',';
    out += "{\"id\":" + std::to_string(l.id);
    out += ",\"is_intersection\":" + std::string(l.is_intersection ? "true" : "false");
    out += ",\"left\":" + std::to_string(l.left);
    out += ",\"right\":" + std::to_string(l.right);
    out += ",\"successors\":[";
    for (std::size_t j = 0; j < l.successors.size(); ++j) {
      if (j) out += ',';
      out += std::to_string(l.successors[j]);
    }
    out += "],\"centerline\":";
    write_points(out, l.centerline);
    out += '}';
  }
  out += "],\"crosswalks\":[";
  for (std::size_t i = 0; i < s.crosswalks.size(); ++i) {
    if (i) out += ',';
    out += "{\"id\":" + std::to_string(s.crosswalks[i].id) + ",\"boundary\":";
    write_points(out, s.crosswalks[i].boundary);
    out += '}';
  }
  out += "]}";

  out += ",\"route_lane_ids\":[";
  for (std::size_t i = 0; i < s.route_lane_ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s.route_lane_ids[i]);
  }
  out += ']';

  out += ",\"ego_log\":[";
  for (std::size_t t = 0; t < s.ego_log.size(); ++t) {
    if (t) out += ',';
    write_state(out, s.ego_log[t]);
  }
  out += ']';

  out += ",\"agents\":[";
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const AgentLog& a = s.agents[i];
    if (i) out += ',';
    out += "{\"id\":" + std::to_string(a.id);
    out += ",\"class\":\"" + std::string(agent_class_name(a.cls)) + "\"";
    out += ",\"feature_only\":" + std::string(a.feature_only ? "true" : "false");
    out += ",\"states\":[";
    for (std::size_t t = 0; t < a.states.size(); ++t) {
      if (t) out += ',';
      write_state(out, a.states[t]);
    }
    out += "]}";
  }
  out += ']';

  out += ",\"traffic_lights\":[";
  for (std::size_t t = 0; t < s.traffic_lights.size(); ++t) {
    if (t) out += ',';
    out += '[';
    for (std::size_t j = 0; j < s.traffic_lights[t].size(); ++j) {
      if (j) out += ',';
      out += '[' + std::to_string(s.traffic_lights[t][j].first) + ",\"" +
             light_state_name(s.traffic_lights[t][j].second) + "\"]";
    }
    out += ']';
  }
  out += ']';

  out += ",\"camera_rig\":{\"cameras\":[";
  for (std::size_t i = 0; i < s.rig.cameras.size(); ++i) {
    const Camera& c = s.rig.cameras[i];
    if (i) out += ',';
    out += "{\"name\":\"" + escape(c.name) + "\"";
    out += ",\"fx\":" + fmt_g9(c.fx) + ",\"fy\":" + fmt_g9(c.fy);
    out += ",\"cx\":" + fmt_g9(c.cx) + ",\"cy\":" + fmt_g9(c.cy);
    out += ",\"width\":" + std::to_string(c.width) + ",\"height\":" + std::to_string(c.height);
    out += ",\"x\":" + fmt_g9(c.x) + ",\"y\":" + fmt_g9(c.y) + ",\"z\":" + fmt_g9(c.z);
    out += ",\"yaw\":" + fmt_g9(c.yaw) + '}';
  }
  out += "]}}\n";
  return out;
}

Scenario scenario_from_json(const std::string& text, const ModelDims& dims) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario parse error: ") + e.what());
  }

  auto need = [&](const json& obj, const char* field) -> const json& {
    auto it = obj.find(field);
    if (it == obj.end()) throw ParseError(std::string("scenario: missing field '") + field + "'");
    return *it;
  };

  Scenario s;
  try {
    const std::string schema = need(doc, "schema").get<std::string>();
    if (schema != "gdsv1")
      throw ParseError("scenario: unsupported schema '" + schema + "', expected gdsv1");
    s.id = need(doc, "id").get<std::string>();
    const std::string type_tag = need(doc, "scenario_type").get<std::string>();
    if (type_tag.rfind("type", 0) != 0)
      throw ParseError("scenario_type must look like 'type<N>', got '" + type_tag + "'");
    s.scenario_type = std::stoi(type_tag.substr(4));

    const json& map = need(doc, "map");
    for (const auto& l : need(map, "lanes")) {
      LaneSegment lane;
      lane.id = need(l, "id").get<int>();
      lane.is_intersection = need(l, "is_intersection").get<bool>();
      lane.left = need(l, "left").get<int>();
      lane.right = need(l, "right").get<int>();
      lane.successors = need(l, "successors").get<std::vector<int>>();
      lane.centerline = points_from(need(l, "centerline"), "lane " + std::to_string(lane.id));
      s.lanes.push_back(std::move(lane));
    }
    for (const auto& c : need(map, "crosswalks")) {
      CrosswalkPolygon cw;
      cw.id = need(c, "id").get<int>();
      cw.boundary = points_from(need(c, "boundary"), "crosswalk " + std::to_string(cw.id));
      s.crosswalks.push_back(std::move(cw));
    }

    s.route_lane_ids = need(doc, "route_lane_ids").get<std::vector<int>>();

    for (const auto& st : need(doc, "ego_log"))
      s.ego_log.push_back(state_from(st, "ego_log"));

    for (const auto& a : need(doc, "agents")) {
      AgentLog log;
      log.id = need(a, "id").get<int>();
      log.cls = agent_class_from_name(need(a, "class").get<std::string>());
      log.feature_only = need(a, "feature_only").get<bool>();
      for (const auto& st : need(a, "states"))
        log.states.push_back(state_from(st, "agent " + std::to_string(log.id)));
      s.agents.push_back(std::move(log));
    }

    for (const auto& tick : need(doc, "traffic_lights")) {
      std::vector<std::pair<int, LightState>> entries;
      for (const auto& e : tick) {
        if (!e.is_array() || e.size() != 2)
          throw ParseError("traffic_lights entry must be [lane_id, state]");
        entries.emplace_back(e[0].get<int>(), light_state_from_name(e[1].get<std::string>()));
      }
      s.traffic_lights.push_back(std::move(entries));
    }

    const json& rig = need(doc, "camera_rig");
    for (const auto& c : need(rig, "cameras")) {
      Camera cam;
      cam.name = need(c, "name").get<std::string>();
      cam.fx = need(c, "fx").get<double>();
      cam.fy = need(c, "fy").get<double>();
      cam.cx = need(c, "cx").get<double>();
      cam.cy = need(c, "cy").get<double>();
      cam.width = need(c, "width").get<int>();
      cam.height = need(c, "height").get<int>();
      cam.x = need(c, "x").get<double>();
      cam.y = need(c, "y").get<double>();
      cam.z = need(c, "z").get<double>();
      cam.yaw = need(c, "yaw").get<double>();
      s.rig.cameras.push_back(std::move(cam));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario field error: ") + e.what());
  }

  validate_scenario(s, dims);
  return s;
}

void save_scenario(const std::string& path, const Scenario& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open scenario file for writing: " + path);
  out << scenario_to_json(s);
  if (!out) throw ParseError("scenario write failed: " + path);
}

Scenario load_scenario(const std::string& path, const ModelDims& dims) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return scenario_from_json(ss.str(), dims);
  } catch (ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

uint64_t scenario_hash(const Scenario& s) { return fnv1a64(scenario_to_json(s)); }

}  // namespace gdplan::scene
