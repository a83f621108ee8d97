#pragma once

#include "gdplan/scene/types.hpp"

namespace gdplan::scene {

// Rolling world snapshot fed to the view builder: histories end at the view
// tick (oldest first), all in the global frame. The closed-loop simulator
// maintains these directly; to_ego_frame assembles them from scenario logs.
struct AgentTrack {
  int id = 0;
  AgentClass cls = AgentClass::vehicle;
  bool feature_only = false;
  std::vector<AgentState> states;  // length t_history
};

struct ViewInputs {
  std::vector<EgoState> ego_history;  // length t_history, back() = current
  std::vector<AgentTrack> agents;
  const std::vector<LaneSegment>* lanes = nullptr;
  const std::vector<CrosswalkPolygon>* crosswalks = nullptr;
  std::vector<EgoState> future;  // optional ground truth, length t_future
};

// Selects the nearest n_lanes lanes / n_crosswalks crosswalks by
// centerline-to-ego distance and the nearest n_neighbors agents (ties broken
// by ascending id), transforms everything into the ego frame at the view
// tick, and zero-pads missing rows with cleared mask bits.
LocalSceneView build_view(const ViewInputs& in, const ModelDims& dims);

LocalSceneView to_ego_frame(const Scenario& s, int tick, const ModelDims& dims = {});

}  // namespace gdplan::scene
