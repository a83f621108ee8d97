#pragma once

#include <cstdint>

#include "gdplan/scene/types.hpp"

namespace gdplan::scene {

// Synthetic scenario generation: straight / curved / intersection lane
// graphs, an ego log that traverses the route inside the comfort and
// speed-limit envelopes, and constant-velocity or IDM-warmed traffic.
// Deterministic function of (seed, params).
struct SynthParams {
  int n_agents = 6;
  int n_lanes = 3;
  int scenario_type = 0;  // 0..13; geometry archetype = type % 4
  double duration_s = 12.0;
  // Stationary feature-only obstacle on the route; the ego log brakes and
  // stops short of it.
  bool hazard = false;
  // Warm same-chain vehicles with car-following instead of constant speed.
  bool idm_agents = false;
};

Scenario synth_scenario(uint64_t seed, const SynthParams& params, const ModelDims& dims = {});

}  // namespace gdplan::scene
