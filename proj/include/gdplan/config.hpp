#pragma once

#include <vector>

namespace gdplan {

// Model and scene dimensions shared across the stack. Defaults are desk
// scale; the configuration file can override any of them.
struct ModelDims {
  // history / future horizon at 10 Hz
  int t_history = 20;
  int t_future = 80;
  double dt = 0.1;

  // scene view limits and attribute widths
  int n_neighbors = 20;
  int n_lanes = 16;
  int n_crosswalks = 4;
  int n_points = 20;
  int d_ego = 7;    // x, y, heading, vx, vy, ax, ay
  int d_agent = 8;  // x, y, heading, vx, vy, length, width, class code
  int d_point = 4;  // x, y, heading, speed limit

  // network widths
  int d_enc = 64;
  int d_llm = 128;
  int d_guidance = 64;
  int d_planner = 128;
  int heads = 4;
  int m_modes = 6;
  int decoder_layers = 2;
  int reasoner_layers = 2;
  int vocab = 4096;
  int max_seq = 256;

  // camera / image pipeline
  int n_views = 4;
  int grid_h = 8;
  int grid_w = 8;
  int c_img = 64;
  int n_queries = 32;
  std::vector<double> depth_bins = {2.0, 5.0, 10.0, 20.0, 40.0};
  double bound_xy = 60.0;
  double bound_z_lo = -2.0;
  double bound_z_hi = 6.0;

  int map_token_count() const { return 1 + n_neighbors + n_lanes + n_crosswalks; }
  int min_ticks() const { return t_history + t_future; }
};

}  // namespace gdplan
