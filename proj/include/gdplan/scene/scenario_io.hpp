#pragma once

#include <string>

#include "gdplan/scene/types.hpp"

namespace gdplan::scene {

// Scenario files: one UTF-8 JSON document per scenario, schema version
// "gdsv1". save_scenario emits the canonical form (fixed field order, floats
// at 9 significant digits, no whitespace), so canonical files round-trip byte
// for byte through load_scenario + save_scenario.
std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text, const ModelDims& dims = {});

void save_scenario(const std::string& path, const Scenario& s);
Scenario load_scenario(const std::string& path, const ModelDims& dims = {});

uint64_t scenario_hash(const Scenario& s);

// %.9g formatting shared by every canonical writer in the project.
std::string fmt_g9(double v);

}  // namespace gdplan::scene
