#pragma once

#include <string>

#include "gdplan/nn/layers.hpp"

namespace gdplan::nn {

// Checkpoint file, version "gdck1": a magic line, a JSON manifest line listing
// (name, shape) in order, then the raw little-endian float64 payloads
// concatenated in manifest order.
void save_checkpoint(const std::string& path, const ParamRefs& params);

// Loads by name; every parameter in `params` must be present with a matching
// shape. Extra tensors in the file are an error.
void load_checkpoint(const std::string& path, const ParamRefs& params);

// Content hash of a parameter set (names, shapes, raw values).
uint64_t params_hash(const ParamRefs& params);

}  // namespace gdplan::nn
