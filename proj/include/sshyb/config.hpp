#pragma once

#include <string>

#include "sshyb/pipeline.hpp"
#include "sshyb/scene.hpp"

namespace sshyb {

// JSON schemas are documented in README.md. Parsers reject unknown keys so
// typos fail loudly instead of silently using defaults.

PipelineConfig load_pipeline_config(const std::string& path);
Scene load_scene(const std::string& path);
Eigen::MatrixX3d load_geometry(const std::string& path);  // {"mics_m": [[x,y,z], ...]}

}  // namespace sshyb
