#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "seqrecon/study.hpp"

namespace seqrecon {

/// Everything a run needs, parsed from a JSON document (see docs/scene-format.md).
struct RunConfig {
  GridSpec grid{64, 6};
  SimulationOptions simulation;  // grid copied from `grid`
  SceneSpec scene = default_scene();
  PipelineOptions pipeline;
  StudyConfig study;  // experiment copied from the fields above
};

RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string config_hash(std::string_view text);

}  // namespace seqrecon
