#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpsim/optics.hpp"

namespace dpsim {

/// Demo configuration used when no camera file is supplied: f = 100 px,
/// F = 105 px (in focus at 2100 px), 20 px square aperture split at Y = 0.
CameraConfig default_camera();

/// Parses a flat JSON camera description. Recognised keys:
///   focal_length, sensor_distance | focus_depth, aperture_size |
///   aperture_left + aperture_right ([y_min, y_max, z_min, z_max]),
///   magnification_normalized.
/// Missing keys take the default_camera() value and a line is appended to
/// `notices` naming the default that was used.
CameraConfig camera_from_json(const nlohmann::json& j, std::vector<std::string>* notices = nullptr);

nlohmann::json camera_to_json(const CameraConfig& cfg);

CameraConfig load_camera(const std::filesystem::path& path,
                         std::vector<std::string>* notices = nullptr);

}  // namespace dpsim
