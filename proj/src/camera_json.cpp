#include "dpsim/camera_json.hpp"

#include <fstream>

#include "dpsim/errors.hpp"

namespace dpsim {

using nlohmann::json;

namespace {

ApertureRect rect_from_json(const json& j, const char* key) {
    if (!j.is_array() || j.size() != 4) {
        throw FormatError(std::string(key) + " must be [y_min, y_max, z_min, z_max]");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json rect_to_json(const ApertureRect& r) { return json::array({r.y_min, r.y_max, r.z_min, r.z_max}); }

double number_or_default(const json& j, const char* key, double fallback,
                         std::vector<std::string>* notices) {
    if (j.contains(key)) {
        return j.at(key).get<double>();
    }
    if (notices != nullptr) {
        notices->push_back(std::string("camera: ") + key + " not set, using default " +
                           std::to_string(fallback));
    }
    return fallback;
}

}  // namespace

CameraConfig default_camera() { return CameraConfig(100.0, 105.0, 20.0, true); }

CameraConfig camera_from_json(const json& j, std::vector<std::string>* notices) {
    if (!j.is_object()) {
        throw FormatError("camera config must be a JSON object");
    }
    const CameraConfig def = default_camera();
    try {
        const double f = number_or_default(j, "focal_length", def.focal_length(), notices);
        double F = def.sensor_distance();
        if (j.contains("sensor_distance")) {
            F = j.at("sensor_distance").get<double>();
        } else if (j.contains("focus_depth")) {
            const double d = j.at("focus_depth").get<double>();
            if (!(d > f)) {
                throw DomainError("focus_depth must exceed focal_length");
            }
            F = f * d / (d - f);
        } else if (notices != nullptr) {
            notices->push_back("camera: sensor_distance not set, using default " +
                               std::to_string(F));
        }
        bool normalized = def.magnification_normalized();
        if (j.contains("magnification_normalized")) {
            normalized = j.at("magnification_normalized").get<bool>();
        } else if (notices != nullptr) {
            notices->push_back("camera: magnification_normalized not set, using default true");
        }
        if (j.contains("aperture_left") || j.contains("aperture_right")) {
            if (!j.contains("aperture_left") || !j.contains("aperture_right")) {
                throw FormatError("aperture_left and aperture_right must be given together");
            }
            return CameraConfig(f, F, rect_from_json(j.at("aperture_left"), "aperture_left"),
                                rect_from_json(j.at("aperture_right"), "aperture_right"),
                                normalized);
        }
        const double size = number_or_default(j, "aperture_size", 20.0, notices);
        return CameraConfig(f, F, size, normalized);
    } catch (const json::exception& e) {
        throw FormatError(std::string("camera config: ") + e.what());
    }
}

json camera_to_json(const CameraConfig& cfg) {
    json j;
    j["focal_length"] = cfg.focal_length();
    j["sensor_distance"] = cfg.sensor_distance();
    j["aperture_left"] = rect_to_json(cfg.aperture_left());
    j["aperture_right"] = rect_to_json(cfg.aperture_right());
    j["magnification_normalized"] = cfg.magnification_normalized();
    if (cfg.sensor_distance() > cfg.focal_length()) {
        j["in_focus_depth"] = cfg.in_focus_depth();
    }
    return j;
}

CameraConfig load_camera(const std::filesystem::path& path, std::vector<std::string>* notices) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open camera config " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return camera_from_json(j, notices);
}

}  // namespace dpsim
