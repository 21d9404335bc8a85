#pragma once

// Thin-lens geometry for a dual-pixel camera.
//
// Coordinates follow the lens frame: the lens lies in the plane X = 0, the
// scene at X < -f and the sensor at X = F. Image coordinates (y, z) are
// measured in pixels from the principal point; y is the horizontal axis (the
// axis along which the aperture is split) and z the vertical axis. Every
// length, depth included, is expressed in pixel units.
//
// Naming convention: the "left" view integrates light through the half of the
// aperture with negative Y. For a point nearer than the in-focus plane its
// left footprint sits to the left of its right footprint, so disparity
// (left minus right, along y) is negative; beyond the in-focus plane it is
// positive. This is an internal convention and makes no claim about which
// sub-pixel a particular sensor stores first.

#include <array>

namespace dpsim {

struct Vec2 {
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Vec2&) const = default;
};

/// Axis-aligned rectangle in the lens plane, pixel units.
struct ApertureRect {
    double y_min = 0.0;
    double y_max = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;

    double width() const { return y_max - y_min; }
    double height() const { return z_max - z_min; }
    Vec2 centroid() const { return {0.5 * (y_min + y_max), 0.5 * (z_min + z_max)}; }

    /// Corners in the order top-left, top-right, bottom-left, bottom-right.
    std::array<Vec2, 4> corners() const {
        return {{{y_min, z_min}, {y_max, z_min}, {y_min, z_max}, {y_max, z_max}}};
    }

    bool contains(Vec2 p) const {
        return p.y >= y_min && p.y <= y_max && p.z >= z_min && p.z <= z_max;
    }
};

enum class View { Left, Right };

class CameraConfig {
public:
    /// Square aperture of side `aperture_size` split at Y = 0 into two halves.
    CameraConfig(double focal_length, double sensor_distance, double aperture_size,
                 bool magnification_normalized = true);
    CameraConfig(double focal_length, double sensor_distance, ApertureRect left,
                 ApertureRect right, bool magnification_normalized = true);

    /// Config focused at `focus_depth`; solves the sensor distance from the thin-lens equation.
    static CameraConfig focused_at(double focal_length, double focus_depth, double aperture_size,
                                   bool magnification_normalized = true);

    double focal_length() const { return f_; }
    double sensor_distance() const { return F_; }
    const ApertureRect& aperture(View v) const { return v == View::Left ? left_ : right_; }
    const ApertureRect& aperture_left() const { return left_; }
    const ApertureRect& aperture_right() const { return right_; }
    bool magnification_normalized() const { return normalized_; }

    /// f/F when normalized, 1 otherwise.
    double sensor_scale() const { return normalized_ ? f_ / F_ : 1.0; }

    /// Scene depth whose virtual image lands on the sensor, fF/(F-f).
    /// Throws DomainError when F <= f (nothing can be in focus).
    double in_focus_depth() const;

    bool operator==(const CameraConfig&) const = default;

private:
    void validate() const;

    double f_;
    double F_;
    ApertureRect left_;
    ApertureRect right_;
    bool normalized_;
};

/// Footprint of one scene point on the sensor for one half-aperture.
struct BlurRegion {
    double y_min = 0.0;
    double y_max = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;
    double scale = 0.0;  // (d' - F) / d'
    double area = 1.0;   // max(dy * dz, 1)

    double width() const { return y_max - y_min; }
    double height() const { return z_max - z_min; }
    Vec2 center() const { return {0.5 * (y_min + y_max), 0.5 * (z_min + z_max)}; }
};

/// Virtual-world depth fd/(d-f). Throws DomainError unless d > f and finite.
double virtual_depth(double depth, const CameraConfig& cfg);

/// Signed footprint scale (d' - F)/d' for a scene depth.
double footprint_scale(double depth, const CameraConfig& cfg);

/// Where the ray from the scene point imaged at `pixel` (depth `depth`)
/// through lens point `corner` meets the sensor.
Vec2 scatter_point(Vec2 pixel, double depth, Vec2 corner, const CameraConfig& cfg);

BlurRegion blur_region(Vec2 pixel, double depth, const ApertureRect& aperture,
                       const CameraConfig& cfg);

inline BlurRegion blur_region(Vec2 pixel, double depth, View view, const CameraConfig& cfg) {
    return blur_region(pixel, depth, cfg.aperture(view), cfg);
}

/// Signed left-minus-right footprint offset along y, in pixels.
double disparity_for_depth(double depth, const CameraConfig& cfg);

/// Disparity limits over d in (f, inf): the values at d -> inf and d -> f+.
/// Neither endpoint is attainable.
struct DisparityRange {
    double at_infinity;
    double at_lens;

    bool contains(double disparity) const;
};
DisparityRange attainable_disparity(const CameraConfig& cfg);

/// Inverse of disparity_for_depth. Throws RangeError for unattainable disparities.
double depth_for_disparity(double disparity, const CameraConfig& cfg);

}  // namespace dpsim
