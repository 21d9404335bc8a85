#include "dpsim/optics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dpsim/errors.hpp"

namespace dpsim {

namespace {

ApertureRect left_half(double size) { return {-0.5 * size, 0.0, -0.5 * size, 0.5 * size}; }
ApertureRect right_half(double size) { return {0.0, 0.5 * size, -0.5 * size, 0.5 * size}; }

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void check_rect(const ApertureRect& r, const char* name) {
    const bool finite = std::isfinite(r.y_min) && std::isfinite(r.y_max) &&
                        std::isfinite(r.z_min) && std::isfinite(r.z_max);
    if (!finite || !(r.width() > 0.0) || !(r.height() > 0.0)) {
        throw DomainError(std::string(name) + " aperture must be a non-degenerate rectangle");
    }
}

}  // namespace

CameraConfig::CameraConfig(double focal_length, double sensor_distance, double aperture_size,
                           bool magnification_normalized)
    : CameraConfig(focal_length, sensor_distance, left_half(aperture_size),
                   right_half(aperture_size), magnification_normalized) {}

CameraConfig::CameraConfig(double focal_length, double sensor_distance, ApertureRect left,
                           ApertureRect right, bool magnification_normalized)
    : f_(focal_length),
      F_(sensor_distance),
      left_(left),
      right_(right),
      normalized_(magnification_normalized) {
    validate();
}

CameraConfig CameraConfig::focused_at(double focal_length, double focus_depth,
                                      double aperture_size, bool magnification_normalized) {
    if (!finite_positive(focal_length) || !std::isfinite(focus_depth) ||
        focus_depth <= focal_length) {
        throw DomainError("focus depth must exceed the focal length");
    }
    const double F = focal_length * focus_depth / (focus_depth - focal_length);
    return CameraConfig(focal_length, F, aperture_size, magnification_normalized);
}

void CameraConfig::validate() const {
    if (!finite_positive(f_)) {
        throw DomainError("focal length f must be finite and > 0");
    }
    if (!finite_positive(F_)) {
        throw DomainError("sensor distance F must be finite and > 0");
    }
    check_rect(left_, "left");
    check_rect(right_, "right");
}

double CameraConfig::in_focus_depth() const {
    if (F_ <= f_) {
        throw DomainError("sensor distance F <= f: no scene depth is in focus");
    }
    return f_ * F_ / (F_ - f_);
}

double virtual_depth(double depth, const CameraConfig& cfg) {
    const double f = cfg.focal_length();
    if (!std::isfinite(depth) || depth <= f) {
        std::ostringstream msg;
        msg << "depth " << depth << " must be finite and exceed the focal length f=" << f;
        throw DomainError(msg.str());
    }
    return f * depth / (depth - f);
}

double footprint_scale(double depth, const CameraConfig& cfg) {
    const double dv = virtual_depth(depth, cfg);
    return (dv - cfg.sensor_distance()) / dv;
}

Vec2 scatter_point(Vec2 pixel, double depth, Vec2 corner, const CameraConfig& cfg) {
    const double s = footprint_scale(depth, cfg);
    const double f = cfg.focal_length();
    const double F = cfg.sensor_distance();
    if (cfg.magnification_normalized()) {
        // (f/F) * (s*C + F*(y/f, z/f)) with the constant term kept exact.
        const double k = f / F;
        return {k * s * corner.y + pixel.y, k * s * corner.z + pixel.z};
    }
    return {s * corner.y + F * (pixel.y / f), s * corner.z + F * (pixel.z / f)};
}

BlurRegion blur_region(Vec2 pixel, double depth, const ApertureRect& aperture,
                       const CameraConfig& cfg) {
    BlurRegion r;
    r.scale = footprint_scale(depth, cfg);
    const auto corners = aperture.corners();
    const Vec2 first = scatter_point(pixel, depth, corners[0], cfg);
    r.y_min = r.y_max = first.y;
    r.z_min = r.z_max = first.z;
    for (std::size_t i = 1; i < corners.size(); ++i) {
        const Vec2 p = scatter_point(pixel, depth, corners[i], cfg);
        r.y_min = std::min(r.y_min, p.y);
        r.y_max = std::max(r.y_max, p.y);
        r.z_min = std::min(r.z_min, p.z);
        r.z_max = std::max(r.z_max, p.z);
    }
    r.area = std::max(r.width() * r.height(), 1.0);
    return r;
}

namespace {

// Left-minus-right centroid offset along Y, scaled onto the sensor grid.
double disparity_gain(const CameraConfig& cfg) {
    const double dc = cfg.aperture_left().centroid().y - cfg.aperture_right().centroid().y;
    return cfg.sensor_scale() * dc;
}

}  // namespace

double disparity_for_depth(double depth, const CameraConfig& cfg) {
    return footprint_scale(depth, cfg) * disparity_gain(cfg);
}

bool DisparityRange::contains(double disparity) const {
    const double lo = std::min(at_infinity, at_lens);
    const double hi = std::max(at_infinity, at_lens);
    return disparity > lo && disparity < hi;
}

DisparityRange attainable_disparity(const CameraConfig& cfg) {
    // The scale runs from (f-F)/f at d -> inf up to 1 at d -> f.
    const double f = cfg.focal_length();
    const double gain = disparity_gain(cfg);
    return {gain * (f - cfg.sensor_distance()) / f, gain};
}

double depth_for_disparity(double disparity, const CameraConfig& cfg) {
    const double gain = disparity_gain(cfg);
    const auto range = attainable_disparity(cfg);
    if (!std::isfinite(disparity) || gain == 0.0 || !range.contains(disparity)) {
        std::ostringstream msg;
        msg << "disparity " << disparity << " is outside the attainable range ("
            << std::min(range.at_infinity, range.at_lens) << ", "
            << std::max(range.at_infinity, range.at_lens) << ")";
        throw RangeError(msg.str());
    }
    // s = 1 - F/f + F/d  =>  F/d = s - (1 - F/f)
    const double s = disparity / gain;
    const double f = cfg.focal_length();
    const double F = cfg.sensor_distance();
    const double inv = s - (1.0 - F / f);
    if (!(inv > 0.0)) {
        throw RangeError("disparity maps to a non-positive virtual depth");
    }
    return F / inv;
}

}  // namespace dpsim
