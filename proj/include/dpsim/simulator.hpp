#pragma once

// Dual-pixel image synthesis from an RGB-D image.
//
// Each source pixel scatters its intensity uniformly over its footprint in
// the left and right views. Pixel (r, c) of the output covers the continuous
// square [c, c+1) x [r, r+1); footprints are real-valued rectangles in the
// same frame, and an output pixel receives the fraction of the footprint that
// overlaps its cell. Footprints smaller than one pixel (dy*dz < 1) are
// deposited as a unit square centred on the footprint, so in-focus pixels
// reproduce the input exactly.
//
// simulate_fast builds a differential image of signed corner deltas and
// integrates it (summed-area table), which is O(pixels) regardless of blur
// size. simulate_brute splats every covered cell directly and is kept as the
// serial reference for testing.

#include <span>
#include <vector>

#include "dpsim/image.hpp"
#include "dpsim/optics.hpp"

namespace dpsim {

struct RgbdImage {
    Image intensity;  // H x W x C, values in [0, 1]
    DepthMap depth;   // pixel units; valid mask marks usable depths

    int rows() const { return intensity.rows(); }
    int cols() const { return intensity.cols(); }
    int channels() const { return intensity.channels(); }
};

/// Shape and depth-domain checks shared by both simulation paths.
void validate_rgbd(const RgbdImage& img, const CameraConfig& cfg);

struct DpPair {
    Image left;
    Image right;

    const Image& view(View v) const { return v == View::Left ? left : right; }
    Image& view(View v) { return v == View::Left ? left : right; }
};

struct ViewStats {
    std::vector<double> clipped_energy;    // per channel, mass scattered outside the frame
    std::vector<double> negative_clamped;  // per channel, magnitude removed by the final clamp
};

struct SimulationResult {
    DpPair pair;
    ViewStats left_stats;
    ViewStats right_stats;
    Mask coverage;  // 1 where the source pixel had a valid depth and was scattered
    std::size_t scattered_pixels = 0;

    const ViewStats& stats(View v) const { return v == View::Left ? left_stats : right_stats; }
    double total_clipped() const;
};

/// Footprint rectangle in output-frame coordinates, ready to deposit.
struct FrameBox {
    double y0 = 0.0, y1 = 0.0, z0 = 0.0, z1 = 0.0;
    double weight = 0.0;  // 1 / area

    /// Fraction of the box lying inside [0, cols] x [0, rows].
    double inside_fraction(int rows, int cols) const;
};

/// Deposit box for a region already in frame coordinates; applies the sub-pixel rule.
FrameBox frame_box(const BlurRegion& frame_region);

/// Shifts a region from principal-point-centred coordinates to frame coordinates.
BlurRegion to_frame_region(const BlurRegion& centred, int rows, int cols);

/// Signed corner accumulator (the differential image) for one view.
struct DifferentialImage {
    Image values;
    std::vector<double> clipped;  // per channel

    DifferentialImage(int rows, int cols, int channels)
        : values(rows, cols, channels), clipped(static_cast<std::size_t>(channels), 0.0) {}
};

/// Deposits value/area at the four corners of `frame_region` with signs
/// (+, -, -, +) for (top-left, top-right, bottom-left, bottom-right). Each corner
/// is split bilinearly over its neighbouring integer sites. Sites left of or
/// above the frame fold onto row/column 0 and sites past the far edges are
/// dropped, so the integrated result equals the in-frame part of the box.
void splat_corners(DifferentialImage& diff, const BlurRegion& frame_region,
                   std::span<const double> value);

/// Inclusive 2D prefix sum per channel, rows first then columns.
Image integrate(const Image& diff);

SimulationResult simulate_fast(const RgbdImage& img, const CameraConfig& cfg);
SimulationResult simulate_brute(const RgbdImage& img, const CameraConfig& cfg);

/// Convenience: whole scene at a single depth.
RgbdImage constant_depth_scene(const Image& intensity, double depth);

}  // namespace dpsim
