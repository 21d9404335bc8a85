#pragma once

// Classical depth recovery from a dual-pixel pair.
//
// sweep_depth scores a list of fronto-parallel depth hypotheses by re-blurring
// the sharp image at each depth and comparing with the observed pair;
// block_match treats the pair as a tiny-baseline stereo pair and searches a
// few pixels along the horizontal (aperture-split) axis.
//
// Disparity convention matches the optics module: left(x) ~ right(x - disparity),
// measured in left-view coordinates.

#include <vector>

#include "dpsim/image.hpp"
#include "dpsim/optics.hpp"
#include "dpsim/simulator.hpp"

namespace dpsim {

inline constexpr double kDefaultTextureThreshold = 1e-4;

struct SweepConfig {
    std::vector<double> hypotheses;  // strictly increasing, each > f
    int window = 2;                  // residual aggregation radius: (2w+1)^2 box
    double texture_threshold = kDefaultTextureThreshold;

    /// `count` depths evenly spaced in inverse depth over [near, far].
    static SweepConfig uniform_inverse_depth(double near, double far, int count, int window = 2);

    void validate(const CameraConfig& cfg) const;
};

using DisparityMap = DepthMap;

struct SweepResult {
    DepthMap depth;          // invalid where the sharp image is textureless
    Grid<int> index;         // selected hypothesis per pixel
    Image best_residual;     // window-averaged residual at the selected hypothesis
    Image second_residual;   // next-best residual (margin = second - best)
};

SweepResult sweep_depth(const Image& sharp, const DpPair& observed, const CameraConfig& cfg,
                        const SweepConfig& sweep);

struct MatchConfig {
    int max_disparity = 4;  // search [-max, +max]
    int block = 7;          // odd block side
    bool subpixel = true;   // parabolic refinement around the integer minimum
    double texture_threshold = kDefaultTextureThreshold;

    void validate() const;
};

/// Disparity per left-view pixel; invalid near borders and on low-texture blocks.
DisparityMap block_match(const DpPair& observed, const MatchConfig& mc);

/// Per-pixel depth_for_disparity; unattainable disparities become invalid.
DepthMap disparity_to_depth_map(const DisparityMap& disp, const CameraConfig& cfg);

/// Mean over the (2 radius + 1)^2 window clipped to the frame, single channel.
Image box_mean(const Image& src, int radius);

/// Windowed variance of the channel-mean image; used for texture gating.
Image local_variance(const Image& img, int radius);

}  // namespace dpsim
