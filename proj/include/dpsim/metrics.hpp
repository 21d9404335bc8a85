#pragma once

// Depth and image evaluation metrics.
//
// Depth metrics run over the pixels selected by the optional mask that are
// also valid in both maps with gt > 0. The affine-invariant errors fit
// gt ~ a * pred + b by least squares (a may be negative) and divide the
// residual MAE / RMSE by the gt range on the mask, so they are scale-free.

#include <optional>

#include "dpsim/image.hpp"

namespace dpsim {

struct DepthMetricReport {
    std::size_t count = 0;
    double abs_rel = 0.0;
    double sq_rel = 0.0;
    double rmse = 0.0;
    double rmse_log = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 0.0;
    // Undefined when the prediction (or gt) is constant on the mask.
    std::optional<double> ai1;
    std::optional<double> ai2;
    std::optional<double> spearman_term;
};

struct AffineInvariantErrors {
    double ai1 = 0.0;
    double ai2 = 0.0;
    double scale = 0.0;   // fitted a
    double offset = 0.0;  // fitted b
};

struct ImageMetricReport {
    double psnr = 0.0;      // dB, capped at kPsnrCap
    double ssim = 0.0;
    double rmse_rel = 0.0;  // percent of full scale
};

inline constexpr double kPsnrCap = 100.0;

DepthMetricReport depth_metrics(const DepthMap& pred, const DepthMap& gt,
                                const Mask* mask = nullptr);

AffineInvariantErrors affine_invariant_metrics(const DepthMap& pred, const DepthMap& gt,
                                               const Mask* mask = nullptr);

/// 1 - |Spearman rank correlation|, average ranks for ties.
double spearman_term(const DepthMap& pred, const DepthMap& gt, const Mask* mask = nullptr);

/// Mean SSIM over channels; 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, data range 1, evaluated where the window fits in the image.
double ssim(const Image& a, const Image& b);

double psnr(const Image& pred, const Image& gt);

ImageMetricReport image_metrics(const Image& pred, const Image& gt);

}  // namespace dpsim
