#pragma once

#include "dpsim/image.hpp"
#include "dpsim/optics.hpp"
#include "dpsim/simulator.hpp"

namespace dpsim {

struct LossReport {
    double restoration = 0.0;
    double depth = 0.0;
    double reblur = 0.0;
    double total = 0.0;
};

/// Mean over pixels of the per-pixel channel-vector l2 norm of (pred - target).
double restoration_loss(const Image& pred, const Image& target);

/// Smooth-l1 with unit transition: 0.5 x^2 for |x| < 1, |x| - 0.5 otherwise.
double smooth_l1(double x);

/// Mean smooth-l1 of (target - pred) over pixels valid in `target`.
double depth_loss(const InverseDepthMap& pred, const InverseDepthMap& target);

/// Converts inverse depth (1/d, pixel units) to a depth map, invalidating
/// non-positive entries. Throws DomainError if a valid entry maps to d <= f.
DepthMap depth_from_inverse(const InverseDepthMap& inv_depth, const CameraConfig& cfg);

/// Re-synthesises the pair from (sharp, inv_depth) and returns the average of
/// the two per-view restoration losses against `observed`.
double reblur_loss(const Image& sharp, const InverseDepthMap& inv_depth, const DpPair& observed,
                   const CameraConfig& cfg);

/// Same, for a pair that was already re-synthesised.
double reblur_loss(const DpPair& resynthesised, const DpPair& observed);

/// Unweighted sum of the three terms. The reblur term uses `reblur_sharp` and
/// `reblur_inv_depth`, which callers may set to either the prediction or the
/// ground truth.
struct LossInputs {
    const Image* pred_sharp = nullptr;
    const Image* target_sharp = nullptr;
    const InverseDepthMap* pred_inv_depth = nullptr;
    const InverseDepthMap* target_inv_depth = nullptr;
    const Image* reblur_sharp = nullptr;
    const InverseDepthMap* reblur_inv_depth = nullptr;
    const DpPair* observed = nullptr;
};

LossReport combined_loss(const LossInputs& in, const CameraConfig& cfg);

}  // namespace dpsim
