#include "dpsim/losses.hpp"

#include <cmath>
#include <sstream>

#include "dpsim/errors.hpp"

namespace dpsim {

double restoration_loss(const Image& pred, const Image& target) {
    require_same_shape(pred, target, "restoration_loss");
    const std::size_t n = pred.pixel_count();
    if (n == 0) {
        throw ShapeError("restoration_loss: empty image");
    }
    const int channels = pred.channels();
    const auto p = pred.values();
    const auto t = target.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double sq = 0.0;
        for (int ch = 0; ch < channels; ++ch) {
            const double d = p[i * channels + ch] - t[i * channels + ch];
            sq += d * d;
        }
        sum += std::sqrt(sq);
    }
    return sum / static_cast<double>(n);
}

double smooth_l1(double x) {
    const double a = std::abs(x);
    return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

double depth_loss(const InverseDepthMap& pred, const InverseDepthMap& target) {
    if (!pred.values.same_shape(target.values) || !target.valid.same_extent(target.values)) {
        throw ShapeError("depth_loss: dimension mismatch");
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (int r = 0; r < target.rows(); ++r) {
        for (int c = 0; c < target.cols(); ++c) {
            if (target.valid.at(r, c) == 0) {
                continue;
            }
            sum += smooth_l1(target.values.at(r, c) - pred.values.at(r, c));
            ++n;
        }
    }
    if (n == 0) {
        throw EmptyMaskError("depth_loss: target has no valid pixels");
    }
    return sum / static_cast<double>(n);
}

DepthMap depth_from_inverse(const InverseDepthMap& inv_depth, const CameraConfig& cfg) {
    DepthMap depth = invert_depth(inv_depth);
    const double f = cfg.focal_length();
    for (int r = 0; r < depth.rows(); ++r) {
        for (int c = 0; c < depth.cols(); ++c) {
            if (depth.valid.at(r, c) != 0 && !(depth.values.at(r, c) > f)) {
                std::ostringstream msg;
                msg << "inverse depth " << inv_depth.values.at(r, c) << " at (" << r << ", " << c
                    << ") gives depth <= focal length f=" << f;
                throw DomainError(msg.str());
            }
        }
    }
    return depth;
}

double reblur_loss(const DpPair& resynthesised, const DpPair& observed) {
    return 0.5 * (restoration_loss(resynthesised.left, observed.left) +
                  restoration_loss(resynthesised.right, observed.right));
}

double reblur_loss(const Image& sharp, const InverseDepthMap& inv_depth, const DpPair& observed,
                   const CameraConfig& cfg) {
    require_same_shape(observed.left, observed.right, "reblur_loss observed pair");
    require_same_shape(sharp, observed.left, "reblur_loss sharp vs observed");
    if (!sharp.same_extent(inv_depth.values)) {
        throw ShapeError("reblur_loss: inverse depth dimension mismatch");
    }
    RgbdImage scene{sharp, depth_from_inverse(inv_depth, cfg)};
    const SimulationResult sim = simulate_fast(scene, cfg);
    return reblur_loss(sim.pair, observed);
}

LossReport combined_loss(const LossInputs& in, const CameraConfig& cfg) {
    LossReport report;
    if (in.pred_sharp != nullptr && in.target_sharp != nullptr) {
        report.restoration = restoration_loss(*in.pred_sharp, *in.target_sharp);
    }
    if (in.pred_inv_depth != nullptr && in.target_inv_depth != nullptr) {
        report.depth = depth_loss(*in.pred_inv_depth, *in.target_inv_depth);
    }
    if (in.reblur_sharp != nullptr && in.reblur_inv_depth != nullptr && in.observed != nullptr) {
        report.reblur = reblur_loss(*in.reblur_sharp, *in.reblur_inv_depth, *in.observed, cfg);
    }
    report.total = report.restoration + report.depth + report.reblur;
    return report;
}

}  // namespace dpsim
