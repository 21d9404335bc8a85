#include "dpsim/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dpsim/errors.hpp"

namespace dpsim {

SweepConfig SweepConfig::uniform_inverse_depth(double near, double far, int count, int window) {
    if (count < 2 || !(near > 0.0) || !(far > near) || !std::isfinite(far)) {
        throw DomainError("uniform_inverse_depth: need count >= 2 and 0 < near < far");
    }
    SweepConfig sc;
    sc.window = window;
    sc.hypotheses.resize(static_cast<std::size_t>(count));
    const double inv_near = 1.0 / near;
    const double inv_far = 1.0 / far;
    // Largest inverse depth first so depths come out increasing.
    for (int k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) / (count - 1);
        sc.hypotheses[k] = 1.0 / (inv_near + t * (inv_far - inv_near));
    }
    sc.hypotheses.front() = near;
    sc.hypotheses.back() = far;
    return sc;
}

void SweepConfig::validate(const CameraConfig& cfg) const {
    if (hypotheses.empty()) {
        throw DomainError("sweep: no depth hypotheses");
    }
    if (window < 0) {
        throw DomainError("sweep: window radius must be >= 0");
    }
    for (std::size_t k = 0; k < hypotheses.size(); ++k) {
        const double d = hypotheses[k];
        if (!std::isfinite(d) || d <= cfg.focal_length()) {
            std::ostringstream msg;
            msg << "sweep: hypothesis " << d << " must exceed the focal length";
            throw DomainError(msg.str());
        }
        if (k > 0 && !(d > hypotheses[k - 1])) {
            throw DomainError("sweep: hypotheses must be strictly increasing");
        }
    }
}

void MatchConfig::validate() const {
    if (max_disparity < 1) {
        throw DomainError("block_match: max_disparity must be >= 1");
    }
    if (block < 3 || block % 2 == 0) {
        throw DomainError("block_match: block must be odd and >= 3");
    }
}

Image box_mean(const Image& src, int radius) {
    if (src.channels() != 1) {
        throw ShapeError("box_mean expects a single-channel image");
    }
    const int rows = src.rows();
    const int cols = src.cols();
    // Summed-area table with a zero border row/column.
    std::vector<double> sat(static_cast<std::size_t>(rows + 1) * (cols + 1), 0.0);
    const auto at = [&](int r, int c) -> double& {
        return sat[static_cast<std::size_t>(r) * (cols + 1) + c];
    };
    for (int r = 0; r < rows; ++r) {
        double run = 0.0;
        for (int c = 0; c < cols; ++c) {
            run += src.at(r, c);
            at(r + 1, c + 1) = at(r, c + 1) + run;
        }
    }
    Image out(rows, cols);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        const int r0 = std::max(0, r - radius);
        const int r1 = std::min(rows, r + radius + 1);
        for (int c = 0; c < cols; ++c) {
            const int c0 = std::max(0, c - radius);
            const int c1 = std::min(cols, c + radius + 1);
            const double sum = at(r1, c1) - at(r0, c1) - at(r1, c0) + at(r0, c0);
            out.at(r, c) = sum / static_cast<double>((r1 - r0) * (c1 - c0));
        }
    }
    return out;
}

Image local_variance(const Image& img, int radius) {
    const Image gray = to_gray(img);
    Image sq = gray;
    for (double& v : sq.values()) v *= v;
    const Image mean = box_mean(gray, radius);
    const Image mean_sq = box_mean(sq, radius);
    Image out(gray.rows(), gray.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double m = mean.values()[i];
        out.values()[i] = std::max(0.0, mean_sq.values()[i] - m * m);
    }
    return out;
}

SweepResult sweep_depth(const Image& sharp, const DpPair& observed, const CameraConfig& cfg,
                        const SweepConfig& sweep) {
    sweep.validate(cfg);
    require_same_shape(observed.left, observed.right, "sweep_depth observed pair");
    require_same_shape(sharp, observed.left, "sweep_depth sharp vs observed");
    const int rows = sharp.rows();
    const int cols = sharp.cols();
    const int channels = sharp.channels();
    constexpr double kInf = std::numeric_limits<double>::infinity();

    SweepResult res;
    res.index = Grid<int>(rows, cols, 1, -1);
    res.best_residual = Image(rows, cols, 1, kInf);
    res.second_residual = Image(rows, cols, 1, kInf);

    Image residual(rows, cols);
    for (std::size_t k = 0; k < sweep.hypotheses.size(); ++k) {
        const SimulationResult sim =
            simulate_fast(constant_depth_scene(sharp, sweep.hypotheses[k]), cfg);
#pragma omp parallel for schedule(static)
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                double sum = 0.0;
                for (int ch = 0; ch < channels; ++ch) {
                    const double dl = sim.pair.left.at(r, c, ch) - observed.left.at(r, c, ch);
                    const double dr = sim.pair.right.at(r, c, ch) - observed.right.at(r, c, ch);
                    sum += dl * dl + dr * dr;
                }
                residual.at(r, c) = sum;
            }
        }
        const Image agg = box_mean(residual, sweep.window);
#pragma omp parallel for schedule(static)
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const double v = agg.at(r, c);
                double& best = res.best_residual.at(r, c);
                if (v < best) {
                    res.second_residual.at(r, c) = best;
                    best = v;
                    res.index.at(r, c) = static_cast<int>(k);
                } else if (v < res.second_residual.at(r, c)) {
                    res.second_residual.at(r, c) = v;
                }
            }
        }
    }

    const Image variance = local_variance(sharp, std::max(sweep.window, 1));
    res.depth = DepthMap(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int k = res.index.at(r, c);
            const bool textured = variance.at(r, c) >= sweep.texture_threshold;
            res.depth.values.at(r, c) = k >= 0 ? sweep.hypotheses[k] : 0.0;
            res.depth.valid.at(r, c) = (k >= 0 && textured) ? 1 : 0;
        }
    }
    return res;
}

DisparityMap block_match(const DpPair& observed, const MatchConfig& mc) {
    mc.validate();
    require_same_shape(observed.left, observed.right, "block_match");
    const Image left = to_gray(observed.left);
    const Image right = to_gray(observed.right);
    const int rows = left.rows();
    const int cols = left.cols();
    const int half = mc.block / 2;
    const int range = mc.max_disparity;
    const int candidates = 2 * range + 1;
    const double block_pixels = static_cast<double>(mc.block) * mc.block;

    DisparityMap out(rows, cols);
    std::fill(out.valid.values().begin(), out.valid.values().end(), std::uint8_t{0});

#pragma omp parallel for schedule(static)
    for (int r = half; r < rows - half; ++r) {
        std::vector<double> cost(static_cast<std::size_t>(candidates));
        for (int c = half + range; c < cols - half - range; ++c) {
            double sum = 0.0;
            double sum_sq = 0.0;
            for (int i = -half; i <= half; ++i) {
                for (int j = -half; j <= half; ++j) {
                    const double v = left.at(r + i, c + j);
                    sum += v;
                    sum_sq += v * v;
                }
            }
            const double mean = sum / block_pixels;
            if (sum_sq / block_pixels - mean * mean < mc.texture_threshold) {
                continue;
            }
            int best = 0;
            for (int o = -range; o <= range; ++o) {
                double ssd = 0.0;
                for (int i = -half; i <= half; ++i) {
                    for (int j = -half; j <= half; ++j) {
                        const double d = left.at(r + i, c + j) - right.at(r + i, c + j - o);
                        ssd += d * d;
                    }
                }
                cost[o + range] = ssd;
                if (ssd < cost[best]) {
                    best = o + range;
                }
            }
            double disparity = best - range;
            // A zero-cost minimum is an exact match; the parabola through a
            // V-shaped SSD would only pull it off the integer.
            if (mc.subpixel && best > 0 && best < candidates - 1 && cost[best] > 0.0) {
                const double cm = cost[best - 1];
                const double c0 = cost[best];
                const double cp = cost[best + 1];
                const double denom = cm - 2.0 * c0 + cp;
                if (denom > 0.0) {
                    disparity += 0.5 * (cm - cp) / denom;
                }
            }
            out.values.at(r, c) = disparity;
            out.valid.at(r, c) = 1;
        }
    }
    return out;
}

DepthMap disparity_to_depth_map(const DisparityMap& disp, const CameraConfig& cfg) {
    DepthMap out(disp.rows(), disp.cols());
    for (int r = 0; r < disp.rows(); ++r) {
        for (int c = 0; c < disp.cols(); ++c) {
            out.valid.at(r, c) = 0;
            if (disp.valid.at(r, c) == 0) {
                continue;
            }
            try {
                out.values.at(r, c) = depth_for_disparity(disp.values.at(r, c), cfg);
                out.valid.at(r, c) = 1;
            } catch (const RangeError&) {
            }
        }
    }
    return out;
}

}  // namespace dpsim
