#include "dpsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dpsim/errors.hpp"

namespace dpsim {

namespace {

struct Samples {
    std::vector<double> pred;
    std::vector<double> gt;
};

Samples gather(const DepthMap& pred, const DepthMap& gt, const Mask* mask) {
    if (pred.rows() != gt.rows() || pred.cols() != gt.cols() ||
        (mask != nullptr && !gt.values.same_extent(*mask))) {
        throw ShapeError("depth metrics: dimension mismatch");
    }
    Samples s;
    for (int r = 0; r < gt.rows(); ++r) {
        for (int c = 0; c < gt.cols(); ++c) {
            if (mask != nullptr && mask->at(r, c) == 0) continue;
            if (gt.valid.at(r, c) == 0 || pred.valid.at(r, c) == 0) continue;
            const double g = gt.values.at(r, c);
            if (!(g > 0.0)) continue;
            s.pred.push_back(pred.values.at(r, c));
            s.gt.push_back(g);
        }
    }
    if (s.gt.empty()) {
        throw EmptyMaskError("depth metrics: no valid pixels under the mask");
    }
    return s;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

AffineInvariantErrors fit_affine(const Samples& s) {
    const std::size_t n = s.pred.size();
    if (n < 2) {
        throw DegenerateFitError("affine fit needs at least two pixels");
    }
    const double mp = std::accumulate(s.pred.begin(), s.pred.end(), 0.0) / n;
    const double mg = std::accumulate(s.gt.begin(), s.gt.end(), 0.0) / n;
    double spp = 0.0;
    double spg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        spp += (s.pred[i] - mp) * (s.pred[i] - mp);
        spg += (s.pred[i] - mp) * (s.gt[i] - mg);
    }
    if (!(spp > 0.0)) {
        throw DegenerateFitError("affine fit: prediction is constant on the mask");
    }
    const auto [gmin, gmax] = std::minmax_element(s.gt.begin(), s.gt.end());
    const double range = *gmax - *gmin;
    if (!(range > 0.0)) {
        throw DegenerateFitError("affine fit: ground truth is constant on the mask");
    }
    AffineInvariantErrors out;
    out.scale = spg / spp;
    out.offset = mg - out.scale * mp;
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // Centred form keeps the residual exact under affine reparameterisation.
        const double res = out.scale * (s.pred[i] - mp) - (s.gt[i] - mg);
        abs_sum += std::abs(res);
        sq_sum += res * res;
    }
    out.ai1 = abs_sum / n / range;
    out.ai2 = std::sqrt(sq_sum / n) / range;
    return out;
}

double spearman_of(const Samples& s) {
    const std::size_t n = s.pred.size();
    if (n < 2) {
        throw DegenerateFitError("spearman: needs at least two pixels");
    }
    const auto rp = average_ranks(s.pred);
    const auto rg = average_ranks(s.gt);
    const double mean = 0.5 * static_cast<double>(n + 1);
    double spp = 0.0, sgg = 0.0, spg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        spp += (rp[i] - mean) * (rp[i] - mean);
        sgg += (rg[i] - mean) * (rg[i] - mean);
        spg += (rp[i] - mean) * (rg[i] - mean);
    }
    if (!(spp > 0.0) || !(sgg > 0.0)) {
        throw DegenerateFitError("spearman: constant input");
    }
    const double rho = spg / std::sqrt(spp * sgg);
    return std::clamp(1.0 - std::abs(rho), 0.0, 1.0);
}

// Separable Gaussian filter, "valid" region only.
Image gaussian_valid(const Image& src, const std::vector<double>& kernel) {
    const int k = static_cast<int>(kernel.size());
    const int rows = src.rows() - k + 1;
    const int cols = src.cols() - k + 1;
    Image horiz(src.rows(), cols);
    for (int r = 0; r < src.rows(); ++r) {
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += kernel[i] * src.at(r, c + i);
            horiz.at(r, c) = acc;
        }
    }
    Image out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += kernel[i] * horiz.at(r + i, c);
            out.at(r, c) = acc;
        }
    }
    return out;
}

std::vector<double> gaussian_kernel(int size, double sigma) {
    std::vector<double> k(static_cast<std::size_t>(size));
    const double mid = 0.5 * (size - 1);
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        k[i] = std::exp(-(i - mid) * (i - mid) / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

Image channel(const Image& img, int ch) {
    Image out(img.rows(), img.cols());
    for (int r = 0; r < img.rows(); ++r)
        for (int c = 0; c < img.cols(); ++c) out.at(r, c) = img.at(r, c, ch);
    return out;
}

double mse(const Image& a, const Image& b) {
    const auto x = a.values();
    const auto y = b.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += (x[i] - y[i]) * (x[i] - y[i]);
    return sum / static_cast<double>(x.size());
}

}  // namespace

DepthMetricReport depth_metrics(const DepthMap& pred, const DepthMap& gt, const Mask* mask) {
    const Samples s = gather(pred, gt, mask);
    const std::size_t n = s.gt.size();
    DepthMetricReport rep;
    rep.count = n;
    double abs_rel = 0.0, sq_rel = 0.0, sq = 0.0, sq_log = 0.0;
    std::size_t d1 = 0, d2 = 0, d3 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = s.pred[i];
        const double g = s.gt[i];
        if (!(p > 0.0)) {
            throw DomainError("depth metrics: non-positive prediction on the mask");
        }
        const double e = p - g;
        abs_rel += std::abs(e) / g;
        sq_rel += e * e / g;
        sq += e * e;
        const double le = std::log(p) - std::log(g);
        sq_log += le * le;
        const double ratio = std::max(p / g, g / p);
        d1 += ratio < 1.25;
        d2 += ratio < 1.25 * 1.25;
        d3 += ratio < 1.25 * 1.25 * 1.25;
    }
    const double inv = 1.0 / static_cast<double>(n);
    rep.abs_rel = abs_rel * inv;
    rep.sq_rel = sq_rel * inv;
    rep.rmse = std::sqrt(sq * inv);
    rep.rmse_log = std::sqrt(sq_log * inv);
    rep.delta1 = d1 * inv;
    rep.delta2 = d2 * inv;
    rep.delta3 = d3 * inv;
    try {
        const auto ai = fit_affine(s);
        rep.ai1 = ai.ai1;
        rep.ai2 = ai.ai2;
    } catch (const DegenerateFitError&) {
    }
    try {
        rep.spearman_term = spearman_of(s);
    } catch (const DegenerateFitError&) {
    }
    return rep;
}

AffineInvariantErrors affine_invariant_metrics(const DepthMap& pred, const DepthMap& gt,
                                               const Mask* mask) {
    return fit_affine(gather(pred, gt, mask));
}

double spearman_term(const DepthMap& pred, const DepthMap& gt, const Mask* mask) {
    return spearman_of(gather(pred, gt, mask));
}

double ssim(const Image& a, const Image& b) {
    require_same_shape(a, b, "ssim");
    constexpr int kWindow = 11;
    if (a.rows() < kWindow || a.cols() < kWindow) {
        throw ShapeError("ssim: image must be at least 11x11");
    }
    constexpr double C1 = (0.01 * 1.0) * (0.01 * 1.0);
    constexpr double C2 = (0.03 * 1.0) * (0.03 * 1.0);
    const auto kernel = gaussian_kernel(kWindow, 1.5);
    double total = 0.0;
    for (int ch = 0; ch < a.channels(); ++ch) {
        const Image x = channel(a, ch);
        const Image y = channel(b, ch);
        Image xx = x, yy = y, xy = x;
        for (std::size_t i = 0; i < x.size(); ++i) {
            xx.values()[i] = x.values()[i] * x.values()[i];
            yy.values()[i] = y.values()[i] * y.values()[i];
            xy.values()[i] = x.values()[i] * y.values()[i];
        }
        const Image mx = gaussian_valid(x, kernel);
        const Image my = gaussian_valid(y, kernel);
        const Image sxx = gaussian_valid(xx, kernel);
        const Image syy = gaussian_valid(yy, kernel);
        const Image sxy = gaussian_valid(xy, kernel);
        double sum = 0.0;
        for (std::size_t i = 0; i < mx.size(); ++i) {
            const double ux = mx.values()[i];
            const double uy = my.values()[i];
            const double vx = sxx.values()[i] - ux * ux;
            const double vy = syy.values()[i] - uy * uy;
            const double cxy = sxy.values()[i] - ux * uy;
            sum += ((2 * ux * uy + C1) * (2 * cxy + C2)) /
                   ((ux * ux + uy * uy + C1) * (vx + vy + C2));
        }
        total += sum / static_cast<double>(mx.size());
    }
    return total / a.channels();
}

double psnr(const Image& pred, const Image& gt) {
    require_same_shape(pred, gt, "psnr");
    const double m = mse(pred, gt);
    if (m <= 0.0) {
        return kPsnrCap;
    }
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / m));
}

ImageMetricReport image_metrics(const Image& pred, const Image& gt) {
    require_same_shape(pred, gt, "image_metrics");
    ImageMetricReport rep;
    rep.psnr = psnr(pred, gt);
    rep.ssim = ssim(pred, gt);
    rep.rmse_rel = 100.0 * std::sqrt(mse(pred, gt));
    return rep;
}

}  // namespace dpsim
