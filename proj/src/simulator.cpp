#include "dpsim/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "dpsim/errors.hpp"
#include "dpsim/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dpsim {

namespace {

constexpr std::array<View, 2> kViews = {View::Left, View::Right};

// Length of [a, b] inside [0, limit].
double clipped_length(double a, double b, double limit) {
    return std::max(0.0, std::min(b, limit) - std::max(a, 0.0));
}

// Adds `amount * value` to the bilinear neighbourhood of the continuous site
// (y, z), restricted to rows [row_lo, row_hi). Sites before the frame fold
// onto index 0; sites at or beyond the far edge are dropped.
void deposit_corner(Image& diff, double y, double z, double amount, const double* value,
                    int row_lo, int row_hi) {
    const int rows = diff.rows();
    const int cols = diff.cols();
    if (!(z < rows) || !(y < cols)) {
        return;
    }
    z = std::max(z, 0.0);
    y = std::max(y, 0.0);
    const double fz = std::floor(z);
    const double fy = std::floor(y);
    const int iz = static_cast<int>(fz);
    const int iy = static_cast<int>(fy);
    const double tz = z - fz;
    const double ty = y - fy;
    const std::array<std::pair<int, double>, 2> zs = {{{iz, 1.0 - tz}, {iz + 1, tz}}};
    const std::array<std::pair<int, double>, 2> ys = {{{iy, 1.0 - ty}, {iy + 1, ty}}};
    const int channels = diff.channels();
    for (const auto& [rz, wz] : zs) {
        if (rz < row_lo || rz >= row_hi || rz >= rows || wz == 0.0) {
            continue;
        }
        for (const auto& [cy, wy] : ys) {
            if (cy >= cols || wy == 0.0) {
                continue;
            }
            const double w = amount * wz * wy;
            double* dst = &diff.at(rz, cy, 0);
            for (int ch = 0; ch < channels; ++ch) {
                dst[ch] += w * value[ch];
            }
        }
    }
}

void deposit_box(Image& diff, const FrameBox& box, const double* value, int row_lo, int row_hi) {
    deposit_corner(diff, box.y0, box.z0, box.weight, value, row_lo, row_hi);
    deposit_corner(diff, box.y1, box.z0, -box.weight, value, row_lo, row_hi);
    deposit_corner(diff, box.y0, box.z1, -box.weight, value, row_lo, row_hi);
    deposit_corner(diff, box.y1, box.z1, box.weight, value, row_lo, row_hi);
}

// Principal point sits at the frame centre; pixel (r, c) has centre (c + 0.5, r + 0.5).
Vec2 centred_coords(int r, int c, int rows, int cols) {
    return {c + 0.5 - 0.5 * cols, r + 0.5 - 0.5 * rows};
}

// Footprints of every source pixel for both views, computed up front so the
// deposit pass only reads them.
struct Footprints {
    std::array<std::vector<FrameBox>, 2> boxes;
    std::vector<std::uint8_t> active;
};

Footprints compute_footprints(const RgbdImage& img, const CameraConfig& cfg) {
    const int rows = img.rows();
    const int cols = img.cols();
    const std::size_t n = img.intensity.pixel_count();
    Footprints fp;
    fp.active.assign(n, 0);
    for (auto& b : fp.boxes) {
        b.assign(n, FrameBox{});
    }
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (img.depth.valid.at(r, c) == 0) {
                continue;
            }
            const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
            const Vec2 p = centred_coords(r, c, rows, cols);
            const double d = img.depth.values.at(r, c);
            for (std::size_t v = 0; v < kViews.size(); ++v) {
                const BlurRegion region = blur_region(p, d, kViews[v], cfg);
                fp.boxes[v][idx] = frame_box(to_frame_region(region, rows, cols));
            }
            fp.active[idx] = 1;
        }
    }
    return fp;
}

ViewStats make_stats(int channels) {
    return {std::vector<double>(static_cast<std::size_t>(channels), 0.0),
            std::vector<double>(static_cast<std::size_t>(channels), 0.0)};
}

// Clipped energy summed in source order so the result does not depend on workers.
void accumulate_clipped(const RgbdImage& img, const Footprints& fp, SimulationResult& out) {
    const int rows = img.rows();
    const int cols = img.cols();
    const int channels = img.channels();
    for (std::size_t v = 0; v < kViews.size(); ++v) {
        ViewStats& stats = v == 0 ? out.left_stats : out.right_stats;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
                if (fp.active[idx] == 0) {
                    continue;
                }
                const double lost = 1.0 - fp.boxes[v][idx].inside_fraction(rows, cols);
                if (lost <= 0.0) {
                    continue;
                }
                for (int ch = 0; ch < channels; ++ch) {
                    stats.clipped_energy[ch] += lost * img.intensity.at(r, c, ch);
                }
            }
        }
    }
}

void fill_coverage(const Footprints& fp, SimulationResult& out, int rows, int cols) {
    out.coverage = Mask(rows, cols);
    std::size_t count = 0;
    auto cov = out.coverage.values();
    for (std::size_t i = 0; i < fp.active.size(); ++i) {
        cov[i] = fp.active[i];
        count += fp.active[i];
    }
    out.scattered_pixels = count;
}

// Zeroes negative round-off left by the signed accumulation; the removed
// magnitude is recorded per channel.
void clamp_negative(Image& img, std::vector<double>& removed) {
    const int channels = img.channels();
    for (int r = 0; r < img.rows(); ++r) {
        auto row = img.row(r);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] < 0.0) {
                removed[i % channels] -= row[i];
                row[i] = 0.0;
            }
        }
    }
}

}  // namespace

double SimulationResult::total_clipped() const {
    double total = 0.0;
    for (double v : left_stats.clipped_energy) total += v;
    for (double v : right_stats.clipped_energy) total += v;
    return total;
}

double FrameBox::inside_fraction(int rows, int cols) const {
    const double full = (y1 - y0) * (z1 - z0);
    if (!(full > 0.0)) {
        return 0.0;
    }
    return clipped_length(y0, y1, cols) * clipped_length(z0, z1, rows) / full;
}

BlurRegion to_frame_region(const BlurRegion& centred, int rows, int cols) {
    BlurRegion r = centred;
    const double oy = 0.5 * cols;
    const double oz = 0.5 * rows;
    r.y_min += oy;
    r.y_max += oy;
    r.z_min += oz;
    r.z_max += oz;
    return r;
}

FrameBox frame_box(const BlurRegion& region) {
    FrameBox box;
    if (region.width() * region.height() < 1.0) {
        const Vec2 c = region.center();
        box = {c.y - 0.5, c.y + 0.5, c.z - 0.5, c.z + 0.5, 1.0};
    } else {
        box = {region.y_min, region.y_max, region.z_min, region.z_max,
               1.0 / (region.width() * region.height())};
    }
    return box;
}

void splat_corners(DifferentialImage& diff, const BlurRegion& frame_region,
                   std::span<const double> value) {
    if (value.size() != static_cast<std::size_t>(diff.values.channels())) {
        throw ShapeError("splat_corners: value has the wrong channel count");
    }
    const FrameBox box = frame_box(frame_region);
    const double lost = 1.0 - box.inside_fraction(diff.values.rows(), diff.values.cols());
    for (std::size_t ch = 0; ch < value.size(); ++ch) {
        diff.clipped[ch] += lost * value[ch];
    }
    deposit_box(diff.values, box, value.data(), 0, diff.values.rows());
}

Image integrate(const Image& diff) {
    Image out = diff;
    const int rows = out.rows();
    const int cols = out.cols();
    const int channels = out.channels();
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        auto row = out.row(r);
        for (int c = 1; c < cols; ++c) {
            for (int ch = 0; ch < channels; ++ch) {
                row[static_cast<std::size_t>(c) * channels + ch] +=
                    row[static_cast<std::size_t>(c - 1) * channels + ch];
            }
        }
    }
    // Column pass over independent blocks of the interleaved row buffer.
    const int width = cols * channels;
    constexpr int kBlock = 256;
    const int blocks = (width + kBlock - 1) / kBlock;
    double* base = out.data();
#pragma omp parallel for schedule(static)
    for (int b = 0; b < blocks; ++b) {
        const int lo = b * kBlock;
        const int hi = std::min(width, lo + kBlock);
        for (int r = 1; r < rows; ++r) {
            double* cur = base + static_cast<std::size_t>(r) * width;
            const double* prev = cur - width;
            for (int i = lo; i < hi; ++i) {
                cur[i] += prev[i];
            }
        }
    }
    return out;
}

void validate_rgbd(const RgbdImage& img, const CameraConfig& cfg) {
    if (img.intensity.empty()) {
        throw ShapeError("empty intensity image");
    }
    if (!img.intensity.same_extent(img.depth.values) ||
        !img.intensity.same_extent(img.depth.valid)) {
        throw ShapeError("intensity and depth dimensions differ");
    }
    for (double v : img.intensity.values()) {
        if (!std::isfinite(v)) {
            throw DomainError("intensity image contains non-finite values");
        }
    }
    const double f = cfg.focal_length();
    for (int r = 0; r < img.rows(); ++r) {
        for (int c = 0; c < img.cols(); ++c) {
            if (img.depth.valid.at(r, c) == 0) {
                continue;
            }
            const double d = img.depth.values.at(r, c);
            if (!std::isfinite(d) || d <= f) {
                std::ostringstream msg;
                msg << "depth " << d << " at (" << r << ", " << c
                    << ") must be finite and exceed the focal length f=" << f;
                throw DomainError(msg.str());
            }
        }
    }
}

SimulationResult simulate_fast(const RgbdImage& img, const CameraConfig& cfg) {
    validate_rgbd(img, cfg);
    const int rows = img.rows();
    const int cols = img.cols();
    const int channels = img.channels();
    const Footprints fp = compute_footprints(img, cfg);

    SimulationResult out;
    out.left_stats = make_stats(channels);
    out.right_stats = make_stats(channels);
    accumulate_clipped(img, fp, out);
    fill_coverage(fp, out, rows, cols);

    std::array<Image, 2> diff = {Image(rows, cols, channels), Image(rows, cols, channels)};
    // Each worker owns a band of destination rows and walks the sources in
    // order, so every site sees its additions in the same sequence for any
    // worker count.
    const std::size_t n = fp.active.size();
#pragma omp parallel
    {
        int bands = 1;
        int band = 0;
#ifdef _OPENMP
        bands = omp_get_num_threads();
        band = omp_get_thread_num();
#endif
        const int row_lo = static_cast<int>(static_cast<long long>(rows) * band / bands);
        const int row_hi = static_cast<int>(static_cast<long long>(rows) * (band + 1) / bands);
        for (std::size_t idx = 0; idx < n; ++idx) {
            if (fp.active[idx] == 0) {
                continue;
            }
            const double* value = img.intensity.data() + idx * channels;
            for (std::size_t v = 0; v < kViews.size(); ++v) {
                const FrameBox& box = fp.boxes[v][idx];
                // Touched site rows lie within [floor(z0), floor(z1) + 1] after folding.
                const double first = std::floor(std::max(box.z0, 0.0));
                const double last = std::floor(std::max(box.z1, 0.0)) + 1.0;
                if (last < row_lo || first >= row_hi) {
                    continue;
                }
                deposit_box(diff[v], box, value, row_lo, row_hi);
            }
        }
    }

    out.pair.left = integrate(diff[0]);
    out.pair.right = integrate(diff[1]);
    clamp_negative(out.pair.left, out.left_stats.negative_clamped);
    clamp_negative(out.pair.right, out.right_stats.negative_clamped);
    return out;
}

SimulationResult simulate_brute(const RgbdImage& img, const CameraConfig& cfg) {
    validate_rgbd(img, cfg);
    const int rows = img.rows();
    const int cols = img.cols();
    const int channels = img.channels();
    const Footprints fp = compute_footprints(img, cfg);

    SimulationResult out;
    out.left_stats = make_stats(channels);
    out.right_stats = make_stats(channels);
    accumulate_clipped(img, fp, out);
    fill_coverage(fp, out, rows, cols);
    out.pair.left = Image(rows, cols, channels);
    out.pair.right = Image(rows, cols, channels);

    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
            if (fp.active[idx] == 0) {
                continue;
            }
            for (std::size_t v = 0; v < kViews.size(); ++v) {
                const FrameBox& box = fp.boxes[v][idx];
                Image& dst = out.pair.view(kViews[v]);
                const int z_lo = std::max(0, static_cast<int>(std::floor(std::max(box.z0, 0.0))));
                const int z_hi = static_cast<int>(std::min<double>(rows, std::ceil(box.z1)));
                const int y_lo = std::max(0, static_cast<int>(std::floor(std::max(box.y0, 0.0))));
                const int y_hi = static_cast<int>(std::min<double>(cols, std::ceil(box.y1)));
                for (int zr = z_lo; zr < z_hi; ++zr) {
                    const double oz = std::min(box.z1, zr + 1.0) - std::max(box.z0, double(zr));
                    if (oz <= 0.0) {
                        continue;
                    }
                    for (int yc = y_lo; yc < y_hi; ++yc) {
                        const double oy =
                            std::min(box.y1, yc + 1.0) - std::max(box.y0, double(yc));
                        if (oy <= 0.0) {
                            continue;
                        }
                        const double w = box.weight * oy * oz;
                        for (int ch = 0; ch < channels; ++ch) {
                            dst.at(zr, yc, ch) += w * img.intensity.at(r, c, ch);
                        }
                    }
                }
            }
        }
    }
    return out;
}

RgbdImage constant_depth_scene(const Image& intensity, double depth) {
    RgbdImage img;
    img.intensity = intensity;
    img.depth = DepthMap(intensity.rows(), intensity.cols(), depth);
    return img;
}

}  // namespace dpsim
