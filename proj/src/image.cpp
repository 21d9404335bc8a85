#include "dpsim/image.hpp"

#include <cmath>

namespace dpsim {

Image to_gray(const Image& img) {
    if (img.channels() == 1) {
        return img;
    }
    Image out(img.rows(), img.cols(), 1);
    const double inv = 1.0 / img.channels();
    for (int r = 0; r < img.rows(); ++r) {
        for (int c = 0; c < img.cols(); ++c) {
            double sum = 0.0;
            for (int ch = 0; ch < img.channels(); ++ch) {
                sum += img.at(r, c, ch);
            }
            out.at(r, c) = sum * inv;
        }
    }
    return out;
}

DepthMap invert_depth(const DepthMap& map) {
    DepthMap out(map.rows(), map.cols());
    for (int r = 0; r < map.rows(); ++r) {
        for (int c = 0; c < map.cols(); ++c) {
            const double v = map.values.at(r, c);
            const bool ok = map.valid.at(r, c) != 0 && std::isfinite(v) && v > 0.0;
            out.values.at(r, c) = ok ? 1.0 / v : 0.0;
            out.valid.at(r, c) = ok ? 1 : 0;
        }
    }
    return out;
}

void require_same_shape(const Image& a, const Image& b, const std::string& what) {
    if (!a.same_shape(b)) {
        throw ShapeError(what + ": dimension mismatch (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + "x" + std::to_string(a.channels()) + " vs " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + "x" +
                         std::to_string(b.channels()) + ")");
    }
}

}  // namespace dpsim
