#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpsim/errors.hpp"

namespace dpsim {

/// Dense row-major H x W x C grid, channels interleaved.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols, int channels = 1, T fill = T{})
        : rows_(rows), cols_(cols), channels_(channels) {
        if (rows < 0 || cols < 0 || channels < 1) {
            throw ShapeError("invalid grid dimensions");
        }
        data_.assign(static_cast<std::size_t>(rows) * cols * channels, fill);
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int channels() const { return channels_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(rows_) * cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& at(int r, int c, int ch = 0) { return data_[index(r, c, ch)]; }
    const T& at(int r, int c, int ch = 0) const { return data_[index(r, c, ch)]; }

    std::span<T> row(int r) {
        return {data_.data() + index(r, 0, 0), static_cast<std::size_t>(cols_) * channels_};
    }
    std::span<const T> row(int r) const {
        return {data_.data() + index(r, 0, 0), static_cast<std::size_t>(cols_) * channels_};
    }

    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }
    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    bool same_shape(const Grid& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && channels_ == other.channels_;
    }
    template <typename U>
    bool same_extent(const Grid<U>& other) const {
        return rows_ == other.rows() && cols_ == other.cols();
    }

    bool operator==(const Grid&) const = default;

private:
    std::size_t index(int r, int c, int ch) const {
        return (static_cast<std::size_t>(r) * cols_ + c) * channels_ + ch;
    }

    int rows_ = 0;
    int cols_ = 0;
    int channels_ = 1;
    std::vector<T> data_;
};

using Image = Grid<double>;
using Mask = Grid<std::uint8_t>;

/// Depth (or inverse depth) values with a per-pixel validity mask.
struct DepthMap {
    Image values;  // single channel
    Mask valid;

    DepthMap() = default;
    DepthMap(int rows, int cols, double fill = 0.0)
        : values(rows, cols, 1, fill), valid(rows, cols, 1, 1) {}

    int rows() const { return values.rows(); }
    int cols() const { return values.cols(); }
    std::size_t valid_count() const;
};

using InverseDepthMap = DepthMap;

inline std::size_t DepthMap::valid_count() const {
    std::size_t n = 0;
    for (auto v : valid.values()) {
        n += v != 0;
    }
    return n;
}

/// Per-pixel channel mean.
Image to_gray(const Image& img);

/// Elementwise 1/x on valid pixels; non-positive or non-finite entries become invalid.
DepthMap invert_depth(const DepthMap& map);

void require_same_shape(const Image& a, const Image& b, const std::string& what);

}  // namespace dpsim
