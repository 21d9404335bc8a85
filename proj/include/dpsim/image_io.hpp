#pragma once

#include <filesystem>

#include "dpsim/image.hpp"

namespace dpsim {

struct PngData {
    Image pixels;       // raw sample values (0..255 or 0..65535), not normalised
    int bit_depth = 8;  // 8 or 16
};

/// Reads an 8/16-bit grey or RGB PNG. Palette images are expanded to RGB and
/// sub-byte grey to 8 bits; images with alpha are rejected with FormatError.
PngData read_png(const std::filesystem::path& path);

/// Reads a PNG and scales samples into [0, 1].
Image read_png_normalized(const std::filesystem::path& path);

/// Writes 1- or 3-channel [0, 1] data, clamped and rounded to the given bit depth.
void write_png(const std::filesystem::path& path, const Image& img, int bit_depth = 16);

/// Portable float map ("Pf" grey, "PF" colour), little-endian, rows bottom-up on disk.
Image read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const Image& img);

}  // namespace dpsim
