#include "dpsim/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "dpsim/errors.hpp"

namespace dpsim {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
    }
    return f;
}

[[noreturn]] void png_error_handler(png_structp, png_const_charp msg) {
    throw FormatError(std::string("png: ") + msg);
}

void png_warning_handler(png_structp, png_const_charp) {}

}  // namespace

PngData read_png(const std::filesystem::path& path) {
    FilePtr file = open_file(path, "rb");
    unsigned char sig[8];
    if (std::fread(sig, 1, sizeof(sig), file.get()) != sizeof(sig) ||
        png_sig_cmp(sig, 0, sizeof(sig)) != 0) {
        throw FormatError(path.string() + " is not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                             png_warning_handler);
    if (png == nullptr) {
        throw IoError("png_create_read_struct failed");
    }
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_read_struct(p, i, nullptr); }
    } guard{&png, &info};

    try {
        png_init_io(png, file.get());
        png_set_sig_bytes(png, sizeof(sig));
        png_read_info(png, info);
        const int color = png_get_color_type(png, info);
        int depth = png_get_bit_depth(png, info);
        if (color == PNG_COLOR_TYPE_PALETTE) {
            png_set_palette_to_rgb(png);
            depth = 8;
        }
        if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
            png_set_expand_gray_1_2_4_to_8(png);
            depth = 8;
        }
        if ((color & PNG_COLOR_MASK_ALPHA) != 0 || png_get_valid(png, info, PNG_INFO_tRNS)) {
            throw FormatError(path.string() + ": images with alpha are not supported");
        }
        if (depth == 16 && std::endian::native == std::endian::little) {
            png_set_swap(png);
        }
        png_read_update_info(png, info);
        const int rows = static_cast<int>(png_get_image_height(png, info));
        const int cols = static_cast<int>(png_get_image_width(png, info));
        const int channels = png_get_channels(png, info);
        if (channels != 1 && channels != 3) {
            throw FormatError(path.string() + ": expected 1 or 3 channels");
        }
        const std::size_t rowbytes = png_get_rowbytes(png, info);
        std::vector<unsigned char> buffer(rowbytes * rows);
        std::vector<png_bytep> ptrs(static_cast<std::size_t>(rows));
        for (int r = 0; r < rows; ++r) ptrs[r] = buffer.data() + rowbytes * r;
        png_read_image(png, ptrs.data());
        png_read_end(png, nullptr);

        PngData out{Image(rows, cols, channels), depth};
        const std::size_t per_row = static_cast<std::size_t>(cols) * channels;
        for (int r = 0; r < rows; ++r) {
            auto dst = out.pixels.row(r);
            if (depth == 16) {
                std::uint16_t v;
                for (std::size_t i = 0; i < per_row; ++i) {
                    std::memcpy(&v, ptrs[r] + 2 * i, 2);
                    dst[i] = v;
                }
            } else {
                for (std::size_t i = 0; i < per_row; ++i) dst[i] = ptrs[r][i];
            }
        }
        return out;
    } catch (const FormatError& e) {
        if (std::string(e.what()).find(path.string()) == std::string::npos) {
            throw FormatError(path.string() + ": " + e.what());
        }
        throw;
    }
}

Image read_png_normalized(const std::filesystem::path& path) {
    PngData data = read_png(path);
    const double scale = data.bit_depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
    for (double& v : data.pixels.values()) v *= scale;
    return std::move(data.pixels);
}

void write_png(const std::filesystem::path& path, const Image& img, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw FormatError("write_png: bit depth must be 8 or 16");
    }
    if (img.channels() != 1 && img.channels() != 3) {
        throw FormatError("write_png: expected 1 or 3 channels");
    }
    FilePtr file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                              png_warning_handler);
    if (png == nullptr) {
        throw IoError("png_create_write_struct failed");
    }
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_write_struct(p, i); }
    } guard{&png, &info};

    png_init_io(png, file.get());
    png_set_IHDR(png, info, img.cols(), img.rows(), bit_depth,
                 img.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const double max_value = bit_depth == 16 ? 65535.0 : 255.0;
    const std::size_t per_row = static_cast<std::size_t>(img.cols()) * img.channels();
    std::vector<unsigned char> buffer(per_row * (bit_depth / 8));
    for (int r = 0; r < img.rows(); ++r) {
        auto src = img.row(r);
        for (std::size_t i = 0; i < per_row; ++i) {
            const double v = std::round(std::clamp(src[i], 0.0, 1.0) * max_value);
            if (bit_depth == 16) {
                const auto q = static_cast<std::uint16_t>(v);
                buffer[2 * i] = static_cast<unsigned char>(q >> 8);  // PNG is big-endian
                buffer[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
            } else {
                buffer[i] = static_cast<unsigned char>(v);
            }
        }
        png_write_row(png, buffer.data());
    }
    png_write_end(png, nullptr);
    if (std::fflush(file.get()) != 0) {
        throw IoError("write failed: " + path.string());
    }
}

Image read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string magic;
    int cols = 0;
    int rows = 0;
    double scale = 0.0;
    in >> magic >> cols >> rows >> scale;
    if (!in || (magic != "Pf" && magic != "PF") || cols <= 0 || rows <= 0 || scale == 0.0) {
        throw FormatError(path.string() + ": malformed PFM header");
    }
    in.get();  // single whitespace before the raster
    const int channels = magic == "PF" ? 3 : 1;
    const bool little = scale < 0.0;
    const std::size_t per_row = static_cast<std::size_t>(cols) * channels;
    std::vector<unsigned char> raw(per_row * 4);
    Image out(rows, cols, channels);
    for (int r = rows - 1; r >= 0; --r) {
        if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
            throw FormatError(path.string() + ": truncated PFM raster");
        }
        auto dst = out.row(r);
        for (std::size_t i = 0; i < per_row; ++i) {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b) {
                const std::uint32_t byte = raw[4 * i + (little ? b : 3 - b)];
                bits |= byte << (8 * b);
            }
            dst[i] = static_cast<double>(std::bit_cast<float>(bits));
        }
    }
    return out;
}

void write_pfm(const std::filesystem::path& path, const Image& img) {
    if (img.channels() != 1 && img.channels() != 3) {
        throw FormatError("write_pfm: expected 1 or 3 channels");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << (img.channels() == 3 ? "PF" : "Pf") << '\n'
        << img.cols() << ' ' << img.rows() << '\n'
        << "-1.0\n";
    const std::size_t per_row = static_cast<std::size_t>(img.cols()) * img.channels();
    std::vector<unsigned char> raw(per_row * 4);
    for (int r = img.rows() - 1; r >= 0; --r) {
        auto src = img.row(r);
        for (std::size_t i = 0; i < per_row; ++i) {
            const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(src[i]));
            for (int b = 0; b < 4; ++b) raw[4 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
        }
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

}  // namespace dpsim
