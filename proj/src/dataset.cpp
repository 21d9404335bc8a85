#include "dpsim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>

#include "dpsim/camera_json.hpp"
#include "dpsim/errors.hpp"
#include "dpsim/image_io.hpp"

namespace dpsim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool has_extension(const fs::path& p, const char* ext) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return e == ext;
}

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double lerp(double a, double b, double t) { return a + (b - a) * t; }

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

const char* policy_name(CameraRanges::FocusPolicy p) {
    return p == CameraRanges::FocusPolicy::InScene ? "in-scene" : "sensor-range";
}

json ranges_to_json(const CameraRanges& r) {
    json j;
    j["focal_length"] = json::array({r.focal_min, r.focal_max});
    j["f_number"] = json::array({r.f_number_min, r.f_number_max});
    j["focus_policy"] = policy_name(r.focus);
    if (r.focus == CameraRanges::FocusPolicy::SensorRange) {
        j["sensor_distance"] = json::array({r.sensor_min, r.sensor_max});
    }
    j["magnification_normalized"] = r.magnification_normalized;
    return j;
}

std::pair<double, double> read_range(const json& j, const char* key, std::pair<double, double> def) {
    if (!j.contains(key)) {
        return def;
    }
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2) {
        throw FormatError(std::string("camera_ranges.") + key + " must be [min, max]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

CameraRanges ranges_from_json(const json& j) {
    CameraRanges r;
    std::tie(r.focal_min, r.focal_max) = read_range(j, "focal_length", {r.focal_min, r.focal_max});
    std::tie(r.f_number_min, r.f_number_max) =
        read_range(j, "f_number", {r.f_number_min, r.f_number_max});
    if (j.contains("focus_policy")) {
        const auto p = j.at("focus_policy").get<std::string>();
        if (p == "in-scene") {
            r.focus = CameraRanges::FocusPolicy::InScene;
        } else if (p == "sensor-range") {
            r.focus = CameraRanges::FocusPolicy::SensorRange;
        } else {
            throw FormatError("camera_ranges.focus_policy must be in-scene or sensor-range");
        }
    }
    std::tie(r.sensor_min, r.sensor_max) =
        read_range(j, "sensor_distance", {r.sensor_min, r.sensor_max});
    if (j.contains("magnification_normalized")) {
        r.magnification_normalized = j.at("magnification_normalized").get<bool>();
    }
    r.validate();
    return r;
}

std::pair<double, double> valid_depth_range(const DepthMap& depth) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int r = 0; r < depth.rows(); ++r) {
        for (int c = 0; c < depth.cols(); ++c) {
            if (depth.valid.at(r, c) == 0) continue;
            lo = std::min(lo, depth.values.at(r, c));
            hi = std::max(hi, depth.values.at(r, c));
        }
    }
    return {lo, hi};
}

}  // namespace

DepthMap load_depth_map(const fs::path& path, double depth_scale) {
    if (!std::isfinite(depth_scale) || !(depth_scale > 0.0)) {
        throw DomainError("depth_scale must be finite and > 0");
    }
    Image raw;
    if (has_extension(path, ".pfm")) {
        raw = read_pfm(path);
    } else {
        PngData png = read_png(path);
        if (png.bit_depth != 16) {
            throw FormatError(path.string() + ": depth PNG must be 16-bit");
        }
        raw = std::move(png.pixels);
    }
    if (raw.channels() != 1) {
        throw FormatError(path.string() + ": depth map must have one channel");
    }
    DepthMap depth(raw.rows(), raw.cols());
    for (int r = 0; r < raw.rows(); ++r) {
        for (int c = 0; c < raw.cols(); ++c) {
            const double v = raw.at(r, c);
            const bool ok = std::isfinite(v) && v > 0.0;
            depth.values.at(r, c) = ok ? v * depth_scale : 0.0;
            depth.valid.at(r, c) = ok ? 1 : 0;
        }
    }
    return depth;
}

RgbdImage load_rgbd(const fs::path& rgb, const fs::path& depth, double depth_scale) {
    RgbdImage img;
    img.intensity = read_png_normalized(rgb);
    img.depth = load_depth_map(depth, depth_scale);
    if (!img.intensity.same_extent(img.depth.values)) {
        throw ShapeMismatchError(rgb.string() + " and " + depth.string() +
                                 " have different dimensions");
    }
    return img;
}

void CameraRanges::validate() const {
    const auto ordered = [](double lo, double hi) {
        return std::isfinite(lo) && std::isfinite(hi) && lo > 0.0 && lo <= hi;
    };
    if (!ordered(focal_min, focal_max)) {
        throw DomainError("camera_ranges: focal length range must satisfy 0 < min <= max");
    }
    if (!ordered(f_number_min, f_number_max)) {
        throw DomainError("camera_ranges: f-number range must satisfy 0 < min <= max");
    }
    if (focus == FocusPolicy::SensorRange && !ordered(sensor_min, sensor_max)) {
        throw DomainError("camera_ranges: sensor distance range must satisfy 0 < min <= max");
    }
}

DatasetManifest parse_manifest(const json& j, const fs::path& base_dir) {
    try {
        DatasetManifest m;
        m.base_dir = base_dir;
        m.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("camera_ranges")) {
            m.ranges = ranges_from_json(j.at("camera_ranges"));
        }
        for (const json& e : j.value("entries", json::array())) {
            ManifestEntry entry;
            entry.rgb = e.at("rgb").get<std::string>();
            entry.depth = e.at("depth").get<std::string>();
            entry.depth_scale = e.value("depth_scale", 1.0);
            if (e.contains("camera")) {
                entry.camera = camera_from_json(e.at("camera"));
            }
            m.entries.push_back(std::move(entry));
        }
        return m;
    } catch (const json::exception& e) {
        throw FormatError(std::string("manifest: ") + e.what());
    }
}

DatasetManifest load_manifest(const fs::path& path) {
    return parse_manifest(read_json(path), path.parent_path());
}

CameraConfig sample_camera(const CameraRanges& ranges, std::uint64_t seed, std::size_t index,
                           double scene_near, double scene_far) {
    ranges.validate();
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
    std::mt19937_64 rng(seq);
    const double f = lerp(ranges.focal_min, ranges.focal_max, unit_uniform(rng));
    const double f_number = lerp(ranges.f_number_min, ranges.f_number_max, unit_uniform(rng));
    const double u_focus = unit_uniform(rng);
    const double aperture = f / f_number;
    if (ranges.focus == CameraRanges::FocusPolicy::SensorRange) {
        const double F = lerp(ranges.sensor_min, ranges.sensor_max, u_focus);
        return CameraConfig(f, F, aperture, ranges.magnification_normalized);
    }
    if (!(scene_far > f)) {
        throw DomainError("every valid depth is <= the sampled focal length f=" +
                          std::to_string(f));
    }
    const double near = std::max(scene_near, std::nextafter(f, scene_far));
    const double focus = lerp(near, scene_far, u_focus);
    return CameraConfig::focused_at(f, focus, aperture, ranges.magnification_normalized);
}

std::string sample_dir_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sample_%05zu", index);
    return buf;
}

json GenerationReport::to_json() const {
    json j;
    j["successes"] = successes;
    j["failures"] = failures;
    j["total_clipped_energy"] = total_clipped;
    json list = json::array();
    for (const auto& e : entries) {
        json item;
        item["index"] = e.index;
        item["ok"] = e.ok;
        if (e.ok) {
            item["sample_dir"] = e.sample_dir;
            item["clipped_energy"] = e.clipped_energy;
        } else {
            item["error"] = e.error;
        }
        list.push_back(std::move(item));
    }
    j["entries"] = std::move(list);
    return j;
}

namespace {

std::size_t count_above_one(const Image& img) {
    std::size_t n = 0;
    for (double v : img.values()) n += v > 1.0 ? 1 : 0;
    return n;
}

EntryOutcome generate_entry(const DatasetManifest& manifest, std::size_t index,
                            const fs::path& out_dir, const GenerationOptions& options) {
    const ManifestEntry& entry = manifest.entries[index];
    EntryOutcome outcome;
    outcome.index = index;

    const RgbdImage scene = load_rgbd(manifest.base_dir / entry.rgb,
                                      manifest.base_dir / entry.depth, entry.depth_scale);
    const auto [near, far] = valid_depth_range(scene.depth);
    if (!(far >= near)) {
        throw DomainError("depth map has no valid pixels");
    }
    const CameraConfig cfg = entry.camera.has_value()
                                 ? *entry.camera
                                 : sample_camera(manifest.ranges, manifest.seed, index, near, far);
    const SimulationResult sim = simulate_fast(scene, cfg);

    outcome.sample_dir = sample_dir_name(index);
    const fs::path dir = out_dir / outcome.sample_dir;
    fs::create_directories(dir);
    write_png(dir / "left.png", sim.pair.left, 16);
    write_png(dir / "right.png", sim.pair.right, 16);
    write_png(dir / "sharp.png", scene.intensity, 16);
    if (options.export_8bit) {
        write_png(dir / "left_8bit.png", sim.pair.left, 8);
        write_png(dir / "right_8bit.png", sim.pair.right, 8);
    }
    const DepthMap inv = invert_depth(scene.depth);
    write_pfm(dir / "inv_depth.pfm", inv.values);

    outcome.clipped_energy = sim.total_clipped();
    json side;
    side["index"] = index;
    side["seed"] = manifest.seed;
    side["rgb"] = entry.rgb;
    side["depth"] = entry.depth;
    side["depth_scale"] = entry.depth_scale;
    side["camera_source"] = entry.camera.has_value() ? "manifest" : "sampled";
    side["camera"] = camera_to_json(cfg);
    side["camera"]["aperture_size"] = cfg.aperture_left().height();
    side["sampling"] = ranges_to_json(manifest.ranges);
    side["scene_depth_range"] = json::array({near, far});
    side["clipped_energy"] = {{"left", sim.left_stats.clipped_energy},
                              {"right", sim.right_stats.clipped_energy}};
    side["scattered_pixels"] = sim.scattered_pixels;
    // Scatter can pile more than unit intensity onto a pixel; the PNGs clamp it.
    side["saturated_samples"] = {{"left", count_above_one(sim.pair.left)},
                                 {"right", count_above_one(sim.pair.right)}};
    side["files"] = {{"left", "left.png"},
                     {"right", "right.png"},
                     {"sharp", "sharp.png"},
                     {"inverse_depth", "inv_depth.pfm"}};
    write_json(dir / "camera.json", side);
    outcome.ok = true;
    return outcome;
}

}  // namespace

GenerationReport generate_dataset(const DatasetManifest& manifest, const fs::path& out_dir,
                                  const GenerationOptions& options) {
    GenerationReport report;
    const std::size_t n = manifest.entries.size();
    if (n == 0) {
        return report;
    }
    fs::create_directories(out_dir);
    report.entries.resize(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < n; ++i) {
        try {
            report.entries[i] = generate_entry(manifest, i, out_dir, options);
        } catch (const std::exception& e) {
            report.entries[i].index = i;
            report.entries[i].ok = false;
            report.entries[i].error = e.what();
        }
    }
    json index = json::array();
    for (const auto& e : report.entries) {
        if (e.ok) {
            ++report.successes;
            report.total_clipped += e.clipped_energy;
            index.push_back(e.sample_dir);
        } else {
            ++report.failures;
        }
    }
    write_json(out_dir / "index.json", json{{"samples", index}});
    write_json(out_dir / "report.json", report.to_json());
    return report;
}

LoadedSample load_sample(const fs::path& sample_dir) {
    const json side = read_json(sample_dir / "camera.json");
    LoadedSample s{read_png_normalized(sample_dir / "sharp.png"), {}, {},
                   camera_from_json(side.at("camera"))};
    s.inv_depth = load_depth_map(sample_dir / "inv_depth.pfm", 1.0);
    s.pair.left = read_png_normalized(sample_dir / "left.png");
    s.pair.right = read_png_normalized(sample_dir / "right.png");
    return s;
}

}  // namespace dpsim
