#pragma once

// RGB-D ingestion and bulk dual-pixel dataset generation.
//
// Output layout under the chosen directory:
//   sample_NNNNN/left.png, right.png, sharp.png   16-bit PNG
//   sample_NNNNN/inv_depth.pfm                    float32 1/d (pixel units), 0 = invalid
//   sample_NNNNN/camera.json                      sampled camera and provenance
//   index.json                                    successful samples, manifest order
//   report.json                                   per-entry outcome and totals

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpsim/image.hpp"
#include "dpsim/optics.hpp"
#include "dpsim/simulator.hpp"

namespace dpsim {

/// Reads an 8/16-bit RGB or grey PNG and a depth map (16-bit PNG or PFM).
/// Intensities are scaled to [0, 1]; depth is multiplied by `depth_scale`
/// into pixel units. Zero and non-finite depths are marked invalid.
RgbdImage load_rgbd(const std::filesystem::path& rgb, const std::filesystem::path& depth,
                    double depth_scale);

/// Depth-only loader used by load_rgbd and the CLI.
DepthMap load_depth_map(const std::filesystem::path& depth, double depth_scale);

/// Camera sampling ranges. Defaults are stand-ins, recorded in every sidecar.
struct CameraRanges {
    enum class FocusPolicy { InScene, SensorRange };

    double focal_min = 500.0;  // pixels
    double focal_max = 1500.0;
    double f_number_min = 1.2;  // aperture size = focal length / f-number
    double f_number_max = 4.0;
    FocusPolicy focus = FocusPolicy::InScene;
    double sensor_min = 0.0;  // used by SensorRange only
    double sensor_max = 0.0;
    bool magnification_normalized = true;

    void validate() const;
};

struct ManifestEntry {
    std::string rgb;    // as written in the manifest
    std::string depth;
    double depth_scale = 1.0;
    std::optional<CameraConfig> camera;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    CameraRanges ranges;
    std::uint64_t seed = 0;
    std::filesystem::path base_dir;  // entry paths are resolved against this
};

DatasetManifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Deterministic in (seed, index): same inputs give the same camera on every run.
/// `scene_near`/`scene_far` bound the valid depths for the in-scene focus policy.
CameraConfig sample_camera(const CameraRanges& ranges, std::uint64_t seed, std::size_t index,
                           double scene_near, double scene_far);

struct GenerationOptions {
    bool export_8bit = false;  // additional left_8bit.png / right_8bit.png for viewing
};

struct EntryOutcome {
    std::size_t index = 0;
    bool ok = false;
    std::string sample_dir;  // relative to the output directory
    std::string error;
    double clipped_energy = 0.0;
};

struct GenerationReport {
    std::vector<EntryOutcome> entries;  // manifest order
    std::size_t successes = 0;
    std::size_t failures = 0;
    double total_clipped = 0.0;

    nlohmann::json to_json() const;
};

GenerationReport generate_dataset(const DatasetManifest& manifest,
                                  const std::filesystem::path& out_dir,
                                  const GenerationOptions& options = {});

/// A generated sample read back from disk.
struct LoadedSample {
    Image sharp;
    InverseDepthMap inv_depth;
    DpPair pair;
    CameraConfig camera;
};

LoadedSample load_sample(const std::filesystem::path& sample_dir);

std::string sample_dir_name(std::size_t index);

}  // namespace dpsim
