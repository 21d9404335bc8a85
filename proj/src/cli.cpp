#include "dpsim/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpsim/camera_json.hpp"
#include "dpsim/dataset.hpp"
#include "dpsim/errors.hpp"
#include "dpsim/estimator.hpp"
#include "dpsim/image_io.hpp"
#include "dpsim/losses.hpp"
#include "dpsim/metrics.hpp"
#include "dpsim/optics.hpp"
#include "dpsim/parallel.hpp"
#include "dpsim/simulator.hpp"

namespace dpsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Raised for argument combinations CLI11 cannot express; maps to exit 2.
class UsageError : public Error {
public:
    using Error::Error;
};

struct GlobalOptions {
    std::string config;
    int workers = 0;
    int verbosity = 0;
    std::optional<std::uint64_t> seed;
};

struct Context {
    GlobalOptions global;
    std::ostream& out;
    std::ostream& err;

    CameraConfig camera() const {
        std::vector<std::string> notices;
        CameraConfig cfg = default_camera();
        if (global.config.empty()) {
            err << "notice: no --config given, using default camera f=" << cfg.focal_length()
                << " F=" << cfg.sensor_distance() << " aperture=20 (square, split at Y=0)"
                << " magnification_normalized=true\n";
        } else {
            cfg = load_camera(global.config, &notices);
        }
        for (const auto& n : notices) {
            err << "notice: " << n << '\n';
        }
        return cfg;
    }
};

std::string fmt(double v, int precision = 10) {
    if (v == 0.0) v = 0.0;  // no "-0"
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

bool is_pfm(const fs::path& p) { return p.extension() == ".pfm" || p.extension() == ".PFM"; }

Image read_image(const fs::path& path) {
    return is_pfm(path) ? read_pfm(path) : read_png_normalized(path);
}

void write_image(const fs::path& path, const Image& img, const std::string& format) {
    if (format == "pfm") {
        write_pfm(path, img);
    } else {
        write_png(path, img, format == "png8" ? 8 : 16);
    }
}

std::string image_extension(const std::string& format) { return format == "pfm" ? ".pfm" : ".png"; }

void write_mask(const fs::path& path, const Mask& mask) {
    Image img(mask.rows(), mask.cols());
    for (std::size_t i = 0; i < mask.size(); ++i) img.values()[i] = mask.values()[i] ? 1.0 : 0.0;
    write_png(path, img, 8);
}

void write_depth(const fs::path& path, const DepthMap& depth) {
    Image img = depth.values;
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (depth.valid.values()[i] == 0) img.values()[i] = 0.0;
    }
    write_pfm(path, img);
}

void print_depth_report(std::ostream& out, const DepthMetricReport& rep) {
    const auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("nan"); };
    out << "count=" << rep.count << '\n'
        << "abs_rel=" << fmt(rep.abs_rel) << '\n'
        << "sq_rel=" << fmt(rep.sq_rel) << '\n'
        << "rmse=" << fmt(rep.rmse) << '\n'
        << "rmse_log=" << fmt(rep.rmse_log) << '\n'
        << "delta1=" << fmt(rep.delta1) << '\n'
        << "delta2=" << fmt(rep.delta2) << '\n'
        << "delta3=" << fmt(rep.delta3) << '\n'
        << "ai1=" << opt(rep.ai1) << '\n'
        << "ai2=" << opt(rep.ai2) << '\n'
        << "spearman_term=" << opt(rep.spearman_term) << '\n';
}

json depth_report_json(const DepthMetricReport& rep) {
    json j{{"count", rep.count},       {"abs_rel", rep.abs_rel}, {"sq_rel", rep.sq_rel},
           {"rmse", rep.rmse},         {"rmse_log", rep.rmse_log}, {"delta1", rep.delta1},
           {"delta2", rep.delta2},     {"delta3", rep.delta3}};
    j["ai1"] = rep.ai1 ? json(*rep.ai1) : json(nullptr);
    j["ai2"] = rep.ai2 ? json(*rep.ai2) : json(nullptr);
    j["spearman_term"] = rep.spearman_term ? json(*rep.spearman_term) : json(nullptr);
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    f << j.dump(2) << '\n';
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
    std::string rgb, depth, out;
    double depth_scale = 1.0;
    bool brute = false;
    std::string format = "png16";
};

int cmd_simulate(const Context& ctx, const SimulateArgs& a) {
    const CameraConfig cfg = ctx.camera();
    const RgbdImage scene = load_rgbd(a.rgb, a.depth, a.depth_scale);
    const SimulationResult sim = a.brute ? simulate_brute(scene, cfg) : simulate_fast(scene, cfg);
    const std::string ext = image_extension(a.format);
    const fs::path left = a.out + "_left" + ext;
    const fs::path right = a.out + "_right" + ext;
    write_image(left, sim.pair.left, a.format);
    write_image(right, sim.pair.right, a.format);

    double clip_l = 0.0, clip_r = 0.0, neg = 0.0;
    for (double v : sim.left_stats.clipped_energy) clip_l += v;
    for (double v : sim.right_stats.clipped_energy) clip_r += v;
    for (double v : sim.left_stats.negative_clamped) neg += v;
    for (double v : sim.right_stats.negative_clamped) neg += v;
    const std::size_t total = scene.intensity.pixel_count();
    ctx.out << "wrote " << left.string() << " " << right.string() << '\n';
    ctx.out << "clipped_energy_left=" << fmt(clip_l) << '\n'
            << "clipped_energy_right=" << fmt(clip_r) << '\n'
            << "coverage=" << sim.scattered_pixels << "/" << total << '\n'
            << "negative_clamped=" << fmt(neg) << '\n';
    ctx.out << "summary: cmd=simulate status=ok path=" << (a.brute ? "brute" : "fast")
            << " rows=" << scene.rows() << " cols=" << scene.cols()
            << " coverage=" << fmt(static_cast<double>(sim.scattered_pixels) / total)
            << " clipped=" << fmt(clip_l + clip_r) << '\n';
    return kExitOk;
}

// ---- dataset-gen ----------------------------------------------------------

struct DatasetArgs {
    std::string manifest, out;
    bool export_8bit = false;
};

int cmd_dataset_gen(const Context& ctx, const DatasetArgs& a) {
    DatasetManifest manifest = load_manifest(a.manifest);
    if (ctx.global.seed) {
        manifest.seed = *ctx.global.seed;
    }
    const GenerationReport rep = generate_dataset(manifest, a.out, {a.export_8bit});
    for (const auto& e : rep.entries) {
        if (!e.ok) {
            ctx.err << "warning: entry " << e.index << " failed: " << e.error << '\n';
        }
    }
    ctx.out << "summary: cmd=dataset-gen status=ok samples=" << rep.successes
            << " failures=" << rep.failures << " warnings=" << rep.failures
            << " clipped=" << fmt(rep.total_clipped) << '\n';
    return kExitOk;
}

// ---- depth ----------------------------------------------------------------

struct DepthArgs {
    std::string left, right, sharp, out, mode = "sweep", gt;
    double gt_scale = 1.0;
    bool gt_inverse = false;
    double near = 0.0, far = 0.0;
    int hypotheses = 64;
    int window = 2;
    int max_disparity = 4;
    int block = 7;
    bool no_subpixel = false;
    double texture_threshold = kDefaultTextureThreshold;
};

int cmd_depth(const Context& ctx, const DepthArgs& a) {
    if (a.mode == "sweep" && a.sharp.empty()) {
        throw UsageError("depth --mode sweep requires --sharp");
    }
    const CameraConfig cfg = ctx.camera();
    DpPair pair{read_image(a.left), read_image(a.right)};
    DepthMap depth;
    if (a.mode == "sweep") {
        double near = a.near;
        double far = a.far;
        if (near <= 0.0) {
            near = 2.0 * cfg.focal_length();
            ctx.err << "notice: --near not set, using 2f = " << fmt(near) << '\n';
        }
        if (far <= 0.0) {
            far = cfg.sensor_distance() > cfg.focal_length() ? 10.0 * cfg.in_focus_depth()
                                                              : 100.0 * cfg.focal_length();
            ctx.err << "notice: --far not set, using " << fmt(far) << '\n';
        }
        SweepConfig sc = SweepConfig::uniform_inverse_depth(near, far, a.hypotheses, a.window);
        sc.texture_threshold = a.texture_threshold;
        const Image sharp = read_image(a.sharp);
        depth = sweep_depth(sharp, pair, cfg, sc).depth;
    } else {
        MatchConfig mc;
        mc.max_disparity = a.max_disparity;
        mc.block = a.block;
        mc.subpixel = !a.no_subpixel;
        mc.texture_threshold = a.texture_threshold;
        const DisparityMap disp = block_match(pair, mc);
        write_depth(a.out + "_disparity.pfm", disp);
        depth = disparity_to_depth_map(disp, cfg);
    }
    write_depth(a.out + ".pfm", depth);
    write_mask(a.out + "_mask.png", depth.valid);
    const std::size_t valid = depth.valid_count();
    ctx.out << "wrote " << a.out << ".pfm " << a.out << "_mask.png\n";
    std::ostringstream summary;
    summary << "summary: cmd=depth status=ok mode=" << a.mode << " valid=" << valid;
    if (!a.gt.empty()) {
        DepthMap gt = load_depth_map(a.gt, a.gt_scale);
        if (a.gt_inverse) gt = invert_depth(gt);
        const DepthMetricReport rep = depth_metrics(depth, gt);
        print_depth_report(ctx.out, rep);
        summary << " abs_rel=" << fmt(rep.abs_rel) << " rmse=" << fmt(rep.rmse)
                << " delta1=" << fmt(rep.delta1);
    }
    ctx.out << summary.str() << '\n';
    return kExitOk;
}

// ---- loss -----------------------------------------------------------------

struct LossArgs {
    std::string sharp, inv_depth, left, right, gt_sharp, gt_inv_depth, json_out;
    std::string reblur_with = "pred";
};

int cmd_loss(const Context& ctx, const LossArgs& a) {
    const CameraConfig cfg = ctx.camera();
    const Image sharp = read_image(a.sharp);
    const InverseDepthMap inv = load_depth_map(a.inv_depth, 1.0);
    const DpPair observed{read_image(a.left), read_image(a.right)};
    std::optional<Image> gt_sharp;
    std::optional<InverseDepthMap> gt_inv;
    if (!a.gt_sharp.empty()) gt_sharp = read_image(a.gt_sharp);
    if (!a.gt_inv_depth.empty()) gt_inv = load_depth_map(a.gt_inv_depth, 1.0);
    if (a.reblur_with == "gt" && (!gt_sharp || !gt_inv)) {
        throw UsageError("--reblur-with gt requires --gt-sharp and --gt-inv-depth");
    }

    LossInputs in;
    in.observed = &observed;
    if (gt_sharp) {
        in.pred_sharp = &sharp;
        in.target_sharp = &*gt_sharp;
    }
    if (gt_inv) {
        in.pred_inv_depth = &inv;
        in.target_inv_depth = &*gt_inv;
    }
    const bool use_gt = a.reblur_with == "gt";
    in.reblur_sharp = use_gt ? &*gt_sharp : &sharp;
    in.reblur_inv_depth = use_gt ? &*gt_inv : &inv;
    const LossReport rep = combined_loss(in, cfg);

    ctx.out << "restoration=" << fmt(rep.restoration) << '\n'
            << "depth=" << fmt(rep.depth) << '\n'
            << "reblur=" << fmt(rep.reblur) << '\n'
            << "total=" << fmt(rep.total) << '\n';
    if (!a.json_out.empty()) {
        write_json_file(a.json_out, {{"restoration", rep.restoration},
                                     {"depth", rep.depth},
                                     {"reblur", rep.reblur},
                                     {"total", rep.total},
                                     {"reblur_with", a.reblur_with}});
    }
    ctx.out << "summary: cmd=loss status=ok reblur_with=" << a.reblur_with
            << " total=" << fmt(rep.total) << " reblur=" << fmt(rep.reblur) << '\n';
    return kExitOk;
}

// ---- metrics --------------------------------------------------------------

struct MetricsArgs {
    std::string pred, gt, kind = "depth", mask, json_out;
    double pred_scale = 1.0, gt_scale = 1.0;
};

int cmd_metrics(const Context& ctx, const MetricsArgs& a) {
    if (a.kind == "image") {
        const ImageMetricReport rep = image_metrics(read_image(a.pred), read_image(a.gt));
        ctx.out << "psnr=" << fmt(rep.psnr) << '\n'
                << "ssim=" << fmt(rep.ssim) << '\n'
                << "rmse_rel=" << fmt(rep.rmse_rel) << '\n';
        if (!a.json_out.empty()) {
            write_json_file(a.json_out,
                            {{"psnr", rep.psnr}, {"ssim", rep.ssim}, {"rmse_rel", rep.rmse_rel}});
        }
        ctx.out << "summary: cmd=metrics status=ok kind=image psnr=" << fmt(rep.psnr)
                << " ssim=" << fmt(rep.ssim) << " rmse_rel=" << fmt(rep.rmse_rel) << '\n';
        return kExitOk;
    }
    const DepthMap pred = load_depth_map(a.pred, a.pred_scale);
    const DepthMap gt = load_depth_map(a.gt, a.gt_scale);
    std::optional<Mask> mask;
    if (!a.mask.empty()) {
        const Image m = read_png_normalized(a.mask);
        mask = Mask(m.rows(), m.cols());
        for (std::size_t i = 0; i < m.size(); ++i) mask->values()[i] = m.values()[i] > 0.5;
    }
    const DepthMetricReport rep = depth_metrics(pred, gt, mask ? &*mask : nullptr);
    print_depth_report(ctx.out, rep);
    if (!a.json_out.empty()) {
        write_json_file(a.json_out, depth_report_json(rep));
    }
    ctx.out << "summary: cmd=metrics status=ok kind=depth abs_rel=" << fmt(rep.abs_rel)
            << " rmse=" << fmt(rep.rmse) << " delta1=" << fmt(rep.delta1) << '\n';
    return kExitOk;
}

// ---- psf ------------------------------------------------------------------

int cmd_psf(const Context& ctx, const std::vector<double>& depths) {
    const CameraConfig cfg = ctx.camera();
    std::ostream& out = ctx.out;
    constexpr int kCol = 15;
    const auto cell = [&](double v) { out << std::setw(kCol) << fmt(v, 8); };
    out << std::left;
    for (const char* h : {"depth", "virtual", "scale", "width", "height", "area"}) {
        out << std::setw(kCol) << h;
    }
    out << "disparity\n";
    std::size_t invalid = 0;
    for (double d : depths) {
        try {
            const double dv = virtual_depth(d, cfg);
            const BlurRegion r = blur_region({0.0, 0.0}, d, View::Left, cfg);
            const double disp = disparity_for_depth(d, cfg);
            cell(d);
            cell(dv);
            cell(r.scale);
            cell(r.width());
            cell(r.height());
            cell(r.area);
            out << fmt(disp, 8) << '\n';
        } catch (const DomainError& e) {
            ++invalid;
            cell(d);
            out << "invalid: " << e.what() << '\n';
        }
    }
    out << "summary: cmd=psf status=ok rows=" << depths.size() << " invalid=" << invalid;
    if (cfg.sensor_distance() > cfg.focal_length()) {
        out << " in_focus_depth=" << fmt(cfg.in_focus_depth());
    }
    out << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dual-pixel camera simulation and depth estimation toolkit", "dpsim"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("-c,--config", global.config, "Camera config JSON (pixel units)");
    app.add_option("-j,--workers", global.workers,
                   "Worker threads (default: DPSIM_WORKERS or OpenMP default)")
        ->check(CLI::PositiveNumber);
    app.add_flag("-v,--verbose", global.verbosity, "Verbose output");
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Override the dataset seed");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Synthesize a dual-pixel pair from RGB-D");
    simulate->add_option("--rgb", sim.rgb, "RGB/grey PNG")->required();
    simulate->add_option("--depth", sim.depth, "Depth map (16-bit PNG or PFM)")->required();
    simulate->add_option("--depth-scale", sim.depth_scale, "Stored depth to pixel units");
    simulate->add_option("-o,--out", sim.out, "Output prefix")->required();
    simulate->add_flag("--brute", sim.brute, "Use the direct splatting reference path");
    simulate->add_option("--format", sim.format, "Output format")
        ->check(CLI::IsMember({"png16", "png8", "pfm"}));

    DatasetArgs ds;
    auto* dataset = app.add_subcommand("dataset-gen", "Generate a DP dataset from a manifest");
    dataset->add_option("--manifest", ds.manifest, "Manifest JSON")->required();
    dataset->add_option("-o,--out", ds.out, "Output directory")->required();
    dataset->add_flag("--8bit", ds.export_8bit, "Also export 8-bit previews");

    DepthArgs dp;
    auto* depth = app.add_subcommand("depth", "Estimate depth from a DP pair");
    depth->add_option("--left", dp.left)->required();
    depth->add_option("--right", dp.right)->required();
    depth->add_option("--sharp", dp.sharp, "All-in-focus image (sweep mode)");
    depth->add_option("--mode", dp.mode)->check(CLI::IsMember({"sweep", "match"}));
    depth->add_option("-o,--out", dp.out, "Output prefix")->required();
    depth->add_option("--gt", dp.gt, "Ground-truth depth (PNG-16 or PFM)");
    depth->add_option("--gt-scale", dp.gt_scale);
    depth->add_flag("--gt-inverse", dp.gt_inverse, "Ground truth stores inverse depth");
    depth->add_option("--near", dp.near, "Sweep: nearest hypothesis");
    depth->add_option("--far", dp.far, "Sweep: farthest hypothesis");
    depth->add_option("--hypotheses", dp.hypotheses)->check(CLI::Range(2, 4096));
    depth->add_option("--window", dp.window)->check(CLI::NonNegativeNumber);
    depth->add_option("--max-disparity", dp.max_disparity)->check(CLI::PositiveNumber);
    depth->add_option("--block", dp.block);
    depth->add_flag("--no-subpixel", dp.no_subpixel);
    depth->add_option("--texture-threshold", dp.texture_threshold);

    LossArgs ls;
    auto* loss = app.add_subcommand("loss", "Restoration, depth and reblur losses");
    loss->add_option("--sharp", ls.sharp, "Predicted sharp image")->required();
    loss->add_option("--inv-depth", ls.inv_depth, "Predicted inverse depth (PFM)")->required();
    loss->add_option("--left", ls.left)->required();
    loss->add_option("--right", ls.right)->required();
    loss->add_option("--gt-sharp", ls.gt_sharp);
    loss->add_option("--gt-inv-depth", ls.gt_inv_depth);
    loss->add_option("--reblur-with", ls.reblur_with)->check(CLI::IsMember({"pred", "gt"}));
    loss->add_option("--json", ls.json_out, "Also write a JSON report");

    MetricsArgs mt;
    auto* metrics = app.add_subcommand("metrics", "Depth or image quality metrics");
    metrics->add_option("--pred", mt.pred)->required();
    metrics->add_option("--gt", mt.gt)->required();
    metrics->add_option("--kind", mt.kind)->check(CLI::IsMember({"depth", "image"}));
    metrics->add_option("--mask", mt.mask, "8-bit PNG, nonzero = evaluate");
    metrics->add_option("--pred-scale", mt.pred_scale);
    metrics->add_option("--gt-scale", mt.gt_scale);
    metrics->add_option("--json", mt.json_out, "Also write a JSON report");

    std::vector<double> psf_depths;
    auto* psf = app.add_subcommand("psf", "Print blur-region geometry for depths");
    psf->add_option("--depths", psf_depths, "Depths in pixel units")->required()->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (*seed_opt) {
        global.seed = seed;
    }

    Context ctx{global, out, err};
    try {
        int workers = global.workers > 0 ? global.workers : worker_count_from_env();
        if (workers > 0) {
            set_worker_count(workers);
        }
        if (global.verbosity > 0) {
            err << "workers=" << worker_count() << '\n';
        }
        if (*simulate) return cmd_simulate(ctx, sim);
        if (*dataset) return cmd_dataset_gen(ctx, ds);
        if (*depth) return cmd_depth(ctx, dp);
        if (*loss) return cmd_loss(ctx, ls);
        if (*metrics) return cmd_metrics(ctx, mt);
        if (*psf) return cmd_psf(ctx, psf_depths);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace dpsim
