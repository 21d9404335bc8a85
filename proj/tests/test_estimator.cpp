#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpsim/errors.hpp"
#include "dpsim/estimator.hpp"
#include "test_support.hpp"

using namespace dpsim;
using namespace dpsim::testing;

namespace {

std::vector<double> valid_values(const DepthMap& m) {
    std::vector<double> out;
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            if (m.valid.at(r, c) != 0) out.push_back(m.values.at(r, c));
    return out;
}

double median(std::vector<double> v) {
    REQUIRE(!v.empty());
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

Image shift_columns(const Image& src, int shift) {
    Image out(src.rows(), src.cols(), src.channels());
    for (int r = 0; r < src.rows(); ++r)
        for (int c = 0; c < src.cols(); ++c)
            for (int ch = 0; ch < src.channels(); ++ch) {
                const int sc = std::clamp(c - shift, 0, src.cols() - 1);
                out.at(r, c, ch) = src.at(r, sc, ch);
            }
    return out;
}

}  // namespace

TEST_CASE("uniform inverse-depth hypotheses") {
    const SweepConfig sc = SweepConfig::uniform_inverse_depth(200.0, 10000.0, 5);
    REQUIRE(sc.hypotheses.size() == 5);
    CHECK(sc.hypotheses.front() == 200.0);
    CHECK(sc.hypotheses.back() == 10000.0);
    const double step = 1.0 / sc.hypotheses[0] - 1.0 / sc.hypotheses[1];
    for (std::size_t k = 1; k < 5; ++k) {
        CHECK(sc.hypotheses[k] > sc.hypotheses[k - 1]);
        CHECK(1.0 / sc.hypotheses[k - 1] - 1.0 / sc.hypotheses[k] == doctest::Approx(step));
    }
    CHECK_THROWS_AS(SweepConfig::uniform_inverse_depth(200.0, 100.0, 5), DomainError);
    CHECK_THROWS_AS(SweepConfig::uniform_inverse_depth(200.0, 300.0, 1), DomainError);

    const CameraConfig cfg = example_camera();
    SweepConfig bad;
    CHECK_THROWS_AS(bad.validate(cfg), DomainError);
    bad.hypotheses = {300.0, 200.0};
    CHECK_THROWS_AS(bad.validate(cfg), DomainError);
    bad.hypotheses = {90.0, 200.0};
    CHECK_THROWS_AS(bad.validate(cfg), DomainError);
}

TEST_CASE("box_mean and local_variance") {
    Image ones(5, 7, 1, 1.0);
    const Image means = box_mean(ones, 2);
    for (double v : means.values()) CHECK(v == doctest::Approx(1.0));
    const Image src = random_image(9, 11, 1, 3);
    const Image bm = box_mean(src, 1);
    for (int r = 0; r < 9; ++r)
        for (int c = 0; c < 11; ++c) {
            double s = 0.0;
            int n = 0;
            for (int i = std::max(0, r - 1); i <= std::min(8, r + 1); ++i)
                for (int j = std::max(0, c - 1); j <= std::min(10, c + 1); ++j) s += src.at(i, j), ++n;
            CHECK(bm.at(r, c) == doctest::Approx(s / n));
        }
    const Image flat = local_variance(Image(6, 6, 3, 0.4), 2);
    for (double v : flat.values()) CHECK(v == doctest::Approx(0.0));
    CHECK_THROWS_AS(box_mean(Image(3, 3, 2), 1), ShapeError);
}

TEST_CASE("sweep recovers a fronto-parallel depth from the hypothesis set") {
    const CameraConfig cfg = example_camera();
    const SweepConfig sc = SweepConfig::uniform_inverse_depth(150.0, 20000.0, 24);
    const Image sharp = textured_image(48, 48, 3, 1);
    for (std::size_t k : {2u, 9u, 17u}) {
        const double truth = sc.hypotheses[k];
        const SimulationResult obs = simulate_fast(constant_depth_scene(sharp, truth), cfg);
        const SweepResult res = sweep_depth(sharp, obs.pair, cfg, sc);
        const auto vals = valid_values(res.depth);
        CHECK(vals.size() > 48u * 48u * 9 / 10);
        for (double v : vals) REQUIRE(v == truth);
        CHECK(res.best_residual.at(24, 24) == doctest::Approx(0.0).scale(1.0));
        CHECK(res.second_residual.at(24, 24) > res.best_residual.at(24, 24));
    }
}

TEST_CASE("sweep: all-in-focus pair selects the in-focus hypothesis") {
    const CameraConfig cfg = example_camera();
    SweepConfig sc;
    sc.hypotheses = {300.0, 900.0, cfg.in_focus_depth(), 5000.0, 50000.0};
    const Image sharp = textured_image(32, 32, 1, 2);
    const SweepResult res = sweep_depth(sharp, DpPair{sharp, sharp}, cfg, sc);
    for (double v : valid_values(res.depth)) REQUIRE(v == cfg.in_focus_depth());
}

TEST_CASE("sweep: textureless pixels are masked") {
    const CameraConfig cfg = example_camera();
    Image sharp = textured_image(32, 32, 1, 3);
    for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 12; ++c) sharp.at(r, c) = 0.5;
    const SimulationResult obs = simulate_fast(constant_depth_scene(sharp, 420.0), cfg);
    const SweepResult res = sweep_depth(sharp, obs.pair, cfg, SweepConfig::uniform_inverse_depth(200, 5000, 8));
    CHECK(res.depth.valid.at(16, 4) == 0);
    CHECK(res.depth.valid.at(16, 24) == 1);
}

TEST_CASE("sweep: two-plane scene is recovered away from the boundary") {
    const CameraConfig cfg = example_camera();
    const SweepConfig sc = SweepConfig::uniform_inverse_depth(150.0, 20000.0, 16);
    const double near = sc.hypotheses[3];
    const double far = sc.hypotheses[12];
    const Image sharp = textured_image(48, 64, 3, 4);
    DepthMap depth(48, 64, near);
    for (int r = 0; r < 48; ++r)
        for (int c = 32; c < 64; ++c) depth.values.at(r, c) = far;
    const SimulationResult obs = simulate_fast({sharp, depth}, cfg);
    const SweepResult res = sweep_depth(sharp, obs.pair, cfg, sc);

    double band = 0.0;
    for (double d : {near, far}) {
        const BlurRegion reg = blur_region({0, 0}, d, View::Left, cfg);
        band = std::max({band, reg.width(), reg.height()});
    }
    const int b = static_cast<int>(std::ceil(band)) + sc.window + 1;
    int wrong = 0;
    for (int r = b; r < 48 - b; ++r)
        for (int c = b; c < 64 - b; ++c) {
            if (std::abs(c - 32) < b || res.depth.valid.at(r, c) == 0) continue;
            wrong += res.depth.values.at(r, c) != depth.values.at(r, c);
        }
    CHECK(wrong == 0);
}

TEST_CASE("block match: integer shift") {
    const Image left = textured_image(40, 60, 1, 5);
    const Image right = shift_columns(left, 2);  // right(x) = left(x - 2)
    const DisparityMap disp = block_match(DpPair{left, right}, MatchConfig{});
    const auto vals = valid_values(disp);
    CHECK(vals.size() > 500u);
    for (int r = 0; r < 40; ++r)
        for (int c = 10; c < 50; ++c)
            if (disp.valid.at(r, c) != 0) REQUIRE(disp.values.at(r, c) == doctest::Approx(-2.0));
}

TEST_CASE("block match: identical views give zero disparity") {
    const Image img = textured_image(30, 30, 3, 6);
    const DisparityMap disp = block_match(DpPair{img, img}, MatchConfig{});
    for (double v : valid_values(disp)) REQUIRE(v == 0.0);
    CHECK(disp.valid.at(0, 0) == 0);  // border
}

TEST_CASE("block match: simulated defocus at d=420") {
    const CameraConfig cfg = example_camera();
    const Image sharp = textured_image(96, 96, 3, 7);
    const SimulationResult obs = simulate_fast(constant_depth_scene(sharp, 420.0), cfg);
    const DisparityMap disp = block_match(obs.pair, MatchConfig{});
    const double med = median(valid_values(disp));
    CHECK(std::abs(med - disparity_for_depth(420.0, cfg)) < 0.3);

    const double depth = depth_for_disparity(med, cfg);
    CHECK(std::abs(depth - 420.0) / 420.0 < 0.05);

    const auto chained = valid_values(disparity_to_depth_map(disp, cfg));
    CHECK(std::abs(median(chained) - 420.0) / 420.0 < 0.05);
}

TEST_CASE("block match: equivariance under a shift of the right view") {
    const Image left = textured_image(40, 60, 1, 8);
    const Image right = shift_columns(left, -1);
    const DisparityMap base = block_match(DpPair{left, right}, MatchConfig{});
    const DisparityMap more = block_match(DpPair{left, shift_columns(right, 2)}, MatchConfig{});
    for (int r = 0; r < 40; ++r)
        for (int c = 12; c < 48; ++c)
            if (base.valid.at(r, c) != 0 && more.valid.at(r, c) != 0)
                REQUIRE(more.values.at(r, c) == doctest::Approx(base.values.at(r, c) - 2.0));
}

TEST_CASE("disparity to depth map") {
    const CameraConfig cfg = example_camera();
    DisparityMap disp(2, 2, 0.0);
    disp.values.at(0, 1) = -1.9047619047619047;
    disp.values.at(1, 0) = 5.0;  // past the far asymptote
    disp.valid.at(1, 1) = 0;
    const DepthMap d = disparity_to_depth_map(disp, cfg);
    CHECK(d.values.at(0, 0) == doctest::Approx(2100.0));
    CHECK(d.values.at(0, 1) == doctest::Approx(420.0));
    CHECK(d.valid.at(1, 0) == 0);
    CHECK(d.valid.at(1, 1) == 0);
}

TEST_CASE("match config validation") {
    MatchConfig mc;
    mc.block = 4;
    CHECK_THROWS_AS(mc.validate(), DomainError);
    mc.block = 5;
    mc.max_disparity = 0;
    CHECK_THROWS_AS(mc.validate(), DomainError);
}
