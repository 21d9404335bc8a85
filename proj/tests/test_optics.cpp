#include <doctest.h>

#include <cmath>
#include <random>

#include "dpsim/errors.hpp"
#include "dpsim/optics.hpp"
#include "test_support.hpp"

using namespace dpsim;
using dpsim::testing::example_camera;

TEST_CASE("virtual depth: thin-lens values") {
    const CameraConfig cfg = example_camera();
    CHECK(virtual_depth(200.0, cfg) == doctest::Approx(200.0));  // d = 2f is a fixed point
    CHECK(virtual_depth(420.0, cfg) == doctest::Approx(131.25).epsilon(1e-15));
    CHECK(virtual_depth(2100.0, cfg) == doctest::Approx(105.0).epsilon(1e-15));
    // Tends to f from above as d grows.
    CHECK(virtual_depth(1e12, cfg) == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(virtual_depth(1e6, cfg) > 100.0);

    for (double f : {1.0, 37.5, 5000.0}) {
        const CameraConfig c(f, 2 * f, 10.0);
        CHECK(virtual_depth(2 * f, c) == doctest::Approx(2 * f));
    }
}

TEST_CASE("virtual depth: domain errors") {
    const CameraConfig cfg = example_camera();
    CHECK_THROWS_AS(virtual_depth(100.0, cfg), DomainError);
    CHECK_THROWS_AS(virtual_depth(50.0, cfg), DomainError);
    CHECK_THROWS_AS(virtual_depth(-1.0, cfg), DomainError);
    CHECK_THROWS_AS(virtual_depth(std::nan(""), cfg), DomainError);
    CHECK_THROWS_AS(virtual_depth(INFINITY, cfg), DomainError);
}

TEST_CASE("camera config validation") {
    CHECK_THROWS_AS(CameraConfig(0.0, 105.0, 20.0), DomainError);
    CHECK_THROWS_AS(CameraConfig(100.0, -1.0, 20.0), DomainError);
    CHECK_THROWS_AS(CameraConfig(NAN, 105.0, 20.0), DomainError);
    CHECK_THROWS_AS(CameraConfig(100.0, 105.0, 0.0), DomainError);
    CHECK_THROWS_AS(CameraConfig(100.0, 105.0, ApertureRect{0, 0, -1, 1}, ApertureRect{0, 1, -1, 1}),
                    DomainError);

    const CameraConfig cfg = example_camera();
    CHECK(cfg.aperture_left().y_min == -10.0);
    CHECK(cfg.aperture_left().y_max == 0.0);
    CHECK(cfg.aperture_right().y_min == 0.0);
    CHECK(cfg.aperture_right().y_max == 10.0);
    CHECK(cfg.aperture_left().z_min == -10.0);
    CHECK(cfg.aperture_right().z_max == 10.0);
    CHECK(cfg.magnification_normalized());
    CHECK(cfg.in_focus_depth() == doctest::Approx(2100.0));

    CHECK_THROWS_AS(CameraConfig(100.0, 90.0, 20.0).in_focus_depth(), DomainError);

    const CameraConfig focused = CameraConfig::focused_at(100.0, 2100.0, 20.0);
    CHECK(focused.sensor_distance() == doctest::Approx(105.0));
}

TEST_CASE("scatter point") {
    const CameraConfig cfg = example_camera();
    SUBCASE("in focus: corner independent") {
        const CameraConfig raw(100.0, 105.0, 20.0, false);
        for (Vec2 corner : {Vec2{-10, -10}, Vec2{0, 10}, Vec2{10, 3}}) {
            const Vec2 p = scatter_point({3.0, -7.0}, 2100.0, corner, raw);
            CHECK(p.y == doctest::Approx(105.0 * 3.0 / 100.0));
            CHECK(p.z == doctest::Approx(105.0 * -7.0 / 100.0));
            const Vec2 q = scatter_point({3.0, -7.0}, 2100.0, corner, cfg);
            CHECK(q.y == doctest::Approx(3.0).epsilon(1e-12));
            CHECK(q.z == doctest::Approx(-7.0).epsilon(1e-12));
        }
    }
    SUBCASE("defocused example") {
        const Vec2 l = scatter_point({0, 0}, 420.0, {-5, 0}, cfg);
        const Vec2 r = scatter_point({0, 0}, 420.0, {5, 0}, cfg);
        CHECK(l.y == doctest::Approx(-0.952381).epsilon(1e-6));
        CHECK(l.z == 0.0);
        CHECK(r.y == doctest::Approx(0.952381).epsilon(1e-6));
    }
    SUBCASE("unnormalized mapping is the raw thin-lens form") {
        const CameraConfig raw(100.0, 105.0, 20.0, false);
        const Vec2 p = scatter_point({10, 20}, 420.0, {-5, 2}, raw);
        CHECK(p.y == doctest::Approx(0.2 * -5 + 105.0 * 0.1));
        CHECK(p.z == doctest::Approx(0.2 * 2 + 105.0 * 0.2));
    }
}

TEST_CASE("blur region") {
    const CameraConfig cfg = example_camera();
    SUBCASE("in focus is a point") {
        const BlurRegion r = blur_region({4, 5}, 2100.0, View::Left, cfg);
        CHECK(r.width() < 1e-12);
        CHECK(r.height() < 1e-12);
        CHECK(r.area == 1.0);
        CHECK(r.center().y == doctest::Approx(4.0));
        CHECK(r.center().z == doctest::Approx(5.0));
    }
    SUBCASE("defocused example extents") {
        const BlurRegion r = blur_region({0, 0}, 420.0, View::Left, cfg);
        const double k = 0.2 * 100.0 / 105.0;  // 0.190476
        CHECK(r.scale == doctest::Approx(0.2));
        CHECK(r.width() == doctest::Approx(10 * k));
        CHECK(r.height() == doctest::Approx(20 * k));
        CHECK(r.center().y == doctest::Approx(-5 * k));
        CHECK(r.center().z == doctest::Approx(0.0));
        CHECK(r.area == doctest::Approx(200 * k * k));
    }
    SUBCASE("negative scale stays ordered") {
        const BlurRegion r = blur_region({0, 0}, 1e6, View::Left, cfg);
        CHECK(r.scale < 0.0);
        CHECK(r.y_min <= r.y_max);
        CHECK(r.z_min <= r.z_max);
        CHECK(r.center().y > 0.0);  // left footprint flips to the right beyond focus
    }
    CHECK_THROWS_AS(blur_region({0, 0}, 99.0, View::Right, cfg), DomainError);
}

TEST_CASE("disparity examples") {
    const CameraConfig cfg = example_camera();
    CHECK(disparity_for_depth(2100.0, cfg) == doctest::Approx(0.0).scale(1e-12));
    CHECK(disparity_for_depth(420.0, cfg) == doctest::Approx(-1.9047619).epsilon(1e-7));
    // d -> inf approaches k (f-F)/f (cL - cR) = (100/105)(-0.05)(-10).
    const double asymptote = (100.0 / 105.0) * 0.5;
    CHECK(disparity_for_depth(1e13, cfg) == doctest::Approx(asymptote).epsilon(1e-9));
    CHECK(attainable_disparity(cfg).at_infinity == doctest::Approx(asymptote));

    CHECK(depth_for_disparity(0.0, cfg) == doctest::Approx(2100.0).epsilon(1e-12));
    CHECK(depth_for_disparity(-1.9047619047619047, cfg) == doctest::Approx(420.0).epsilon(1e-9));
    CHECK(std::abs(depth_for_disparity(-1.9048, cfg) - 420.0) < 0.01);
    CHECK_THROWS_AS(depth_for_disparity(asymptote + 0.01, cfg), RangeError);
    CHECK_THROWS_AS(depth_for_disparity(-9.6, cfg), RangeError);
    CHECK_THROWS_AS(depth_for_disparity(NAN, cfg), RangeError);

    // Apertures with equal Y centroids produce no disparity at all.
    const CameraConfig stacked(100.0, 105.0, ApertureRect{-5, 5, -10, 0}, ApertureRect{-5, 5, 0, 10});
    CHECK(disparity_for_depth(420.0, stacked) == 0.0);
    CHECK_THROWS_AS(depth_for_disparity(0.0, stacked), RangeError);
}

TEST_CASE("property: depth/disparity round trip over random configs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const double f = 10.0 + 2000.0 * u(rng);
        const double F = f * (1.0 + 0.2 * u(rng));
        const CameraConfig cfg(f, F, 1.0 + 100.0 * u(rng), u(rng) < 0.7);
        const double d = f * std::exp(0.001 + 8.0 * u(rng));  // (f, ~3000 f)
        const double back = depth_for_disparity(disparity_for_depth(d, cfg), cfg);
        REQUIRE(std::abs(back - d) / d < 1e-9);
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("property: disparity strictly monotone and changes sign at focus") {
    const CameraConfig cfg = example_camera();
    double prev = disparity_for_depth(100.0001, cfg);
    for (double d = 101.0; d < 1e6; d *= 1.01) {
        const double cur = disparity_for_depth(d, cfg);
        REQUIRE(cur > prev);
        prev = cur;
    }
    const double focus = cfg.in_focus_depth();
    CHECK(disparity_for_depth(focus * (1 - 1e-6), cfg) < 0.0);
    CHECK(disparity_for_depth(focus * (1 + 1e-6), cfg) > 0.0);
}

TEST_CASE("property: left/right footprints are translates, scaled copies of the aperture") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const bool normalized = i % 2 == 0;
        const CameraConfig cfg(100.0, 100.0 + 20.0 * u(rng), 5.0 + 40.0 * u(rng), normalized);
        const double d = 100.0 * std::exp(0.01 + 5.0 * u(rng));
        const Vec2 p{200.0 * (u(rng) - 0.5), 200.0 * (u(rng) - 0.5)};
        const BlurRegion l = blur_region(p, d, View::Left, cfg);
        const BlurRegion r = blur_region(p, d, View::Right, cfg);
        const double k = cfg.sensor_scale();
        const double s = footprint_scale(d, cfg);
        CHECK(l.width() == doctest::Approx(r.width()));
        CHECK(l.height() == doctest::Approx(r.height()));
        CHECK(l.width() == doctest::Approx(std::abs(s) * k * cfg.aperture_left().width()));
        CHECK(l.height() == doctest::Approx(std::abs(s) * k * cfg.aperture_left().height()));
        const double shift = l.center().y - r.center().y;
        CHECK(shift == doctest::Approx(disparity_for_depth(d, cfg)).scale(1.0));
        CHECK(l.center().z == doctest::Approx(r.center().z));
    }
}
