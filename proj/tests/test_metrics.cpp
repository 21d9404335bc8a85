#include <doctest.h>

#include <cmath>
#include <random>

#include "dpsim/errors.hpp"
#include "dpsim/metrics.hpp"
#include "test_support.hpp"

using namespace dpsim;
using namespace dpsim::testing;

namespace {

DepthMap row_map(const std::vector<double>& v) {
    DepthMap m(1, static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) m.values.at(0, static_cast<int>(i)) = v[i];
    return m;
}

DepthMap random_map(int n, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    DepthMap m(1, n);
    for (double& v : m.values.values()) v = u(rng);
    return m;
}

template <class F>
DepthMap map_values(const DepthMap& src, F f) {
    DepthMap out = src;
    for (double& v : out.values.values()) v = f(v);
    return out;
}

}  // namespace

TEST_CASE("depth metrics: four-pixel toy case") {
    const DepthMetricReport r = depth_metrics(row_map({1, 2, 4, 16}), row_map({1, 2, 4, 8}));
    CHECK(r.count == 4);
    CHECK(r.abs_rel == 0.25);
    CHECK(r.sq_rel == 2.0);
    CHECK(r.rmse == 4.0);
    CHECK(r.rmse_log == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-15));
    CHECK(r.delta1 == 0.75);
    CHECK(r.delta2 == 0.75);
    CHECK(r.delta3 == 0.75);
}

TEST_CASE("depth metrics: identity and inlier boundary") {
    const DepthMap gt = random_map(200, 1.0, 10.0, 1);
    const DepthMetricReport same = depth_metrics(gt, gt);
    CHECK(same.abs_rel == 0.0);
    CHECK(same.rmse == 0.0);
    CHECK(same.rmse_log == 0.0);
    CHECK(same.delta1 == 1.0);
    REQUIRE(same.ai1.has_value());
    CHECK(*same.ai1 == doctest::Approx(0.0).scale(1.0));
    CHECK(*same.spearman_term == doctest::Approx(0.0).scale(1.0));

    const DepthMetricReport scaled = depth_metrics(row_map({1.25, 2.5, 5.0}), row_map({1, 2, 4}));
    CHECK(scaled.delta1 == 0.0);
    CHECK(scaled.delta2 == 1.0);
    CHECK(scaled.delta3 == 1.0);
    CHECK(scaled.abs_rel == doctest::Approx(0.25));

    // Symmetric in pred and gt.
    const DepthMap pred = random_map(200, 1.0, 10.0, 2);
    const auto ab = depth_metrics(pred, gt);
    const auto ba = depth_metrics(gt, pred);
    CHECK(ab.delta1 == ba.delta1);
    CHECK(ab.delta2 == ba.delta2);
    CHECK(ab.delta1 <= ab.delta2);
    CHECK(ab.delta2 <= ab.delta3);
}

TEST_CASE("depth metrics: masking and errors") {
    DepthMap gt = row_map({1, 2, 0, 8});  // zero gt is excluded
    DepthMap pred = row_map({1, 2, 99, 16});
    CHECK(depth_metrics(pred, gt).count == 3);
    gt.valid.at(0, 3) = 0;
    CHECK(depth_metrics(pred, gt).count == 2);
    Mask mask(1, 4, 1, 0);
    mask.at(0, 1) = 1;
    const auto r = depth_metrics(pred, gt, &mask);
    CHECK(r.count == 1);
    CHECK(!r.ai1.has_value());

    Mask none(1, 4, 1, 0);
    CHECK_THROWS_AS(depth_metrics(pred, gt, &none), EmptyMaskError);
    CHECK_THROWS_AS(depth_metrics(row_map({1, -2, 3, 4}), row_map({1, 2, 3, 4})), DomainError);
    CHECK_THROWS_AS(depth_metrics(row_map({1, 2}), row_map({1, 2, 3})), ShapeError);
}

TEST_CASE("affine-invariant errors") {
    const DepthMap gt = random_map(500, 1.0, 5.0, 3);
    const auto exact = affine_invariant_metrics(map_values(gt, [](double g) { return 3 * g - 7; }), gt);
    CHECK(exact.ai1 < 1e-10);
    CHECK(exact.ai2 < 1e-10);
    CHECK(exact.scale == doctest::Approx(1.0 / 3.0));
    CHECK(exact.offset == doctest::Approx(7.0 / 3.0));

    const auto flipped = affine_invariant_metrics(map_values(gt, [](double g) { return -0.5 * g + 2; }), gt);
    CHECK(flipped.ai2 < 1e-10);

    // Invariance under reparameterisation of a noisy prediction.
    const DepthMap noisy = random_map(500, 1.0, 5.0, 4);
    const auto base = affine_invariant_metrics(noisy, gt);
    const auto moved = affine_invariant_metrics(map_values(noisy, [](double p) { return -4 * p + 11; }), gt);
    CHECK(std::abs(base.ai1 - moved.ai1) < 1e-10);
    CHECK(std::abs(base.ai2 - moved.ai2) < 1e-10);
    CHECK(base.ai1 <= base.ai2);

    CHECK_THROWS_AS(affine_invariant_metrics(DepthMap(1, 500, 2.0), gt), DegenerateFitError);
    CHECK_THROWS_AS(affine_invariant_metrics(gt, DepthMap(1, 500, 2.0)), DegenerateFitError);
}

TEST_CASE("affine-invariant errors: Monte-Carlo noise level") {
    // gt ~ U[1, 2], pred = gt + N(0, 0.1). Regressing gt on the noisy pred
    // leaves residual std sigma_g * sigma_n / sqrt(sigma_g^2 + sigma_n^2).
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(1.0, 2.0);
    std::normal_distribution<double> noise(0.0, 0.1);
    DepthMap gt(1, 20000), pred(1, 20000);
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < 20000; ++i) {
        gt.values.at(0, i) = u(rng);
        pred.values.at(0, i) = gt.values.at(0, i) + noise(rng);
        lo = std::min(lo, gt.values.at(0, i));
        hi = std::max(hi, gt.values.at(0, i));
    }
    const double var_g = 1.0 / 12.0, var_n = 0.01;
    const double expected = std::sqrt(var_g * var_n / (var_g + var_n)) / (hi - lo);
    const auto r = affine_invariant_metrics(pred, gt);
    CHECK(r.ai2 == doctest::Approx(expected).epsilon(0.03));
    CHECK(r.ai2 == doctest::Approx(0.1).epsilon(0.1));
    CHECK(r.ai1 == doctest::Approx(expected * std::sqrt(2.0 / M_PI)).epsilon(0.03));
}

TEST_CASE("spearman term") {
    const DepthMap gt = random_map(1000, 1.0, 50.0, 6);
    CHECK(spearman_term(map_values(gt, [](double g) { return std::exp(0.1 * g); }), gt) < 1e-12);
    CHECK(spearman_term(map_values(gt, [](double g) { return -g; }), gt) < 1e-12);
    CHECK(spearman_term(gt, map_values(gt, [](double g) { return std::log(g); })) < 1e-12);

    const double indep = spearman_term(random_map(10000, 0.0, 1.0, 7), random_map(10000, 0.0, 1.0, 8));
    CHECK(indep == doctest::Approx(1.0).epsilon(0.05));
    CHECK(indep <= 1.0);

    // Ties get average ranks: [1,1,2] vs [1,2,3] -> rho = sqrt(3)/2.
    CHECK(spearman_term(row_map({1, 1, 2}), row_map({1, 2, 3})) == doctest::Approx(1 - std::sqrt(3.0) / 2));
    CHECK_THROWS_AS(spearman_term(DepthMap(1, 5, 1.0), row_map({1, 2, 3, 4, 5})), DegenerateFitError);
}

TEST_CASE("image metrics: psnr and rmse_rel") {
    const Image gt = random_image(16, 16, 3, 9);
    const ImageMetricReport same = image_metrics(gt, gt);
    CHECK(same.psnr == kPsnrCap);
    CHECK(same.ssim == doctest::Approx(1.0));
    CHECK(same.rmse_rel == 0.0);

    Image off = gt;
    for (double& v : off.values()) v += 0.1;
    const ImageMetricReport r = image_metrics(off, gt);
    CHECK(r.psnr == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(r.rmse_rel == doctest::Approx(10.0).epsilon(1e-12));

    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        const ImageMetricReport q = image_metrics(random_image(16, 16, 3, seed), gt);
        CHECK(std::abs(q.psnr - 20.0 * std::log10(100.0 / q.rmse_rel)) < 1e-9);
    }
}

TEST_CASE("ssim matches the windowed reference") {
    Image board(24, 24, 1), inverse(24, 24, 1);
    for (int r = 0; r < 24; ++r)
        for (int c = 0; c < 24; ++c) {
            board.at(r, c) = (r + c) % 2;
            inverse.at(r, c) = 1 - board.at(r, c);
        }
    const double s = ssim(board, inverse);
    CHECK(s == doctest::Approx(naive_ssim(board, inverse)).epsilon(1e-12));
    CHECK(s < -0.99);

    const Image a = random_image(20, 23, 3, 16);
    const Image b = random_image(20, 23, 3, 17);
    CHECK(ssim(a, b) == doctest::Approx(naive_ssim(a, b)).epsilon(1e-10));
    CHECK_THROWS_AS(ssim(Image(10, 20, 1), Image(10, 20, 1)), ShapeError);
}
