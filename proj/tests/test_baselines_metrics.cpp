#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "uwcc/baselines.hpp"
#include "uwcc/metrics.hpp"

using namespace uwcc;

TEST_CASE("gray world equalizes the channel means") {
    LinearImage img = LinearImage::create(4, 1);
    for (int x = 0; x < 4; ++x) img.set_pixel(x, 0, {0.2, 0.4, 0.6});
    LinearImage out = gray_world(img);
    // gains (2, 1, 2/3); all pre-clamp means become 0.4, and no clamp fires here
    for (int x = 0; x < 4; ++x) {
        CHECK_THAT(out.at(x, 0, 0), Catch::Matchers::WithinAbs(0.4, 1e-12));
        CHECK_THAT(out.at(x, 0, 1), Catch::Matchers::WithinAbs(0.4, 1e-12));
        CHECK_THAT(out.at(x, 0, 2), Catch::Matchers::WithinAbs(0.4, 1e-12));
    }
}

TEST_CASE("gray world leaves an already-gray image unchanged") {
    LinearImage img = LinearImage::create(3, 3);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.1, 0.9);
    // different pixel values but identical per-channel means
    for (int i = 0; i < 9; ++i) {
        double v = u(rng);
        img.set_pixel(i % 3, i / 3, {v, v, v});
    }
    LinearImage out = gray_world(img);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        CHECK_THAT(out.pixels[i], Catch::Matchers::WithinAbs(img.pixels[i], 1e-12));
}

TEST_CASE("gray world is idempotent where no clamp fires") {
    LinearImage img = LinearImage::create(5, 4);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.1, 0.5);
    for (double& p : img.pixels) p = u(rng);
    LinearImage once = gray_world(img);
    bool clamped = false;
    for (double p : once.pixels) clamped = clamped || p >= 1.0 || p <= 0.0;
    REQUIRE_FALSE(clamped);
    LinearImage twice = gray_world(once);
    for (std::size_t i = 0; i < once.pixels.size(); ++i)
        CHECK_THAT(twice.pixels[i], Catch::Matchers::WithinAbs(once.pixels[i], 1e-12));
}

TEST_CASE("gray world rejects a dead channel and empty input") {
    LinearImage img = LinearImage::create(2, 2, {0.0, 0.5, 0.5});
    CHECK_THROWS_AS(gray_world(img), numeric_error);
    CHECK_THROWS_AS(gray_world(LinearImage{}), validation_error);
}

TEST_CASE("single-coefficient corrector round-trips its own forward model") {
    LinearImage img = LinearImage::create(6, 4);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.05, 0.8);
    for (double& p : img.pixels) p = u(rng);

    Rgb beta{0.6, 0.45, 0.3};
    AttenuationCoeffs equal;
    equal.beta_d = beta;
    equal.beta_b = beta;
    VeilingLight v;
    v.rgb = {0.3, 0.5, 0.7};
    RangeField z = RangeField::uniform(0.8);

    LinearImage degraded = forward_degrade(img, equal, v, z);
    LinearImage restored = cuifm_correct(degraded, beta, v, z);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        CHECK_THAT(restored.pixels[i], Catch::Matchers::WithinAbs(img.pixels[i], 1e-9));
}

TEST_CASE("single-coefficient correction degrades when the betas truly differ") {
    LinearImage img = LinearImage::create(8, 8);
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(0.05, 0.9);
    for (double& p : img.pixels) p = u(rng);

    AttenuationCoeffs truth;
    truth.beta_d = {0.9, 0.5, 0.35};
    truth.beta_b = {0.45, 0.30, 0.22};
    VeilingLight v;
    v.rgb = {0.25, 0.57, 0.70};
    RangeField z = RangeField::uniform(1.5);
    LinearImage degraded = forward_degrade(img, truth, v, z);

    LinearImage full = invert(degraded, truth, v, z);
    LinearImage single = cuifm_correct(degraded, truth.beta_d, v, z);

    auto rmse = [&](const LinearImage& got) {
        double ss = 0.0;
        for (std::size_t i = 0; i < img.pixels.size(); ++i) {
            double d = got.pixels[i] - img.pixels[i];
            ss += d * d;
        }
        return std::sqrt(ss / static_cast<double>(img.pixels.size()));
    };
    CHECK(rmse(full) < 1e-9);
    CHECK(rmse(single) > 100.0 * rmse(full));
}

TEST_CASE("normalized color distance: worked values") {
    CHECK(normalized_color_distance({0.5, 0.5, 0.5}, {1.0, 1.0, 1.0}) == 0.0);
    CHECK_THAT(normalized_color_distance({1, 0, 0}, {0, 1, 0}),
               Catch::Matchers::WithinAbs(1.414213562373, 1e-9));
    CHECK_THAT(normalized_color_distance({1, 1, 0}, {1, 0, 0}),
               Catch::Matchers::WithinAbs(0.765366864730, 1e-9));
}

TEST_CASE("normalized color distance is exactly scale invariant and symmetric") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.01, 1.0), us(0.125, 8.0);
    for (int i = 0; i < 100; ++i) {
        Rgb o{u(rng), u(rng), u(rng)}, r{u(rng), u(rng), u(rng)};
        double s = us(rng);
        Rgb so{s * o[0], s * o[1], s * o[2]};
        // powers of two keep the scaling exact in floating point
        double pow2 = std::exp2(std::round(std::log2(s)));
        Rgb po{pow2 * o[0], pow2 * o[1], pow2 * o[2]};
        CHECK(normalized_color_distance(po, r) == normalized_color_distance(o, r));
        CHECK_THAT(normalized_color_distance(so, r),
                   Catch::Matchers::WithinAbs(normalized_color_distance(o, r), 1e-12));
        CHECK(normalized_color_distance(o, r) == normalized_color_distance(r, o));
    }
}

TEST_CASE("normalized color distance satisfies the triangle inequality") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int i = 0; i < 200; ++i) {
        Rgb a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)}, c{u(rng), u(rng), u(rng)};
        CHECK(normalized_color_distance(a, c) <=
              normalized_color_distance(a, b) + normalized_color_distance(b, c) + 1e-12);
    }
}

TEST_CASE("zero-norm colors are rejected") {
    CHECK_THROWS_AS(normalized_color_distance({0, 0, 0}, {1, 0, 0}), numeric_error);
    CHECK_THROWS_AS(normalized_color_distance({1, 0, 0}, {0, 0, 0}), numeric_error);
}

TEST_CASE("chromaticity normalization is available and scale invariant") {
    Rgb o{0.2, 0.3, 0.5}, r{0.4, 0.6, 1.0};  // r = 2*o -> distance 0
    CHECK_THAT(normalized_color_distance(o, r, ColorNormalization::chromaticity),
               Catch::Matchers::WithinAbs(0.0, 1e-12));
    // generally differs from the L2 metric
    Rgb a{0.9, 0.1, 0.1}, b{0.1, 0.1, 0.9};
    CHECK(normalized_color_distance(a, b, ColorNormalization::chromaticity) !=
          normalized_color_distance(a, b));
}

TEST_CASE("consistency stats: worked example and invariances") {
    // series {(0,0,0),(0,0,1)}, reference (0,0,0.5)
    ConsistencyReport rep = consistency_stats({{0, 0, 0}, {0, 0, 1}}, {0, 0, 0.5});
    CHECK_THAT(rep.variance, Catch::Matchers::WithinAbs(0.25, 1e-15));
    CHECK_THAT(rep.mean_error, Catch::Matchers::WithinAbs(0.0, 1e-15));

    // constant series equal to the reference
    ConsistencyReport zero = consistency_stats({{0.3, 0.4, 0.5}, {0.3, 0.4, 0.5}}, {0.3, 0.4, 0.5});
    CHECK(zero.variance == 0.0);
    CHECK(zero.mean_error == 0.0);

    // translation leaves the variance unchanged
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Rgb> series;
    for (int i = 0; i < 5; ++i) series.push_back({u(rng), u(rng), u(rng)});
    std::vector<Rgb> shifted;
    for (const auto& s : series) shifted.push_back({s[0] + 0.125, s[1] + 0.25, s[2] + 0.5});
    ConsistencyReport base = consistency_stats(series, {0.5, 0.5, 0.5});
    ConsistencyReport moved = consistency_stats(shifted, {0.5, 0.5, 0.5});
    CHECK_THAT(moved.variance, Catch::Matchers::WithinAbs(base.variance, 1e-12));

    CHECK_THROWS_AS(consistency_stats({{1, 1, 1}}, {1, 1, 1}), validation_error);
    CHECK_THROWS_AS(consistency_stats({}, {1, 1, 1}), validation_error);
}
