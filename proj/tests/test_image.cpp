#include <doctest.h>

#include <random>

#include "support/fixtures.hpp"
#include "uvapm/errors.hpp"
#include "uvapm/image.hpp"

using namespace uvapm;

TEST_CASE("split of constant gray produces three constant planes") {
    UVImage img(4, 3, 0.5);
    auto [r, g, b] = split_channels(img);
    for (const ChannelPlane* p : {&r, &g, &b}) {
        for (double v : p->data) CHECK(v == 0.5);
    }
}

TEST_CASE("merge(split(x)) is the identity bit-exactly") {
    std::mt19937 rng(7);
    UVImage img = fixtures::random_image(9, 5, rng);
    auto [r, g, b] = split_channels(img);
    UVImage back = merge_channels(r, g, b);
    REQUIRE(back.data.size() == img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i) CHECK(back.data[i] == img.data[i]);
}

TEST_CASE("merge rejects mismatched plane dimensions") {
    ChannelPlane a(4, 4), b(4, 4), c(3, 4);
    CHECK_THROWS_AS(merge_channels(a, b, c), InvalidInputError);
}

TEST_CASE("bilinear resize: constant image stays constant") {
    UVImage img(8, 8, 0.25);
    UVImage up = resize_bilinear(img, 32, 32);
    for (double v : up.data) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
    UVImage down = resize_bilinear(img, 4, 4);
    for (double v : down.data) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("bilinear 2:1 shrink equals 2x2 box averaging") {
    std::mt19937 rng(11);
    UVImage img = fixtures::random_image(8, 8, rng);
    UVImage half = resize_bilinear(img, 4, 4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            for (int ch = 0; ch < 3; ++ch) {
                const double box = 0.25 * (img.at(2 * r, 2 * c, ch) + img.at(2 * r, 2 * c + 1, ch) +
                                           img.at(2 * r + 1, 2 * c, ch) +
                                           img.at(2 * r + 1, 2 * c + 1, ch));
                CHECK(half.at(r, c, ch) == doctest::Approx(box).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("bilinear upsample preserves the mean of smooth fields") {
    UVImage img(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = 0.1 * r + 0.2 * c;
    UVImage up = resize_bilinear(img, 8, 8);
    // Interior gradient is reproduced exactly by bilinear interpolation.
    CHECK(up.at(4, 4, 0) ==
          doctest::Approx(0.1 * (4 + 0.5) / 2.0 + 0.2 * (4 + 0.5) / 2.0 - 0.05 - 0.1).epsilon(1e-9));
}

TEST_CASE("mask construction validates ranges and defaults G = (W > 0)") {
    ChannelPlane w(3, 3, 0.0);
    w.at(1, 1) = 0.8;
    FaceMask mask = make_mask(w);
    CHECK(mask.skin.at(1, 1) == 1.0);
    CHECK(mask.skin.at(0, 0) == 0.0);

    ChannelPlane negative(2, 2, -0.5);
    CHECK_THROWS_AS(make_mask(negative), InvalidInputError);

    ChannelPlane weights(2, 2, 1.0);
    ChannelPlane g(2, 2, 0.5); // not binary
    CHECK_THROWS_AS(make_mask(weights, g), InvalidInputError);
}
