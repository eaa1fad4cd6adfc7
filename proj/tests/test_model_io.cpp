#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "support/fixtures.hpp"
#include "uvapm/errors.hpp"
#include "uvapm/model.hpp"
#include "uvapm/model_io.hpp"
#include "uvapm/shape_model.hpp"

using namespace uvapm;

namespace {

std::vector<char> read_all(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const std::filesystem::path& p, const std::vector<char>& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

UVAPMModel toy_model(unsigned seed) {
    std::mt19937 rng(seed);
    std::vector<UVImage> images;
    for (int i = 0; i < 5; ++i) images.push_back(fixtures::random_image(8, 8, rng));
    return build_uvapm(images, 3);
}

} // namespace

TEST_CASE("model round trip is bit-exact") {
    fixtures::TempDir tmp("model_io");
    UVAPMModel model = toy_model(71);
    const auto p1 = tmp.path() / "model.uvapm";
    const auto p2 = tmp.path() / "model2.uvapm";
    save_model(model, p1);
    UVAPMModel loaded = load_model(p1);
    save_model(loaded, p2);
    CHECK(read_all(p1) == read_all(p2));

    // And the in-memory values survive unchanged (build quantizes to f32).
    for (int c = 0; c < 3; ++c) {
        CHECK(loaded.channels[c].mean == model.channels[c].mean);
        CHECK(loaded.channels[c].basis == model.channels[c].basis);
        CHECK(loaded.channels[c].singular_values == model.channels[c].singular_values);
    }
    CHECK(loaded.n_samples == model.n_samples);
    CHECK(loaded.resolution() == 8);
}

TEST_CASE("detail basis round trip is bit-exact") {
    fixtures::TempDir tmp("detail_io");
    std::mt19937 rng(72);
    std::vector<ChannelPlane> residuals;
    for (int i = 0; i < 4; ++i) residuals.push_back(fixtures::random_plane(8, 8, rng));
    DetailBasis basis = build_detail_basis(residuals, 3);

    const auto p = tmp.path() / "detail.uvdet";
    save_detail_basis(basis, p);
    DetailBasis loaded = load_detail_basis(p);
    CHECK(loaded.channel.mean == basis.channel.mean);
    CHECK(loaded.channel.basis == basis.channel.basis);
    CHECK(loaded.channel.singular_values == basis.channel.singular_values);
    CHECK(loaded.resolution() == 8);
    CHECK(loaded.rank() == 3);
}

TEST_CASE("shape model round trip is bit-exact") {
    fixtures::TempDir tmp("shape_io");
    uvapm::FaceMesh mesh = fixtures::dome_mesh(4);
    LinearShapeModel model = fixtures::dome_shape_model(mesh, 3, 2);

    const auto p1 = tmp.path() / "shape.uvshp";
    const auto p2 = tmp.path() / "shape2.uvshp";
    save_shape_model(model, p1);
    LinearShapeModel loaded = load_shape_model(p1);
    save_shape_model(loaded, p2);
    CHECK(read_all(p1) == read_all(p2));
    CHECK(loaded.mean == model.mean);
    CHECK(loaded.id_basis == model.id_basis);
    CHECK(loaded.exp_basis == model.exp_basis);
}

TEST_CASE("truncation names the failing section and offset") {
    fixtures::TempDir tmp("model_trunc");
    UVAPMModel model = toy_model(73);
    const auto p = tmp.path() / "model.uvapm";
    save_model(model, p);

    auto bytes = read_all(p);
    SUBCASE("cut inside the header") {
        write_all(tmp.path() / "cut.bin", {bytes.begin(), bytes.begin() + 10});
        try {
            load_model(tmp.path() / "cut.bin");
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("truncated") != std::string::npos);
            CHECK(msg.find("offset") != std::string::npos);
        }
    }
    SUBCASE("cut inside a channel payload") {
        write_all(tmp.path() / "cut.bin", {bytes.begin(), bytes.begin() + 200});
        try {
            load_model(tmp.path() / "cut.bin");
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("R channel") != std::string::npos);
        }
    }
}

TEST_CASE("bad magic and wrong file kind are rejected") {
    fixtures::TempDir tmp("model_magic");
    const auto junk = tmp.path() / "junk.bin";
    write_all(junk, {'N', 'O', 'P', 'E', '0', '1', 0, 0});
    CHECK_THROWS_AS(load_model(junk), FormatError);
    CHECK_THROWS_AS(load_detail_basis(junk), FormatError);
    CHECK_THROWS_AS(load_shape_model(junk), FormatError);

    // A detail file is not a model file.
    std::mt19937 rng(74);
    std::vector<ChannelPlane> residuals;
    for (int i = 0; i < 3; ++i) residuals.push_back(fixtures::random_plane(4, 4, rng));
    const auto det = tmp.path() / "detail.uvdet";
    save_detail_basis(build_detail_basis(residuals, 2), det);
    CHECK_THROWS_AS(load_model(det), FormatError);
}

TEST_CASE("trailing bytes are rejected") {
    fixtures::TempDir tmp("model_trailing");
    UVAPMModel model = toy_model(75);
    const auto p = tmp.path() / "model.uvapm";
    save_model(model, p);
    auto bytes = read_all(p);
    bytes.push_back(0x42);
    write_all(tmp.path() / "padded.bin", bytes);
    CHECK_THROWS_AS(load_model(tmp.path() / "padded.bin"), FormatError);
}
