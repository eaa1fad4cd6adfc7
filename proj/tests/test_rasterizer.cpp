#include <doctest.h>

#include <algorithm>
#include <random>

#include "support/fixtures.hpp"
#include "uvapm/errors.hpp"
#include "uvapm/rasterizer.hpp"

using namespace uvapm;

namespace {

// Single-triangle mesh in pixel-aligned plane coordinates; uv covers the
// whole texture.
FaceMesh tri_mesh(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                  double z = 0.0) {
    FaceMesh mesh;
    mesh.rest_positions = {{a.x(), a.y(), z}, {b.x(), b.y(), z}, {c.x(), c.y(), z}};
    mesh.uvs = {{0.0, 0.0}, {1.0, 0.0}, {0.5, 1.0}};
    mesh.triangles = {{0, 1, 2}};
    return mesh;
}

Eigen::MatrixX3d rest_matrix(const FaceMesh& mesh) {
    Eigen::MatrixX3d verts(mesh.vertex_count(), 3);
    for (int v = 0; v < mesh.vertex_count(); ++v) verts.row(v) = mesh.rest_positions[v];
    return verts;
}

// Brute-force coverage oracle: solve barycentrics per pixel center with
// Cramer's rule in pixel space.
std::vector<uint8_t> coverage_oracle(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                     const Eigen::Vector2d& c, int w, int h) {
    std::vector<uint8_t> covered(static_cast<size_t>(w) * h, 0);
    const double det = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    if (std::abs(det) < 1e-14) return covered;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double w1 = ((x - a.x()) * (c.y() - a.y()) - (y - a.y()) * (c.x() - a.x())) / det;
            const double w2 = ((b.x() - a.x()) * (y - a.y()) - (b.y() - a.y()) * (x - a.x())) / det;
            const double w0 = 1.0 - w1 - w2;
            if (w0 >= 0.0 && w1 >= 0.0 && w2 >= 0.0) {
                covered[static_cast<size_t>(y) * w + x] = 1;
            }
        }
    }
    return covered;
}

// Pose that maps plane coords straight to pixel coords for a WxH viewport:
// the rasterizer applies the viewport itself, so feed it plane coords that
// undo it.
Eigen::Vector2d pixels_to_plane(const Eigen::Vector2d& px, int w, int h) {
    return {(px.x() + 0.5) * 2.0 / w - 1.0, 1.0 - (px.y() + 0.5) * 2.0 / h};
}

} // namespace

TEST_CASE("full-screen triangle with constant texture covers uniformly") {
    const int size = 32;
    const Eigen::Vector2d a = pixels_to_plane({-40.0, 70.0}, size, size);
    const Eigen::Vector2d b = pixels_to_plane({70.0, 70.0}, size, size);
    const Eigen::Vector2d c = pixels_to_plane({15.0, -60.0}, size, size);
    FaceMesh mesh = tri_mesh(a, b, c);
    UVImage texture(8, 8, 0.6);
    RenderBuffers buf = render(rest_matrix(mesh), mesh, texture, PoseCoeffs{}, size, size);

    for (size_t i = 0; i < buf.pixel_count(); ++i) {
        CHECK(buf.visibility[i] == 1);
        CHECK(buf.image.data[i * 3] == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(buf.triangle_id[i] == 0);
        const double sum = buf.barycentrics[i * 3] + buf.barycentrics[i * 3 + 1] +
                           buf.barycentrics[i * 3 + 2];
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("coverage matches the brute-force oracle on random triangles") {
    const int size = 64;
    std::mt19937 rng(121);
    std::uniform_real_distribution<double> coord(-10.0, size + 10.0);
    for (int trial = 0; trial < 12; ++trial) {
        const Eigen::Vector2d pa(coord(rng), coord(rng));
        const Eigen::Vector2d pb(coord(rng), coord(rng));
        const Eigen::Vector2d pc(coord(rng), coord(rng));

        FaceMesh mesh = tri_mesh(pixels_to_plane(pa, size, size),
                                 pixels_to_plane(pb, size, size),
                                 pixels_to_plane(pc, size, size));
        UVImage texture(4, 4, 1.0);
        RenderBuffers buf = render(rest_matrix(mesh), mesh, texture, PoseCoeffs{}, size, size);

        std::vector<uint8_t> expected = coverage_oracle(pa, pb, pc, size, size);
        CHECK(std::equal(expected.begin(), expected.end(), buf.visibility.begin()));
    }
}

TEST_CASE("nearer depth wins everywhere") {
    // Two overlapping full-screen triangles at different view-space depths.
    const int size = 24;
    FaceMesh mesh;
    auto add_tri = [&](double z, double u) {
        const int base = static_cast<int>(mesh.rest_positions.size());
        const Eigen::Vector2d a = pixels_to_plane({-40.0, 60.0}, size, size);
        const Eigen::Vector2d b = pixels_to_plane({60.0, 60.0}, size, size);
        const Eigen::Vector2d c = pixels_to_plane({12.0, -50.0}, size, size);
        mesh.rest_positions.push_back({a.x(), a.y(), z});
        mesh.rest_positions.push_back({b.x(), b.y(), z});
        mesh.rest_positions.push_back({c.x(), c.y(), z});
        mesh.uvs.push_back({u, 0.5});
        mesh.uvs.push_back({u, 0.5});
        mesh.uvs.push_back({u, 0.5});
        mesh.triangles.push_back({base, base + 1, base + 2});
    };
    add_tri(0.0, 0.125); // far, samples texel column 0
    add_tri(1.0, 0.875); // near (larger view z), samples texel column 3

    UVImage texture(4, 1);
    for (int c = 0; c < 4; ++c) {
        texture.at(0, c, 0) = c / 3.0;
        texture.at(0, c, 1) = c / 3.0;
        texture.at(0, c, 2) = c / 3.0;
    }
    RenderBuffers buf = render(rest_matrix(mesh), mesh, texture, PoseCoeffs{}, size, size);
    for (size_t i = 0; i < buf.pixel_count(); ++i) {
        REQUIRE(buf.visibility[i] == 1);
        CHECK(buf.triangle_id[i] == 1);
        CHECK(buf.image.data[i * 3] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(buf.depth.data[i] == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("triangle submission order does not change the image") {
    const int size = 48;
    std::mt19937 rng(122);
    std::uniform_real_distribution<double> coord(-5.0, size + 5.0);
    std::uniform_real_distribution<double> depth(-1.0, 1.0);
    std::uniform_real_distribution<double> uv(0.0, 1.0);

    FaceMesh mesh;
    for (int t = 0; t < 12; ++t) {
        const int base = 3 * t;
        for (int v = 0; v < 3; ++v) {
            const Eigen::Vector2d p = pixels_to_plane({coord(rng), coord(rng)}, size, size);
            mesh.rest_positions.push_back({p.x(), p.y(), depth(rng)});
            mesh.uvs.push_back({uv(rng), uv(rng)});
        }
        mesh.triangles.push_back({base, base + 1, base + 2});
    }

    std::mt19937 tex_rng(123);
    UVImage texture = fixtures::random_image(16, 16, tex_rng);
    RenderBuffers ref = render(rest_matrix(mesh), mesh, texture, PoseCoeffs{}, size, size);

    FaceMesh shuffled = mesh;
    std::shuffle(shuffled.triangles.begin(), shuffled.triangles.end(), rng);
    RenderBuffers out = render(rest_matrix(shuffled), shuffled, texture, PoseCoeffs{}, size, size);

    CHECK(ref.image.data == out.image.data);
    CHECK(ref.depth.data == out.depth.data);
    CHECK(ref.visibility == out.visibility);
}

TEST_CASE("rendering is bit-deterministic across runs") {
    FaceMesh mesh = fixtures::dome_mesh(8);
    std::mt19937 rng(124);
    UVImage texture = fixtures::random_image(32, 32, rng);
    PoseCoeffs pose;
    pose.scale = 0.8;
    pose.yaw = 0.3;

    RenderBuffers a = render(rest_matrix(mesh), mesh, texture, pose, 40, 40);
    RenderBuffers b = render(rest_matrix(mesh), mesh, texture, pose, 40, 40);
    CHECK(a.image.data == b.image.data);
    CHECK(a.depth.data == b.depth.data);
    CHECK(a.uv == b.uv);
    CHECK(a.barycentrics == b.barycentrics);
}

TEST_CASE("background pixels carry black, -inf depth, visibility 0, id -1") {
    FaceMesh mesh = tri_mesh({-0.5, -0.5}, {-0.4, -0.5}, {-0.45, -0.4});
    UVImage texture(4, 4, 1.0);
    RenderBuffers buf = render(rest_matrix(mesh), mesh, texture, PoseCoeffs{}, 16, 16);
    bool saw_background = false;
    for (size_t i = 0; i < buf.pixel_count(); ++i) {
        if (buf.visibility[i]) continue;
        saw_background = true;
        CHECK(buf.image.data[i * 3] == 0.0);
        CHECK(buf.triangle_id[i] == -1);
        CHECK(std::isinf(buf.depth.data[i]));
    }
    CHECK(saw_background);
}

TEST_CASE("bilinear sampling uses clamp-to-edge addressing") {
    UVImage texture(2, 2);
    texture.at(0, 0, 0) = 1.0; // top-left texel red
    // Sampling far outside [0,1] stays pinned to the nearest edge texel.
    Eigen::Vector3d c = sample_bilinear(texture, -3.0, 5.0);
    CHECK(c[0] == doctest::Approx(1.0));

    // Center of the texture blends all four texels equally.
    Eigen::Vector3d mid = sample_bilinear(texture, 0.5, 0.5);
    CHECK(mid[0] == doctest::Approx(0.25));
}

TEST_CASE("resample through frozen buffers matches render's own sampling") {
    FaceMesh mesh = fixtures::dome_mesh(6);
    std::mt19937 rng(125);
    UVImage texture = fixtures::random_image(16, 16, rng);
    RenderBuffers buf = render(rest_matrix(mesh), mesh, texture, PoseCoeffs{}, 32, 32);
    UVImage resampled = resample_image(buf, texture);
    CHECK(resampled.data == buf.image.data);

    // A different texture re-samples without re-rasterizing.
    UVImage texture2 = fixtures::random_image(16, 16, rng);
    UVImage resampled2 = resample_image(buf, texture2);
    bool differs = resampled2.data != buf.image.data;
    CHECK(differs);
}

TEST_CASE("zero-area target image is rejected") {
    FaceMesh mesh = tri_mesh({0, 0}, {1, 0}, {0, 1});
    UVImage texture(4, 4, 0.5);
    CHECK_THROWS_AS(render(rest_matrix(mesh), mesh, texture, PoseCoeffs{}, 0, 16),
                    InvalidInputError);
}
