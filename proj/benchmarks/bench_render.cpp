#include <benchmark/benchmark.h>

#include <random>

#include "support/fixtures.hpp"
#include "uvapm/normals.hpp"
#include "uvapm/rasterizer.hpp"
#include "uvapm/sh.hpp"

namespace {

struct RenderSetup {
    uvapm::FaceMesh mesh = fixtures::dome_mesh(16);
    Eigen::MatrixX3d vertices;
    uvapm::UVImage texture;
    uvapm::PoseCoeffs pose;

    RenderSetup() {
        vertices.resize(mesh.vertex_count(), 3);
        for (int v = 0; v < mesh.vertex_count(); ++v) vertices.row(v) = mesh.rest_positions[v];
        std::mt19937 rng(3);
        texture = fixtures::random_image(128, 128, rng);
        pose.scale = 0.8;
        pose.yaw = 0.2;
    }
};

void BM_Rasterize(benchmark::State& state) {
    RenderSetup setup;
    const int size = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto buffers = uvapm::render(setup.vertices, setup.mesh, setup.texture, setup.pose,
                                     size, size);
        benchmark::DoNotOptimize(buffers.image.data.data());
    }
    state.SetItemsProcessed(state.iterations() * size * size);
}
BENCHMARK(BM_Rasterize)->Arg(128)->Arg(256);

void BM_BakeNormals(benchmark::State& state) {
    RenderSetup setup;
    Eigen::MatrixX3d normals = uvapm::vertex_normals(setup.vertices, setup.mesh.triangles);
    const int d = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto map = uvapm::bake_normals_uv(setup.mesh, normals, d);
        benchmark::DoNotOptimize(map.normals.data());
    }
}
BENCHMARK(BM_BakeNormals)->Arg(128)->Arg(256);

void BM_Shade(benchmark::State& state) {
    RenderSetup setup;
    Eigen::MatrixX3d normals = uvapm::vertex_normals(setup.vertices, setup.mesh.triangles);
    auto map = uvapm::bake_normals_uv(setup.mesh, normals, 128);
    uvapm::SHCoeffs gamma;
    gamma.gamma.col(0).setConstant(2.0);
    for (auto _ : state) {
        auto shaded = uvapm::shade(setup.texture, gamma, map);
        benchmark::DoNotOptimize(shaded.data.data());
    }
    state.SetItemsProcessed(state.iterations() * 128 * 128);
}
BENCHMARK(BM_Shade);

} // namespace
