#include <benchmark/benchmark.h>

#include "support/scenario.hpp"
#include "uvapm/fit.hpp"

namespace {

void BM_TotalLossFused(benchmark::State& state) {
    fixtures::ScenarioOptions opt;
    opt.seed = 4;
    opt.model_resolution = 64;
    opt.model_rank = 16;
    opt.detail_resolution = 128;
    opt.detail_rank = 8;
    opt.dataset_size = 20;
    opt.image_width = 128;
    opt.image_height = 128;
    auto s = fixtures::make_scenario(opt);

    Eigen::MatrixX3d vertices = uvapm::assemble_shape(s->shape, s->gt.beta, s->gt.xi);
    auto nmap = uvapm::bake_normals_uv(
        s->mesh, uvapm::vertex_normals(vertices, s->mesh.triangles), opt.detail_resolution);
    auto texture = uvapm::shade(uvapm::build_albedo(s->assets, s->gt, uvapm::TextureMode::Fused),
                                s->gt.sh_coeffs(), nmap);
    auto buffers = uvapm::render(vertices, s->mesh, texture, s->gt.pose_coeffs(),
                                 opt.image_width, opt.image_height);

    uvapm::FitConfig config;
    for (auto _ : state) {
        auto res = uvapm::total_loss(s->assets, s->gt, s->image, s->landmarks, s->mask, buffers,
                                     nmap, uvapm::TextureMode::Fused, config);
        benchmark::DoNotOptimize(res.losses.total);
    }
}
BENCHMARK(BM_TotalLossFused);

void BM_FitStage1Iterations(benchmark::State& state) {
    fixtures::ScenarioOptions opt;
    opt.seed = 5;
    opt.model_resolution = 32;
    opt.model_rank = 8;
    opt.detail_resolution = 64;
    opt.detail_rank = 4;
    opt.dataset_size = 10;
    opt.image_width = 96;
    opt.image_height = 96;
    auto s = fixtures::make_scenario(opt);

    uvapm::FitConfig config;
    config.stage_iterations = {static_cast<int>(state.range(0)), 0, 0};
    for (auto _ : state) {
        auto result = uvapm::fit(s->image, s->landmarks, s->mask, s->assets, config);
        benchmark::DoNotOptimize(result.state.coeffs.pose.data());
    }
}
BENCHMARK(BM_FitStage1Iterations)->Arg(10)->Unit(benchmark::kMillisecond);

} // namespace
