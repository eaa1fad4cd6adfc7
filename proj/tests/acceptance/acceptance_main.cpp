// Acceptance suite: each criterion prints one PASS/FAIL line and the suite
// exits nonzero if any fails. Runtime budgets are asserted where stated.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/scenario.hpp"
#include "uvapm/albedo.hpp"
#include "uvapm/color.hpp"
#include "uvapm/errors.hpp"
#include "uvapm/fit.hpp"
#include "uvapm/metrics.hpp"
#include "uvapm/model.hpp"
#include "uvapm/model_io.hpp"
#include "uvapm/pca.hpp"
#include "uvapm/rasterizer.hpp"
#include "uvapm/render_grad.hpp"
#include "uvapm/sh.hpp"
#include "uvapm/shape_model.hpp"

using namespace uvapm;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define REQUIRE_TRUE(cond, msg)                                     \
    do {                                                            \
        if (!(cond)) throw Failure(std::string("requirement failed: ") + (msg)); \
    } while (0)

void require_close(double actual, double expected, double tol, const std::string& what) {
    if (!(std::abs(actual - expected) <= tol)) {
        std::ostringstream ss;
        ss << what << ": got " << actual << ", want " << expected << " +/- " << tol;
        throw Failure(ss.str());
    }
}

// ---- criterion 1: PCA oracle equivalence --------------------------------

void pca_oracle_equivalence() {
    std::mt19937 rng(1001);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<int> d_dist(4, 16);
    std::uniform_int_distribution<int> n_dist(4, 10);

    for (int trial = 0; trial < 6; ++trial) {
        const int d = d_dist(rng);
        const int n = n_dist(rng);
        const int k = n - 1;
        Eigen::MatrixXd samples(d * d, n);
        for (Eigen::Index i = 0; i < samples.size(); ++i) samples.data()[i] = gauss(rng);

        PCAResult snap = snapshot_pca(samples, k);
        oracle::DensePCA dense = oracle::dense_covariance_pca(samples, k);
        REQUIRE_TRUE(snap.basis.cols() == k, "snapshot kept full rank");
        REQUIRE_TRUE((snap.singular_values - dense.singular_values).cwiseAbs().maxCoeff() <= 1e-8,
                     "singular values within 1e-8 of the dense covariance oracle");
        REQUIRE_TRUE((snap.basis - dense.basis).cwiseAbs().maxCoeff() <= 1e-8,
                     "basis within 1e-8 of the dense covariance oracle");
    }
}

// ---- criterion 2: projection optimality ----------------------------------

void projection_optimality() {
    std::mt19937 rng(1002);
    const int n = 8, d = 12;
    std::vector<UVImage> images;
    for (int i = 0; i < n; ++i) images.push_back(fixtures::random_image(d, d, rng));

    // encode(decode(alpha)) = alpha at 1e-5.
    UVAPMModel model = build_uvapm(images, 5);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd alpha(model.coeff_count());
    for (double& v : alpha.reshaped()) v = gauss(rng);
    CoarseCoeffs back = encode_coarse(decode_coarse(model, CoarseCoeffs(alpha)), model);
    REQUIRE_TRUE((back.values - alpha).cwiseAbs().maxCoeff() <= 1e-5,
                 "encode(decode(alpha)) = alpha within 1e-5");

    // Training reconstruction MSE non-increasing in k, checked k = 1..N-1.
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n - 1; ++k) {
        UVAPMModel m = build_uvapm(images, k);
        double total = 0.0;
        for (const UVImage& img : images) {
            UVImage recon = decode_coarse(m, encode_coarse(img, m));
            for (size_t i = 0; i < img.data.size(); ++i) {
                const double diff = recon.data[i] - img.data[i];
                total += diff * diff;
            }
        }
        REQUIRE_TRUE(total <= prev + 1e-9, "reconstruction MSE non-increasing in k");
        prev = total;
    }
}

// ---- criterion 3: detail ablation property -------------------------------

double v_channel_mse(const UVImage& a, const UVImage& b) {
    UVImage ha = rgb_to_hsv(a), hb = rgb_to_hsv(b);
    double accum = 0.0;
    for (size_t i = 0; i < ha.pixel_count(); ++i) {
        const double diff = ha.data[i * 3 + 2] - hb.data[i * 3 + 2];
        accum += diff * diff;
    }
    return accum / ha.pixel_count();
}

void detail_ablation() {
    const int d_detail = 64, d_model = 32, m = 8;
    auto images = fixtures::procedural_dataset(20, d_detail, 1003, 0.08);

    std::vector<UVImage> at_model;
    for (const auto& img : images) {
        at_model.push_back(resize_bilinear(img, d_model, d_model));
    }

    for (int k : {8, 16}) {
        UVAPMModel model = build_uvapm(at_model, k);
        auto residuals = extract_residuals(images, model, d_detail);
        DetailBasis basis = build_detail_basis(residuals, m);

        double coarse_vmse = 0.0, fused_vmse = 0.0;
        double coarse_psnr = 0.0, fused_psnr = 0.0;
        double coarse_ssim = 0.0, fused_ssim = 0.0;
        for (size_t i = 0; i < images.size(); ++i) {
            UVImage coarse = decode_coarse(model, encode_coarse(at_model[i], model));
            UVImage coarse_up = resize_bilinear(coarse, d_detail, d_detail);
            UVImage fused = fuse(coarse, decode_detail(basis, encode_detail(residuals[i], basis)));

            coarse_vmse += v_channel_mse(images[i], coarse_up);
            fused_vmse += v_channel_mse(images[i], fused);
            coarse_psnr += psnr(images[i], coarse_up);
            fused_psnr += psnr(images[i], fused);
            coarse_ssim += ssim(images[i], coarse_up);
            fused_ssim += ssim(images[i], fused);
        }
        std::ostringstream detail;
        detail << "k=" << k << ": V-MSE " << coarse_vmse << " -> " << fused_vmse << ", PSNR "
               << coarse_psnr / 20 << " -> " << fused_psnr / 20 << ", SSIM " << coarse_ssim / 20
               << " -> " << fused_ssim / 20;
        REQUIRE_TRUE(fused_vmse < coarse_vmse, "detail strictly lowers V-MSE (" + detail.str() + ")");
        REQUIRE_TRUE(fused_psnr > coarse_psnr, "detail strictly raises PSNR (" + detail.str() + ")");
        REQUIRE_TRUE(fused_ssim > coarse_ssim, "detail strictly raises SSIM (" + detail.str() + ")");
    }
}

// ---- criterion 4: shading identity ----------------------------------------

void shading_identity() {
    FaceMesh mesh = fixtures::dome_mesh(10);
    Eigen::MatrixX3d verts(mesh.vertex_count(), 3);
    for (int v = 0; v < mesh.vertex_count(); ++v) verts.row(v) = mesh.rest_positions[v];
    NormalMap nmap = bake_normals_uv(mesh, vertex_normals(verts, mesh.triangles), 64);

    std::mt19937 rng(1004);
    UVImage albedo = fixtures::random_image(64, 64, rng);
    SHCoeffs gamma;
    gamma.gamma.col(0).setConstant(1.0 / kSHConstantBand);
    UVImage shaded = shade(albedo, gamma, nmap);

    double max_err = 0.0;
    for (size_t i = 0; i < albedo.pixel_count(); ++i) {
        if (!nmap.coverage[i]) continue;
        for (int c = 0; c < 3; ++c) {
            max_err = std::max(max_err, std::abs(shaded.data[i * 3 + c] - albedo.data[i * 3 + c]));
        }
    }
    REQUIRE_TRUE(nmap.coverage_fraction() > 0.5, "normal map has real coverage");
    require_close(max_err, 0.0, 1e-6, "identity shading max abs error on covered texels");
}

// ---- criterion 5: gradient suite -------------------------------------------

void gradient_suite() {
    for (unsigned seed : {2001u, 2002u, 2003u}) {
        fixtures::ScenarioOptions opt;
        opt.seed = seed;
        opt.mesh_grid = 8;
        opt.model_resolution = 16;
        opt.model_rank = 5;
        opt.detail_resolution = 32;
        opt.detail_rank = 3;
        opt.dataset_size = 8;
        opt.image_width = 64;
        opt.image_height = 64;
        auto s = fixtures::make_scenario(opt);

        std::mt19937 rng(seed + 7);
        std::normal_distribution<double> gauss;
        Coefficients coeffs = s->gt;
        for (double& v : coeffs.gamma.reshaped()) v += 0.05 * gauss(rng);
        for (double& v : coeffs.alpha_c.reshaped()) v += 0.05 * gauss(rng);
        for (double& v : coeffs.alpha_d.reshaped()) v += 0.05 * gauss(rng);
        coeffs.pose[4] += 0.02;
        coeffs.pose[5] -= 0.01;

        Eigen::MatrixX3d vertices = assemble_shape(s->shape, coeffs.beta, coeffs.xi);
        NormalMap nmap = bake_normals_uv(s->mesh, vertex_normals(vertices, s->mesh.triangles),
                                         opt.detail_resolution);
        UVImage texture = shade(build_albedo(s->assets, coeffs, TextureMode::Fused),
                                coeffs.sh_coeffs(), nmap);
        RenderBuffers buffers = render(vertices, s->mesh, texture, coeffs.pose_coeffs(),
                                       opt.image_width, opt.image_height);

        FitConfig config;
        auto eval = [&](const Coefficients& c) {
            return total_loss(s->assets, c, s->image, s->landmarks, s->mask, buffers, nmap,
                              TextureMode::Fused, config)
                .losses.total;
        };
        TotalLossResult res = total_loss(s->assets, coeffs, s->image, s->landmarks, s->mask,
                                         buffers, nmap, TextureMode::Fused, config);

        for (CoeffGroup group : {CoeffGroup::Gamma, CoeffGroup::AlphaC, CoeffGroup::AlphaD,
                                 CoeffGroup::Pose}) {
            Eigen::VectorXd numeric = oracle::central_differences(
                [&](const Eigen::VectorXd& x) {
                    Coefficients c = coeffs;
                    c[group] = x;
                    return eval(c);
                },
                coeffs[group], 1e-4);
            REQUIRE_TRUE(oracle::gradients_match(res.gradients[group], numeric, 1e-4, 1e-8),
                         std::string("analytic vs finite differences for ") + group_name(group));
        }
    }
}

// ---- criterion 6: synthetic closed-loop fit --------------------------------

void closed_loop_fit() {
    fixtures::ScenarioOptions opt;
    opt.seed = 3001;
    opt.mesh_grid = 12;
    opt.model_resolution = 64;
    opt.model_rank = 16;
    opt.detail_resolution = 128;
    opt.detail_rank = 8;
    opt.dataset_size = 20;
    opt.image_width = 128;
    opt.image_height = 128;
    auto s = fixtures::make_scenario(opt);

    FitConfig config; // default stage iterations, learning rate, seed
    FitResult first = fit(s->image, s->landmarks, s->mask, s->assets, config);

    std::ostringstream detail;
    detail << "photometric " << first.report.final_losses.photometric << ", landmark "
           << first.report.final_losses.landmark;
    REQUIRE_TRUE(first.report.final_losses.photometric <= 1e-3,
                 "masked mean photometric error <= 1e-3 (" + detail.str() + ")");
    REQUIRE_TRUE(first.report.final_losses.landmark <= 1.0,
                 "landmark loss <= 1 px^2 total (" + detail.str() + ")");

    // Recovered constant lighting band within 5% of truth, each channel.
    const SHCoeffs gt_gamma = s->gt.sh_coeffs();
    const SHCoeffs got_gamma = SHCoeffs::from_vector(first.state.coeffs.gamma);
    for (int c = 0; c < 3; ++c) {
        const double rel = std::abs(got_gamma.gamma(c, 0) - gt_gamma.gamma(c, 0)) /
                           std::abs(gt_gamma.gamma(c, 0));
        REQUIRE_TRUE(rel <= 0.05, "recovered constant SH band within 5% of truth");
    }

    FitResult second = fit(s->image, s->landmarks, s->mask, s->assets, config);
    REQUIRE_TRUE(first.state.coeffs.pose == second.state.coeffs.pose &&
                     first.state.coeffs.gamma == second.state.coeffs.gamma &&
                     first.state.coeffs.alpha_c == second.state.coeffs.alpha_c &&
                     first.state.coeffs.alpha_d == second.state.coeffs.alpha_d &&
                     first.state.coeffs.beta == second.state.coeffs.beta &&
                     first.state.coeffs.xi == second.state.coeffs.xi,
                 "two runs with the same seed are bit-identical");
}

// ---- criterion 7: HSV / fusion identities ----------------------------------

void fusion_identities() {
    std::mt19937 rng(1007);
    UVImage coarse = fixtures::random_image(32, 32, rng);

    UVImage same = fuse(coarse, ChannelPlane(32, 32, 0.0));
    double max_err = 0.0;
    for (size_t i = 0; i < coarse.data.size(); ++i) {
        max_err = std::max(max_err, std::abs(same.data[i] - coarse.data[i]));
    }
    require_close(max_err, 0.0, 1e-5, "fuse with zero detail at equal resolution");

    ChannelPlane detail = fixtures::random_plane(64, 64, rng, -0.8, 0.8);
    UVImage fused = fuse(coarse, detail);
    UVImage up = resize_bilinear(coarse, 64, 64);
    UVImage fused_hsv = rgb_to_hsv(fused);
    UVImage up_hsv = rgb_to_hsv(up);
    for (size_t i = 0; i < fused_hsv.pixel_count(); ++i) {
        const double expected = std::clamp(up_hsv.data[i * 3 + 2] + detail.data[i], 0.0, 1.0);
        REQUIRE_TRUE(fused_hsv.data[i * 3 + 2] == expected,
                     "fused V channel equals clamped scalar arithmetic exactly");
    }
}

// ---- criterion 8: rasterizer coverage oracle --------------------------------

void rasterizer_coverage() {
    const int size = 64;
    std::mt19937 rng(1008);
    std::uniform_real_distribution<double> coord(-8.0, size + 8.0);

    auto pixels_to_plane = [&](double px, double py) {
        return Eigen::Vector2d{(px + 0.5) * 2.0 / size - 1.0, 1.0 - (py + 0.5) * 2.0 / size};
    };

    for (int trial = 0; trial < 12; ++trial) {
        const Eigen::Vector2d pa(coord(rng), coord(rng));
        const Eigen::Vector2d pb(coord(rng), coord(rng));
        const Eigen::Vector2d pc(coord(rng), coord(rng));

        FaceMesh mesh;
        for (const auto& p : {pa, pb, pc}) {
            const Eigen::Vector2d plane = pixels_to_plane(p.x(), p.y());
            mesh.rest_positions.push_back({plane.x(), plane.y(), 0.0});
        }
        mesh.uvs = {{0.0, 0.0}, {1.0, 0.0}, {0.5, 1.0}};
        mesh.triangles = {{0, 1, 2}};
        Eigen::MatrixX3d verts(3, 3);
        for (int v = 0; v < 3; ++v) verts.row(v) = mesh.rest_positions[v];

        RenderBuffers buf =
            render(verts, mesh, UVImage(4, 4, 1.0), PoseCoeffs{}, size, size);

        // Brute-force pixel-center oracle via Cramer's rule.
        const double det = (pb.x() - pa.x()) * (pc.y() - pa.y()) -
                           (pb.y() - pa.y()) * (pc.x() - pa.x());
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                bool inside = false;
                if (std::abs(det) >= 1e-14) {
                    const double w1 = ((x - pa.x()) * (pc.y() - pa.y()) -
                                       (y - pa.y()) * (pc.x() - pa.x())) / det;
                    const double w2 = ((pb.x() - pa.x()) * (y - pa.y()) -
                                       (pb.y() - pa.y()) * (x - pa.x())) / det;
                    inside = w1 >= 0.0 && w2 >= 0.0 && (1.0 - w1 - w2) >= 0.0;
                }
                REQUIRE_TRUE(buf.visibility[static_cast<size_t>(y) * size + x] == (inside ? 1 : 0),
                             "covered pixel-center sets are equal");
            }
        }
    }

    // Submission order invariance on a random multi-triangle scene.
    FaceMesh scene;
    std::uniform_real_distribution<double> z_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> uv_dist(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        const int base = 3 * t;
        for (int v = 0; v < 3; ++v) {
            const Eigen::Vector2d plane = pixels_to_plane(coord(rng), coord(rng));
            scene.rest_positions.push_back({plane.x(), plane.y(), z_dist(rng)});
            scene.uvs.push_back({uv_dist(rng), uv_dist(rng)});
        }
        scene.triangles.push_back({base, base + 1, base + 2});
    }
    Eigen::MatrixX3d scene_verts(scene.vertex_count(), 3);
    for (int v = 0; v < scene.vertex_count(); ++v) scene_verts.row(v) = scene.rest_positions[v];
    std::mt19937 tex_rng(1009);
    UVImage texture = fixtures::random_image(8, 8, tex_rng);

    RenderBuffers ref = render(scene_verts, scene, texture, PoseCoeffs{}, size, size);
    FaceMesh shuffled = scene;
    std::shuffle(shuffled.triangles.begin(), shuffled.triangles.end(), rng);
    RenderBuffers out = render(scene_verts, shuffled, texture, PoseCoeffs{}, size, size);
    REQUIRE_TRUE(ref.image.data == out.image.data,
                 "triangle submission order does not change the image");
}

// ---- criterion 9: metric oracles --------------------------------------------

void metric_oracles() {
    UVImage a(16, 16, 0.3);
    UVImage b(16, 16, 0.3 + 1.0 / 255.0);
    require_close(psnr(a, b), 10.0 * std::log10(65025.0), 1e-6, "constant-offset PSNR");

    std::mt19937 rng(1010);
    for (int trial = 0; trial < 4; ++trial) {
        UVImage x = fixtures::random_image(32, 32, rng);
        UVImage y = fixtures::random_image(32, 32, rng);
        require_close(ssim(x, y), oracle::ssim_reference(x, y), 1e-6, "SSIM vs reference");
    }

    UVImage img = fixtures::random_image(32, 32, rng);
    REQUIRE_TRUE(mse(img, img) == 0.0, "identical images have MSE 0");
    require_close(ssim(img, img), 1.0, 1e-12, "identical images have SSIM 1");
    REQUIRE_TRUE(psnr(img, img) == 99.0, "identical images cap PSNR at 99");
}

// ---- criterion 10: serialization --------------------------------------------

std::vector<char> file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void serialization_round_trips() {
    fixtures::TempDir tmp("acceptance_io");
    std::mt19937 rng(1011);

    std::vector<UVImage> images;
    for (int i = 0; i < 6; ++i) images.push_back(fixtures::random_image(8, 8, rng));
    UVAPMModel model = build_uvapm(images, 4);
    const auto model_path = tmp.path() / "m.uvapm";
    save_model(model, model_path);
    save_model(load_model(model_path), tmp.path() / "m2.uvapm");
    REQUIRE_TRUE(file_bytes(model_path) == file_bytes(tmp.path() / "m2.uvapm"),
                 "model file round-trips bit-exactly");

    std::vector<ChannelPlane> residuals;
    for (int i = 0; i < 5; ++i) residuals.push_back(fixtures::random_plane(8, 8, rng));
    DetailBasis basis = build_detail_basis(residuals, 3);
    const auto detail_path = tmp.path() / "d.uvdet";
    save_detail_basis(basis, detail_path);
    save_detail_basis(load_detail_basis(detail_path), tmp.path() / "d2.uvdet");
    REQUIRE_TRUE(file_bytes(detail_path) == file_bytes(tmp.path() / "d2.uvdet"),
                 "detail file round-trips bit-exactly");

    FaceMesh mesh = fixtures::dome_mesh(5);
    LinearShapeModel shape = fixtures::dome_shape_model(mesh);
    const auto shape_path = tmp.path() / "s.uvshp";
    save_shape_model(shape, shape_path);
    save_shape_model(load_shape_model(shape_path), tmp.path() / "s2.uvshp");
    REQUIRE_TRUE(file_bytes(shape_path) == file_bytes(tmp.path() / "s2.uvshp"),
                 "shape file round-trips bit-exactly");

    // Corruption: truncate into the G-channel payload and check the message
    // names the section. Header is 20 bytes; each channel block is
    // 8 + 4*(64 + 4 + 64*4) bytes at d=8, k=4.
    auto bytes = file_bytes(model_path);
    const size_t channel_block = 8 + 4 * (64 + 4 + 64 * 4);
    const size_t cut = 20 + channel_block + 8 + 10; // inside the G mean
    std::ofstream out(tmp.path() / "cut.bin", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(std::min(cut, bytes.size())));
    out.close();
    try {
        load_model(tmp.path() / "cut.bin");
        throw Failure("truncated model file was accepted");
    } catch (const FormatError& e) {
        const std::string msg = e.what();
        REQUIRE_TRUE(msg.find("G channel") != std::string::npos,
                     "format error names the failing section (got: " + msg + ")");
    }
}

// ---- harness -----------------------------------------------------------------

struct Criterion {
    std::string name;
    double budget_seconds; // 0 = no stated budget
    std::function<void()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"pca-oracle-equivalence", 1.0, pca_oracle_equivalence},
        {"projection-optimality", 0.0, projection_optimality},
        {"detail-ablation-property", 30.0, detail_ablation},
        {"shading-identity", 0.0, shading_identity},
        {"gradient-suite", 60.0, gradient_suite},
        {"synthetic-closed-loop-fit", 300.0, closed_loop_fit},
        {"hsv-fusion-identities", 0.0, fusion_identities},
        {"rasterizer-coverage-oracle", 0.0, rasterizer_coverage},
        {"metric-oracles", 0.0, metric_oracles},
        {"serialization-round-trips", 0.0, serialization_round_trips},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.run();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (error.empty() && c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
            std::ostringstream ss;
            ss << "runtime " << seconds << "s exceeds budget " << c.budget_seconds << "s";
            error = ss.str();
        }
        if (error.empty()) {
            std::printf("[PASS] %-28s (%.2fs)\n", c.name.c_str(), seconds);
        } else {
            std::printf("[FAIL] %-28s (%.2fs): %s\n", c.name.c_str(), seconds, error.c_str());
            ++failures;
        }
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
