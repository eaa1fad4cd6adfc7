// uvapm: build per-channel PCA albedo models, generate fused albedo maps,
// fit coefficients to a photo, render, and evaluate image metrics.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uvapm/albedo.hpp"
#include "uvapm/coeffs_json.hpp"
#include "uvapm/errors.hpp"
#include "uvapm/fit.hpp"
#include "uvapm/metrics.hpp"
#include "uvapm/model_io.hpp"
#include "uvapm/png_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<fs::path> png_files_sorted(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw uvapm::InvalidInputError("not a directory: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") {
            files.push_back(entry.path());
        }
    }
    // Lexicographic order defines the sample order.
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<uvapm::UVImage> load_dataset(const fs::path& dir, int resolution) {
    std::vector<uvapm::UVImage> images;
    for (const fs::path& p : png_files_sorted(dir)) {
        uvapm::UVImage img = uvapm::load_image(p);
        if (img.width != resolution || img.height != resolution) {
            img = uvapm::resize_bilinear(img, resolution, resolution);
        }
        images.push_back(std::move(img));
    }
    if (images.empty()) {
        throw uvapm::InsufficientDataError("no PNG images found in " + dir.string());
    }
    return images;
}

int cmd_build_model(const fs::path& dir, int k, int d, const fs::path& out) {
    std::vector<uvapm::UVImage> images = load_dataset(dir, d);
    uvapm::UVAPMModel model = uvapm::build_uvapm(images, k);
    uvapm::save_model(model, out);

    static const char* names[3] = {"R", "G", "B"};
    for (int c = 0; c < 3; ++c) {
        const auto& ch = model.channels[c];
        std::cout << "channel " << names[c] << ": rank " << ch.rank()
                  << ", explained variance "
                  << 100.0 * uvapm::explained_variance(ch, ch.rank(), model.n_samples)
                  << "%\n";
    }
    std::cout << "samples: " << model.n_samples << ", resolution: " << model.resolution()
              << ", total coefficients: " << model.coeff_count() << "\n";
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}

int cmd_build_detail(const fs::path& dir, const fs::path& model_path, int m, int d_detail,
                     const fs::path& out) {
    uvapm::UVAPMModel model = uvapm::load_model(model_path);
    std::vector<uvapm::UVImage> images = load_dataset(dir, d_detail);
    std::vector<uvapm::ChannelPlane> residuals =
        uvapm::extract_residuals(images, model, d_detail);

    const int max_rank = static_cast<int>(residuals.size()) - 1;
    if (m > max_rank) {
        std::cerr << "warning: rank " << m << " exceeds N-1 = " << max_rank
                  << ", clamping\n";
        m = max_rank;
    }
    uvapm::DetailBasis basis = uvapm::build_detail_basis(residuals, m);
    uvapm::save_detail_basis(basis, out);

    double residual_energy = 0.0;
    for (const auto& r : residuals) {
        for (double v : r.data) residual_energy += v * v;
    }
    residual_energy /= static_cast<double>(residuals.size());
    std::cout << "residuals: " << residuals.size() << " planes at " << d_detail << "x"
              << d_detail << ", mean energy " << residual_energy << "\n";
    std::cout << "detail rank " << basis.rank() << ", explained variance "
              << 100.0 * uvapm::explained_variance(basis.channel, basis.rank(), basis.n_samples)
              << "%\n";
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}

int cmd_generate(const fs::path& model_path, const std::optional<fs::path>& detail_path,
                 const fs::path& coeffs_path, const fs::path& out, std::optional<int> size) {
    uvapm::UVAPMModel model = uvapm::load_model(model_path);
    uvapm::CoeffsFile coeffs = uvapm::load_coeffs_json(coeffs_path);

    uvapm::UVImage result;
    if (detail_path && coeffs.alpha_d) {
        uvapm::DetailBasis detail = uvapm::load_detail_basis(*detail_path);
        result = uvapm::generate(model, detail, coeffs.alpha_c, *coeffs.alpha_d);
    } else {
        int d_out = model.resolution();
        if (detail_path) {
            d_out = uvapm::load_detail_basis(*detail_path).resolution();
        }
        if (size) d_out = *size;
        result = uvapm::generate_coarse(model, coeffs.alpha_c, d_out);
    }
    uvapm::save_image(result, out);
    std::cout << "wrote " << out.string() << " (" << result.width << "x" << result.height
              << ")\n";
    return 0;
}

uvapm::LandmarkSet scale_landmarks(const uvapm::LandmarkSet& in, double sx, double sy) {
    uvapm::LandmarkSet out = in;
    for (int i = 0; i < 68; ++i) {
        // Pixel-center coordinates scale affinely.
        out.points(i, 0) = (in.points(i, 0) + 0.5) * sx - 0.5;
        out.points(i, 1) = (in.points(i, 1) + 0.5) * sy - 0.5;
    }
    return out;
}

int cmd_fit(const fs::path& image_path, const fs::path& landmarks_path, const fs::path& mask_path,
            const std::optional<fs::path>& skin_path, const fs::path& shape_path,
            const fs::path& mesh_path, const fs::path& lmk_idx_path, const fs::path& model_path,
            const fs::path& detail_path, const std::optional<fs::path>& config_path,
            std::optional<std::uint64_t> seed_override, const fs::path& out_dir) {
    uvapm::FitConfig config;
    if (config_path) config = uvapm::load_fit_config_json(*config_path);
    if (seed_override) config.seed = *seed_override;

    uvapm::UVImage image = uvapm::load_image(image_path);
    uvapm::LandmarkSet landmarks = uvapm::load_landmarks_json(landmarks_path);
    uvapm::FaceMask mask = uvapm::load_mask(mask_path, skin_path);

    if (image.width != config.image_size || image.height != config.image_size) {
        const double sx = static_cast<double>(config.image_size) / image.width;
        const double sy = static_cast<double>(config.image_size) / image.height;
        image = uvapm::resize_bilinear(image, config.image_size, config.image_size);
        uvapm::ChannelPlane w =
            uvapm::resize_bilinear(mask.weights, config.image_size, config.image_size);
        uvapm::ChannelPlane g(config.image_size, config.image_size);
        uvapm::ChannelPlane g_resized =
            uvapm::resize_bilinear(mask.skin, config.image_size, config.image_size);
        for (size_t i = 0; i < g.data.size(); ++i) {
            g.data[i] = g_resized.data[i] >= 0.5 ? 1.0 : 0.0;
        }
        mask = uvapm::make_mask(std::move(w), std::move(g));
        landmarks = scale_landmarks(landmarks, sx, sy);
    }

    uvapm::LinearShapeModel shape = uvapm::load_shape_model(shape_path);
    uvapm::FaceMesh mesh = uvapm::load_obj(mesh_path);
    mesh.landmark_indices = uvapm::load_landmark_indices(lmk_idx_path, mesh.vertex_count());
    uvapm::UVAPMModel model = uvapm::load_model(model_path);
    uvapm::DetailBasis detail = uvapm::load_detail_basis(detail_path);

    uvapm::FitAssets assets;
    assets.shape = &shape;
    assets.mesh = &mesh;
    assets.albedo_model = &model;
    assets.detail_basis = &detail;

    uvapm::FitResult result = uvapm::fit(image, landmarks, mask, assets, config);

    fs::create_directories(out_dir);
    uvapm::CoeffsFile coeffs;
    coeffs.alpha_c = uvapm::CoarseCoeffs(result.state.coeffs.alpha_c);
    coeffs.alpha_d = uvapm::DetailCoeffs(result.state.coeffs.alpha_d);
    uvapm::save_coeffs_json(coeffs, out_dir / "coefficients.json");
    uvapm::save_fit_report_json(result, out_dir / "report.json");
    uvapm::save_image(result.rendered, out_dir / "render.png");
    uvapm::UVImage albedo = uvapm::generate(
        model, detail, coeffs.alpha_c, *coeffs.alpha_d);
    uvapm::save_image(albedo, out_dir / "albedo.png");

    for (const auto& stage : result.report.stages) {
        std::cout << "stage " << stage.name << ": loss " << stage.initial_loss << " -> "
                  << stage.final_loss << " (" << stage.iterations << " iterations)\n";
    }
    std::cout << "final photometric " << result.report.final_losses.photometric
              << ", landmark " << result.report.final_losses.landmark << "\n";
    std::cout << "wrote " << (out_dir / "report.json").string() << "\n";
    return 0;
}

Eigen::VectorXd json_vector(const json& j, Eigen::Index expected, const char* name) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != expected) {
        throw uvapm::FormatError(std::string("params: '") + name + "' must be an array of " +
                                 std::to_string(expected) + " numbers");
    }
    Eigen::VectorXd v(expected);
    for (Eigen::Index i = 0; i < expected; ++i) v[i] = j[i].get<double>();
    return v;
}

int cmd_render(const fs::path& shape_path, const fs::path& mesh_path,
               const fs::path& params_path, const fs::path& texture_path, const fs::path& out,
               int width, int height) {
    uvapm::LinearShapeModel shape = uvapm::load_shape_model(shape_path);
    uvapm::FaceMesh mesh = uvapm::load_obj(mesh_path);
    uvapm::UVImage albedo = uvapm::load_image(texture_path);

    std::ifstream in(params_path);
    if (!in) throw uvapm::FormatError("cannot open params file: " + params_path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw uvapm::FormatError("params: invalid JSON: " + std::string(e.what()));
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(shape.id_dims());
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(shape.exp_dims());
    if (j.contains("beta")) beta = json_vector(j["beta"], shape.id_dims(), "beta");
    if (j.contains("xi")) xi = json_vector(j["xi"], shape.exp_dims(), "xi");

    uvapm::PoseCoeffs pose;
    if (j.contains("pose")) {
        const json& p = j["pose"];
        if (p.contains("scale")) pose.scale = p["scale"].get<double>();
        if (p.contains("translation")) {
            Eigen::VectorXd t = json_vector(p["translation"], 3, "pose.translation");
            pose.translation = t;
        }
        if (p.contains("euler")) {
            Eigen::VectorXd e = json_vector(p["euler"], 3, "pose.euler");
            pose.pitch = e[0];
            pose.yaw = e[1];
            pose.roll = e[2];
        }
    }

    // Identity lighting by default: constant band scaled so shading is a
    // no-op on covered texels.
    uvapm::SHCoeffs gamma;
    gamma.gamma.col(0).setConstant(1.0 / uvapm::kSHConstantBand);
    if (j.contains("gamma")) gamma = uvapm::SHCoeffs::from_vector(json_vector(j["gamma"], 27, "gamma"));

    Eigen::MatrixX3d vertices = uvapm::assemble_shape(shape, beta, xi);
    Eigen::MatrixX3d normals = uvapm::vertex_normals(vertices, mesh.triangles);
    const int tex_res = albedo.width;
    if (albedo.height != tex_res) {
        throw uvapm::InvalidInputError("render: texture must be square");
    }
    uvapm::NormalMap nmap = uvapm::bake_normals_uv(mesh, normals, tex_res);
    uvapm::UVImage texture = uvapm::shade(albedo, gamma, nmap);
    uvapm::RenderBuffers buffers =
        uvapm::render(vertices, mesh, texture, pose, width, height);
    uvapm::save_image(buffers.image, out);

    size_t covered = 0;
    for (uint8_t v : buffers.visibility) covered += v;
    std::cout << "rendered " << width << "x" << height << ", coverage "
              << (100.0 * covered / buffers.pixel_count()) << "%\n";
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}

int cmd_eval(const fs::path& a_path, const fs::path& b_path,
             const std::optional<fs::path>& out_json) {
    uvapm::UVImage a = uvapm::load_image(a_path);
    uvapm::UVImage b = uvapm::load_image(b_path);
    const double m = uvapm::mse(a, b);
    const double p = uvapm::psnr(a, b);
    const double s = uvapm::ssim(a, b);
    std::cout << "MSE " << m << " (8-bit units), PSNR " << p << " dB, SSIM " << s << "\n";
    if (out_json) {
        json j = {{"mse", m}, {"psnr", p}, {"ssim", s}};
        std::ofstream out(*out_json);
        if (!out) throw uvapm::FormatError("cannot write " + out_json->string());
        out << j.dump(2) << "\n";
    }
    return 0;
}

int cmd_info(const fs::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw uvapm::FormatError("cannot open file: " + path.string());
    char magic[6] = {};
    probe.read(magic, 6);
    const std::string tag(magic, probe.gcount());

    json j;
    if (tag == "UVAPM1") {
        uvapm::UVAPMModel model = uvapm::load_model(path);
        j = {{"type", "uvapm-model"},
             {"resolution", model.resolution()},
             {"rank", model.rank()},
             {"total_coefficients", model.coeff_count()},
             {"samples", model.n_samples}};
    } else if (tag == "UVDET1") {
        uvapm::DetailBasis basis = uvapm::load_detail_basis(path);
        j = {{"type", "detail-basis"},
             {"resolution", basis.resolution()},
             {"rank", basis.rank()},
             {"samples", basis.n_samples}};
    } else if (tag == "UVSHP1") {
        uvapm::LinearShapeModel shape = uvapm::load_shape_model(path);
        j = {{"type", "shape-model"},
             {"vertices", shape.vertex_count()},
             {"identity_dims", shape.id_dims()},
             {"expression_dims", shape.exp_dims()}};
    } else {
        throw uvapm::FormatError("unrecognized file magic in " + path.string());
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"UV albedo parametric model toolkit"};
    app.require_subcommand(1);

    // build-model
    auto* build_model = app.add_subcommand("build-model", "Build the per-channel PCA albedo model");
    fs::path bm_dir, bm_out;
    int bm_k = 100, bm_d = 256;
    build_model->add_option("images", bm_dir, "Directory of UV albedo PNGs")->required();
    build_model->add_option("-k,--rank", bm_k, "Components per channel (default 100)");
    build_model->add_option("-d,--resolution", bm_d, "Model resolution (default 256)");
    build_model->add_option("-o,--out", bm_out, "Output model file")->required();

    // build-detail
    auto* build_detail = app.add_subcommand("build-detail", "Build the V-channel residual detail basis");
    fs::path bd_dir, bd_model, bd_out;
    int bd_m = 64, bd_dd = 512;
    build_detail->add_option("images", bd_dir, "Directory of UV albedo PNGs")->required();
    build_detail->add_option("-m,--rank", bd_m, "Detail components (default 64)");
    build_detail->add_option("--model", bd_model, "Coarse model file")->required();
    build_detail->add_option("--d-detail", bd_dd, "Detail resolution (default 512)");
    build_detail->add_option("-o,--out", bd_out, "Output detail file")->required();

    // generate
    auto* generate = app.add_subcommand("generate", "Decode coefficients into an albedo map");
    fs::path g_model, g_coeffs, g_out;
    std::optional<fs::path> g_detail;
    std::optional<int> g_size;
    generate->add_option("--model", g_model, "Coarse model file")->required();
    generate->add_option("--detail", g_detail, "Detail basis file");
    generate->add_option("--coeffs", g_coeffs, "Coefficients JSON")->required();
    generate->add_option("--size", g_size, "Output resolution override");
    generate->add_option("-o,--out", g_out, "Output PNG")->required();

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Recover coefficients from a single image");
    fs::path f_image, f_landmarks, f_mask, f_shape, f_mesh, f_lmk_idx, f_model, f_detail, f_out;
    std::optional<fs::path> f_skin, f_config;
    std::optional<std::uint64_t> f_seed;
    fit_cmd->add_option("--image", f_image, "Input PNG")->required();
    fit_cmd->add_option("--landmarks", f_landmarks, "68-landmark JSON")->required();
    fit_cmd->add_option("--mask", f_mask, "Mask weights PNG (grayscale)")->required();
    fit_cmd->add_option("--skin", f_skin, "Binary skin indicator PNG");
    fit_cmd->add_option("--shape", f_shape, "Shape model (UVSHP1)")->required();
    fit_cmd->add_option("--mesh", f_mesh, "Mesh OBJ")->required();
    fit_cmd->add_option("--landmark-indices", f_lmk_idx, "68 vertex ids JSON")->required();
    fit_cmd->add_option("--model", f_model, "Coarse albedo model")->required();
    fit_cmd->add_option("--detail", f_detail, "Detail basis")->required();
    fit_cmd->add_option("--config", f_config, "Fit config JSON");
    fit_cmd->add_option("--seed", f_seed, "Seed override");
    fit_cmd->add_option("--out-dir", f_out, "Output directory")->required();

    // render
    auto* render_cmd = app.add_subcommand("render", "Render a posed, shaded face");
    fs::path r_shape, r_mesh, r_params, r_texture, r_out;
    int r_width = 224, r_height = 224;
    render_cmd->add_option("--shape", r_shape, "Shape model (UVSHP1)")->required();
    render_cmd->add_option("--mesh", r_mesh, "Mesh OBJ")->required();
    render_cmd->add_option("--params", r_params, "Coefficients JSON (beta/xi/pose/gamma)")->required();
    render_cmd->add_option("--texture", r_texture, "Albedo PNG")->required();
    render_cmd->add_option("--width", r_width, "Image width (default 224)");
    render_cmd->add_option("--height", r_height, "Image height (default 224)");
    render_cmd->add_option("-o,--out", r_out, "Output PNG")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "MSE / PSNR / SSIM between two images");
    fs::path e_a, e_b;
    std::optional<fs::path> e_json;
    eval_cmd->add_option("a", e_a, "First PNG")->required();
    eval_cmd->add_option("b", e_b, "Second PNG")->required();
    eval_cmd->add_option("--json", e_json, "Write metrics JSON here");

    // info
    auto* info_cmd = app.add_subcommand("info", "Describe a model/detail/shape file");
    fs::path i_path;
    info_cmd->add_option("file", i_path, "Binary model file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build_model->parsed()) return cmd_build_model(bm_dir, bm_k, bm_d, bm_out);
        if (build_detail->parsed()) return cmd_build_detail(bd_dir, bd_model, bd_m, bd_dd, bd_out);
        if (generate->parsed()) return cmd_generate(g_model, g_detail, g_coeffs, g_out, g_size);
        if (fit_cmd->parsed()) {
            return cmd_fit(f_image, f_landmarks, f_mask, f_skin, f_shape, f_mesh, f_lmk_idx,
                           f_model, f_detail, f_config, f_seed, f_out);
        }
        if (render_cmd->parsed()) {
            return cmd_render(r_shape, r_mesh, r_params, r_texture, r_out, r_width, r_height);
        }
        if (eval_cmd->parsed()) return cmd_eval(e_a, e_b, e_json);
        if (info_cmd->parsed()) return cmd_info(i_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
