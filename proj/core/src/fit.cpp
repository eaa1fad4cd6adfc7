#include "uvapm/fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "uvapm/albedo.hpp"
#include "uvapm/errors.hpp"
#include "uvapm/render_grad.hpp"

namespace uvapm {

const char* group_name(CoeffGroup group) {
    switch (group) {
        case CoeffGroup::Beta: return "beta";
        case CoeffGroup::Xi: return "xi";
        case CoeffGroup::Pose: return "pose";
        case CoeffGroup::Gamma: return "gamma";
        case CoeffGroup::AlphaC: return "alpha_c";
        case CoeffGroup::AlphaD: return "alpha_d";
    }
    return "unknown";
}

Eigen::VectorXd& Coefficients::operator[](CoeffGroup group) {
    switch (group) {
        case CoeffGroup::Beta: return beta;
        case CoeffGroup::Xi: return xi;
        case CoeffGroup::Pose: return pose;
        case CoeffGroup::Gamma: return gamma;
        case CoeffGroup::AlphaC: return alpha_c;
        default: return alpha_d;
    }
}

const Eigen::VectorXd& Coefficients::operator[](CoeffGroup group) const {
    return const_cast<Coefficients&>(*this)[group];
}

namespace {

Coefficients zero_like(const Coefficients& c) {
    Coefficients z;
    for (CoeffGroup g : kAllGroups) z[g] = Eigen::VectorXd::Zero(c[g].size());
    return z;
}

} // namespace

void FitConfig::validate() const {
    auto nonneg = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError(std::string("config: ") + name + " must be finite and >= 0");
        }
    };
    nonneg(lambda_pho, "lambda_pho");
    nonneg(lambda_lmk, "lambda_lmk");
    nonneg(lambda_id, "lambda_id");
    nonneg(lambda_mfc, "lambda_mfc");
    nonneg(reg.beta, "reg.beta");
    nonneg(reg.xi, "reg.xi");
    nonneg(reg.gamma, "reg.gamma");
    nonneg(reg.alpha_c, "reg.alpha_c");
    nonneg(reg.alpha_d, "reg.alpha_d");
    for (int it : stage_iterations) {
        if (it < 0) throw ConfigError("config: stage iterations must be >= 0");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("config: learning_rate must be positive");
    }
    if (!(lr_decay > 0.0) || lr_decay > 1.0) {
        throw ConfigError("config: lr_decay must be in (0, 1]");
    }
    if (image_size <= 0) throw ConfigError("config: image_size must be positive");
    if (refresh_every <= 0) throw ConfigError("config: refresh_every must be positive");
}

// ---- config JSON -------------------------------------------------------

FitConfig load_fit_config_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("config: invalid JSON in " + path.string() + ": " + e.what());
    }

    static const std::array<const char*, 14> known = {
        "lambda_pho", "lambda_lmk", "lambda_id", "lambda_mfc", "reg",
        "stage_iterations", "learning_rate", "lr_decay", "adam", "seed",
        "image_size", "refresh_every", "squared_photometric", "joint_alpha_c_stage3"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find_if(known.begin(), known.end(), [&](const char* k) {
                return it.key() == k;
            }) == known.end()) {
            throw FormatError("config: unknown key '" + it.key() + "' in " + path.string());
        }
    }

    FitConfig cfg;
    auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = j[key].get<std::decay_t<decltype(slot)>>();
    };
    get("lambda_pho", cfg.lambda_pho);
    get("lambda_lmk", cfg.lambda_lmk);
    get("lambda_id", cfg.lambda_id);
    get("lambda_mfc", cfg.lambda_mfc);
    if (j.contains("reg")) {
        const auto& r = j["reg"];
        auto getr = [&](const char* key, double& slot) {
            if (r.contains(key)) slot = r[key].get<double>();
        };
        getr("beta", cfg.reg.beta);
        getr("xi", cfg.reg.xi);
        getr("gamma", cfg.reg.gamma);
        getr("alpha_c", cfg.reg.alpha_c);
        getr("alpha_d", cfg.reg.alpha_d);
    }
    if (j.contains("stage_iterations")) {
        const auto& s = j["stage_iterations"];
        if (!s.is_array() || s.size() != 3) {
            throw FormatError("config: stage_iterations must be an array of 3 counts");
        }
        for (int i = 0; i < 3; ++i) cfg.stage_iterations[i] = s[i].get<int>();
    }
    get("learning_rate", cfg.learning_rate);
    get("lr_decay", cfg.lr_decay);
    if (j.contains("adam")) {
        const auto& a = j["adam"];
        if (a.contains("beta1")) cfg.adam.beta1 = a["beta1"].get<double>();
        if (a.contains("beta2")) cfg.adam.beta2 = a["beta2"].get<double>();
        if (a.contains("epsilon")) cfg.adam.epsilon = a["epsilon"].get<double>();
    }
    get("seed", cfg.seed);
    get("image_size", cfg.image_size);
    get("refresh_every", cfg.refresh_every);
    get("squared_photometric", cfg.squared_photometric);
    get("joint_alpha_c_stage3", cfg.joint_alpha_c_stage3);

    cfg.validate();
    return cfg;
}

void save_fit_config_json(const FitConfig& config, const std::filesystem::path& path) {
    nlohmann::json j;
    j["lambda_pho"] = config.lambda_pho;
    j["lambda_lmk"] = config.lambda_lmk;
    j["lambda_id"] = config.lambda_id;
    j["lambda_mfc"] = config.lambda_mfc;
    j["reg"] = {{"beta", config.reg.beta},
                {"xi", config.reg.xi},
                {"gamma", config.reg.gamma},
                {"alpha_c", config.reg.alpha_c},
                {"alpha_d", config.reg.alpha_d}};
    j["stage_iterations"] = config.stage_iterations;
    j["learning_rate"] = config.learning_rate;
    j["lr_decay"] = config.lr_decay;
    j["adam"] = {{"beta1", config.adam.beta1},
                 {"beta2", config.adam.beta2},
                 {"epsilon", config.adam.epsilon}};
    j["seed"] = config.seed;
    j["image_size"] = config.image_size;
    j["refresh_every"] = config.refresh_every;
    j["squared_photometric"] = config.squared_photometric;
    j["joint_alpha_c_stage3"] = config.joint_alpha_c_stage3;

    std::ofstream out(path);
    if (!out) throw FormatError("cannot write config file: " + path.string());
    out << j.dump(2) << "\n";
}

// ---- initialization ----------------------------------------------------

PoseCoeffs align_pose_to_landmarks(const LinearShapeModel& shape, const FaceMesh& mesh,
                                   const LandmarkSet& landmarks, const Viewport& viewport) {
    if (mesh.landmark_indices.size() != 68) {
        throw InvalidInputError("align_pose_to_landmarks: mesh has no 68 landmark indices");
    }

    // Mean-shape landmark xy (rotation assumed zero) vs landmarks pulled
    // back into the projection plane.
    Eigen::MatrixX2d src(68, 2), dst(68, 2);
    for (int i = 0; i < 68; ++i) {
        const int v = mesh.landmark_indices[i];
        src(i, 0) = shape.mean[3 * v + 0];
        src(i, 1) = shape.mean[3 * v + 1];
        dst.row(i) = viewport
                         .from_pixels({landmarks.points(i, 0), landmarks.points(i, 1)})
                         .transpose();
    }

    const Eigen::RowVector2d src_centroid = src.colwise().mean();
    const Eigen::RowVector2d dst_centroid = dst.colwise().mean();
    src.rowwise() -= src_centroid;
    dst.rowwise() -= dst_centroid;

    const double denom = src.squaredNorm();
    double scale = 1.0;
    if (denom > 1e-300) {
        scale = (src.array() * dst.array()).sum() / denom;
    }
    scale = std::max(scale, 1e-6);

    PoseCoeffs pose;
    pose.scale = scale;
    pose.translation.x() = dst_centroid.x() - scale * src_centroid.x();
    pose.translation.y() = dst_centroid.y() - scale * src_centroid.y();
    pose.translation.z() = 0.0;
    return pose;
}

FitState make_initial_state(const FitAssets& assets, const LandmarkSet& landmarks,
                            const Viewport& viewport) {
    FitState state;
    state.coeffs.beta = Eigen::VectorXd::Zero(assets.shape->id_dims());
    state.coeffs.xi = Eigen::VectorXd::Zero(assets.shape->exp_dims());
    state.coeffs.pose =
        align_pose_to_landmarks(*assets.shape, *assets.mesh, landmarks, viewport).to_vector();
    state.coeffs.gamma = Eigen::VectorXd::Zero(27);
    state.coeffs.alpha_c = Eigen::VectorXd::Zero(assets.albedo_model->coeff_count());
    state.coeffs.alpha_d = Eigen::VectorXd::Zero(assets.detail_basis ? assets.detail_basis->rank() : 0);
    for (size_t g = 0; g < kAllGroups.size(); ++g) {
        state.adam[g].reset(state.coeffs[kAllGroups[g]].size());
    }
    return state;
}

// ---- losses ------------------------------------------------------------

RegResult reg_loss(const Coefficients& coeffs, const RegWeights& weights) {
    RegResult res;
    res.gradients = zero_like(coeffs);
    const std::array<std::pair<CoeffGroup, double>, 5> terms = {{
        {CoeffGroup::Beta, weights.beta},
        {CoeffGroup::Xi, weights.xi},
        {CoeffGroup::Gamma, weights.gamma},
        {CoeffGroup::AlphaC, weights.alpha_c},
        {CoeffGroup::AlphaD, weights.alpha_d},
    }};
    for (const auto& [group, w] : terms) {
        const Eigen::VectorXd& x = coeffs[group];
        res.loss += w * x.squaredNorm();
        res.gradients[group] = 2.0 * w * x;
    }
    return res;
}

UVImage build_albedo(const FitAssets& assets, const Coefficients& coeffs, TextureMode mode) {
    const UVAPMModel& model = *assets.albedo_model;
    switch (mode) {
        case TextureMode::MeanAlbedo:
            return decode_coarse(model, CoarseCoeffs::zero(model.rank()));
        case TextureMode::Coarse:
            return decode_coarse(model, CoarseCoeffs(coeffs.alpha_c));
        case TextureMode::Fused: {
            const DetailBasis& detail = *assets.detail_basis;
            return fuse(decode_coarse(model, CoarseCoeffs(coeffs.alpha_c)),
                        decode_detail(detail, DetailCoeffs(coeffs.alpha_d)));
        }
    }
    throw InvalidInputError("build_albedo: unknown texture mode");
}

namespace {

// Landmark-path chain rule: pixel-space point adjoints back to pose, beta,
// and xi. Everything here is smooth; rasterization is never involved.
void landmark_chain(const FitAssets& assets, const Coefficients& coeffs,
                    const Eigen::MatrixX2d& point_adjoint, const Viewport& viewport,
                    Coefficients& grads) {
    const LinearShapeModel& shape = *assets.shape;
    const std::vector<int>& lmk = assets.mesh->landmark_indices;
    const PoseCoeffs pose = coeffs.pose_coeffs();

    const Eigen::Matrix3d rot = euler_to_rotation(pose.pitch, pose.yaw, pose.roll);
    const std::array<Eigen::Matrix3d, 3> drot = {
        euler_rotation_derivative(pose.pitch, pose.yaw, pose.roll, 0),
        euler_rotation_derivative(pose.pitch, pose.yaw, pose.roll, 1),
        euler_rotation_derivative(pose.pitch, pose.yaw, pose.roll, 2),
    };

    const double half_w = viewport.width * 0.5;
    const double half_h = viewport.height * 0.5;

    for (int i = 0; i < 68; ++i) {
        const int v = lmk[i];
        Eigen::RowVector3d s = Eigen::RowVector3d(shape.mean[3 * v], shape.mean[3 * v + 1],
                                                  shape.mean[3 * v + 2]);
        if (coeffs.beta.size() > 0) {
            s += (shape.id_basis.middleRows(3 * v, 3) * coeffs.beta).transpose();
        }
        if (coeffs.xi.size() > 0) {
            s += (shape.exp_basis.middleRows(3 * v, 3) * coeffs.xi).transpose();
        }

        // d(pixel)/d(plane) = diag(W/2, -H/2); fold it into the adjoint.
        const Eigen::Vector2d g_plane(point_adjoint(i, 0) * half_w,
                                      -point_adjoint(i, 1) * half_h);

        const Eigen::RowVector3d s_rot = s * rot;
        grads.pose[0] += s_rot.x() * g_plane.x() + s_rot.y() * g_plane.y(); // d/df
        grads.pose[1] += g_plane.x();                                       // d/dtx
        grads.pose[2] += g_plane.y();                                       // d/dty
        // t_z never reaches the image; grads.pose[3] stays 0.
        for (int a = 0; a < 3; ++a) {
            const Eigen::RowVector3d s_d = s * drot[a];
            grads.pose[4 + a] +=
                pose.scale * (s_d.x() * g_plane.x() + s_d.y() * g_plane.y());
        }

        // w = f * R[:,0:2] * g_plane pulls the plane adjoint back to the
        // vertex, and the basis rows take it to the coefficients.
        const Eigen::Vector3d w = pose.scale * (rot.leftCols<2>() * g_plane);
        if (coeffs.beta.size() > 0) {
            grads.beta.noalias() += shape.id_basis.middleRows(3 * v, 3).transpose() * w;
        }
        if (coeffs.xi.size() > 0) {
            grads.xi.noalias() += shape.exp_basis.middleRows(3 * v, 3).transpose() * w;
        }
    }
}

Eigen::MatrixX2d project_landmarks(const FitAssets& assets, const Coefficients& coeffs,
                                   const Viewport& viewport) {
    const LinearShapeModel& shape = *assets.shape;
    const std::vector<int>& lmk = assets.mesh->landmark_indices;
    const PoseCoeffs pose = coeffs.pose_coeffs();
    const Eigen::Matrix3d rot = euler_to_rotation(pose.pitch, pose.yaw, pose.roll);

    Eigen::MatrixX2d out(68, 2);
    for (int i = 0; i < 68; ++i) {
        const int v = lmk[i];
        Eigen::RowVector3d s = Eigen::RowVector3d(shape.mean[3 * v], shape.mean[3 * v + 1],
                                                  shape.mean[3 * v + 2]);
        if (coeffs.beta.size() > 0) {
            s += (shape.id_basis.middleRows(3 * v, 3) * coeffs.beta).transpose();
        }
        if (coeffs.xi.size() > 0) {
            s += (shape.exp_basis.middleRows(3 * v, 3) * coeffs.xi).transpose();
        }
        Eigen::RowVector3d view = pose.scale * (s * rot);
        view += pose.translation.transpose();
        out.row(i) = viewport.to_pixels({view.x(), view.y()}).transpose();
    }
    return out;
}

} // namespace

TotalLossResult total_loss(const FitAssets& assets, const Coefficients& coeffs,
                           const UVImage& image, const LandmarkSet& landmarks,
                           const FaceMask& mask, const RenderBuffers& frozen,
                           const NormalMap& normal_map, TextureMode mode,
                           const FitConfig& config) {
    if (config.lambda_mfc > 0.0) {
        throw ConfigError("total_loss: lambda_mfc > 0 requires the multi-view API "
                          "(mfc_swap_loss); single-view fits must leave it at 0");
    }
    if (config.lambda_id > 0.0 && assets.embedder == nullptr) {
        throw ConfigError("total_loss: lambda_id > 0 but no embedding provider is set");
    }

    TotalLossResult res;
    res.gradients = zero_like(coeffs);

    const UVAPMModel& model = *assets.albedo_model;
    const SHCoeffs gamma = coeffs.sh_coeffs();

    // Forward texture pipeline, keeping the intermediates the backward
    // passes need.
    UVImage albedo;
    UVImage coarse_up;        // Fused only
    ChannelPlane detail_plane; // Fused only
    if (mode == TextureMode::Fused) {
        UVImage coarse = decode_coarse(model, CoarseCoeffs(coeffs.alpha_c));
        const int dd = assets.detail_basis->resolution();
        coarse_up = resize_bilinear(coarse, dd, dd);
        detail_plane = decode_detail(*assets.detail_basis, DetailCoeffs(coeffs.alpha_d));
        albedo = fuse(coarse_up, detail_plane);
    } else {
        albedo = build_albedo(assets, coeffs, mode);
    }
    UVImage texture = shade(albedo, gamma, normal_map);
    res.rendered = resample_image(frozen, texture);

    const Viewport viewport{frozen.width, frozen.height};

    // Photometric term and its chain back to gamma / albedo coefficients.
    if (config.lambda_pho > 0.0) {
        PhotometricResult pho =
            photometric_loss(image, res.rendered, mask, config.squared_photometric);
        res.losses.photometric = pho.loss;

        for (double& v : pho.render_adjoint.data) v *= config.lambda_pho;
        UVImage texture_adj =
            texture_adjoint(frozen, pho.render_adjoint, texture.width, texture.height);
        ShadeBackward shade_adj = shade_backward(albedo, gamma, normal_map, texture_adj);

        for (int c = 0; c < 3; ++c)
            for (int k = 0; k < 9; ++k) res.gradients.gamma[c * 9 + k] += shade_adj.gamma_grad(c, k);

        switch (mode) {
            case TextureMode::MeanAlbedo:
                break; // albedo fixed at the mean
            case TextureMode::Coarse:
                res.gradients.alpha_c += decode_coarse_adjoint(model, shade_adj.albedo_adjoint);
                break;
            case TextureMode::Fused: {
                FuseBackward fb = fuse_backward(coarse_up, detail_plane, shade_adj.albedo_adjoint);
                res.gradients.alpha_d += decode_detail_adjoint(*assets.detail_basis, fb.detail_adjoint);
                UVImage coarse_adj =
                    resize_bilinear_adjoint(fb.coarse_adjoint, model.resolution(), model.resolution());
                res.gradients.alpha_c += decode_coarse_adjoint(model, coarse_adj);
                break;
            }
        }
    }

    // Landmark term; the only path that moves pose and shape.
    if (config.lambda_lmk > 0.0) {
        Eigen::MatrixX2d projected = project_landmarks(assets, coeffs, viewport);
        LandmarkLossResult lmk = landmark_loss(landmarks, projected);
        res.losses.landmark = lmk.loss;
        lmk.point_adjoint *= config.lambda_lmk;
        landmark_chain(assets, coeffs, lmk.point_adjoint, viewport, res.gradients);
    }

    if (config.lambda_id > 0.0) {
        res.losses.identity = identity_loss(*assets.embedder, image, res.rendered);
    }

    RegResult reg = reg_loss(coeffs, config.reg);
    res.losses.regularization = reg.loss;
    for (CoeffGroup g : kAllGroups) res.gradients[g] += reg.gradients[g];

    res.losses.total = config.lambda_pho * res.losses.photometric +
                       config.lambda_lmk * res.losses.landmark +
                       config.lambda_id * res.losses.identity +
                       res.losses.regularization;
    return res;
}

// ---- the three-stage loop ----------------------------------------------

namespace {

struct StageSpec {
    const char* name;
    TextureMode mode;
    std::vector<CoeffGroup> active;
    int iterations;
    int map_resolution;
};

void check_assets(const FitAssets& assets) {
    if (!assets.shape || !assets.mesh || !assets.albedo_model || !assets.detail_basis) {
        throw InvalidInputError("fit: shape, mesh, albedo model and detail basis are required");
    }
    if (assets.mesh->landmark_indices.size() != 68) {
        throw InvalidInputError("fit: mesh must carry 68 landmark indices");
    }
    if (assets.mesh->vertex_count() != assets.shape->vertex_count()) {
        throw InvalidInputError("fit: mesh vertex count does not match shape model");
    }
}

} // namespace

FitResult fit(const UVImage& image, const LandmarkSet& landmarks, const FaceMask& mask,
              const FitAssets& assets, const FitConfig& config) {
    config.validate();
    check_assets(assets);
    if (mask.width() != image.width || mask.height() != image.height) {
        throw InvalidInputError("fit: mask dimensions differ from image");
    }
    double skin_total = 0.0;
    for (double g : mask.skin.data) skin_total += g;
    if (skin_total <= 0.0) throw EmptyMaskError("fit: mask selects no skin pixels");
    if (config.lambda_id > 0.0 && assets.embedder == nullptr) {
        throw ConfigError("fit: lambda_id > 0 but no embedding provider is set");
    }

    const Viewport viewport{image.width, image.height};
    FitResult result;
    result.state = make_initial_state(assets, landmarks, viewport);
    Coefficients& coeffs = result.state.coeffs;

    const int d_model = assets.albedo_model->resolution();
    const int d_detail = assets.detail_basis->resolution();

    std::vector<CoeffGroup> stage3_groups = {CoeffGroup::AlphaD};
    if (config.joint_alpha_c_stage3) stage3_groups.push_back(CoeffGroup::AlphaC);

    const std::array<StageSpec, 3> stages = {{
        {"pose-shape-lighting",
         TextureMode::MeanAlbedo,
         {CoeffGroup::Pose, CoeffGroup::Beta, CoeffGroup::Xi, CoeffGroup::Gamma},
         config.stage_iterations[0],
         d_model},
        {"coarse-albedo", TextureMode::Coarse, {CoeffGroup::AlphaC},
         config.stage_iterations[1], d_model},
        {"detail", TextureMode::Fused, stage3_groups, config.stage_iterations[2], d_detail},
    }};

    AdamParams adam = config.adam;

    for (size_t stage_idx = 0; stage_idx < stages.size(); ++stage_idx) {
        const StageSpec& stage = stages[stage_idx];
        StageReport& report = result.report.stages[stage_idx];
        report.name = stage.name;
        report.iterations = stage.iterations;

        if (stage.iterations == 0) {
            result.state.loss_history.emplace_back();
            continue;
        }

        for (CoeffGroup g : stage.active) {
            result.state.adam[static_cast<size_t>(g)].reset(coeffs[g].size());
        }

        RenderBuffers buffers;
        NormalMap normal_map;
        Coefficients best = coeffs;
        double best_loss = std::numeric_limits<double>::infinity();
        std::vector<double> curve;
        curve.reserve(stage.iterations + 1);

        double lr = config.learning_rate;
        for (int iter = 0; iter < stage.iterations; ++iter) {
            if (iter % config.refresh_every == 0) {
                Eigen::MatrixX3d vertices = assemble_shape(*assets.shape, coeffs.beta, coeffs.xi);
                Eigen::MatrixX3d normals = vertex_normals(vertices, assets.mesh->triangles);
                normal_map = bake_normals_uv(*assets.mesh, normals, stage.map_resolution);
                UVImage texture =
                    shade(build_albedo(assets, coeffs, stage.mode), coeffs.sh_coeffs(), normal_map);
                buffers = render(vertices, *assets.mesh, texture, coeffs.pose_coeffs(),
                                 image.width, image.height);
            }

            TotalLossResult eval;
            try {
                eval = total_loss(assets, coeffs, image, landmarks, mask, buffers, normal_map,
                                  stage.mode, config);
            } catch (const Error& e) {
                throw FitError("fit: stage '" + std::string(stage.name) + "' iteration " +
                               std::to_string(iter) + ": " + e.what());
            }
            if (!std::isfinite(eval.losses.total)) {
                throw FitError("fit: stage '" + std::string(stage.name) + "' iteration " +
                               std::to_string(iter) + ": non-finite loss");
            }
            curve.push_back(eval.losses.total);
            if (eval.losses.total < best_loss) {
                best_loss = eval.losses.total;
                best = coeffs;
            }

            adam.learning_rate = lr;
            for (CoeffGroup g : stage.active) {
                adam_step(coeffs[g], eval.gradients[g],
                          result.state.adam[static_cast<size_t>(g)], adam, group_name(g));
            }
            // Scale must stay strictly positive for the projection to make sense.
            coeffs.pose[0] = std::max(coeffs.pose[0], 1e-6);
            lr *= config.lr_decay;
            result.state.step += 1;
        }

        coeffs = best;
        curve.push_back(best_loss);
        report.loss_curve = curve;
        report.initial_loss = curve.front();
        report.final_loss = curve.back();
        result.state.loss_history.push_back(std::move(curve));
    }

    // Final full-detail render and loss breakdown at the converged state.
    {
        Eigen::MatrixX3d vertices = assemble_shape(*assets.shape, coeffs.beta, coeffs.xi);
        Eigen::MatrixX3d normals = vertex_normals(vertices, assets.mesh->triangles);
        NormalMap normal_map = bake_normals_uv(*assets.mesh, normals, d_detail);
        UVImage texture =
            shade(build_albedo(assets, coeffs, TextureMode::Fused), coeffs.sh_coeffs(), normal_map);
        RenderBuffers buffers = render(vertices, *assets.mesh, texture, coeffs.pose_coeffs(),
                                       image.width, image.height);
        TotalLossResult final_eval = total_loss(assets, coeffs, image, landmarks, mask, buffers,
                                                normal_map, TextureMode::Fused, config);
        result.report.final_losses = final_eval.losses;
        result.rendered = std::move(final_eval.rendered);
    }
    return result;
}

void save_fit_report_json(const FitResult& result, const std::filesystem::path& path) {
    nlohmann::json j;
    j["stages"] = nlohmann::json::array();
    for (const StageReport& s : result.report.stages) {
        j["stages"].push_back({{"name", s.name},
                               {"iterations", s.iterations},
                               {"initial_loss", s.initial_loss},
                               {"final_loss", s.final_loss},
                               {"loss_curve", s.loss_curve}});
    }
    const LossBreakdown& f = result.report.final_losses;
    j["final_losses"] = {{"total", f.total},
                         {"photometric", f.photometric},
                         {"landmark", f.landmark},
                         {"identity", f.identity},
                         {"mfc", f.mfc},
                         {"regularization", f.regularization}};

    const Coefficients& c = result.state.coeffs;
    auto vec = [](const Eigen::VectorXd& v) {
        return std::vector<double>(v.begin(), v.end());
    };
    const PoseCoeffs pose = c.pose_coeffs();
    j["coefficients"] = {
        {"beta", vec(c.beta)},
        {"xi", vec(c.xi)},
        {"pose",
         {{"scale", pose.scale},
          {"translation", {pose.translation.x(), pose.translation.y(), pose.translation.z()}},
          {"euler", {pose.pitch, pose.yaw, pose.roll}}}},
        {"gamma", vec(c.gamma)},
        {"alpha_c", vec(c.alpha_c)},
        {"alpha_d", vec(c.alpha_d)},
    };

    std::ofstream out(path);
    if (!out) throw FormatError("cannot write report file: " + path.string());
    out << j.dump(2) << "\n";
}

// ---- multi-view feature consistency -------------------------------------

std::pair<int, int> mfc_select_pair(int n_views, std::mt19937_64& rng) {
    if (n_views < 2) {
        throw InvalidInputError("mfc_select_pair: need at least 2 views, got " +
                                std::to_string(n_views));
    }
    const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(n_views));
    const int j =
        (i + 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n_views - 1))) % n_views;
    return {i, j};
}

Coefficients mfc_swap(const Coefficients& view_i, const Coefficients& view_j) {
    Coefficients swapped = view_i;
    swapped.beta = view_j.beta;
    swapped.xi = view_j.xi;
    return swapped;
}

double mfc_swap_loss(const FitAssets& assets, const ViewObservation& view_i,
                     const Coefficients& coeffs_i, const Coefficients& coeffs_j,
                     const FitConfig& config) {
    check_assets(assets);
    if (!view_i.image || !view_i.landmarks || !view_i.mask) {
        throw InvalidInputError("mfc_swap_loss: incomplete view observation");
    }

    const Coefficients swapped = mfc_swap(coeffs_i, coeffs_j);
    const Viewport viewport{view_i.image->width, view_i.image->height};

    // Geometry uses the swapped identity/expression; the texture keeps view
    // i's albedo, lighting, and normal map.
    Eigen::MatrixX3d swapped_vertices =
        assemble_shape(*assets.shape, swapped.beta, swapped.xi);
    Eigen::MatrixX3d own_vertices = assemble_shape(*assets.shape, coeffs_i.beta, coeffs_i.xi);
    Eigen::MatrixX3d own_normals = vertex_normals(own_vertices, assets.mesh->triangles);
    NormalMap normal_map =
        bake_normals_uv(*assets.mesh, own_normals, assets.albedo_model->resolution());

    UVImage texture = shade(build_albedo(assets, coeffs_i, TextureMode::Coarse),
                            coeffs_i.sh_coeffs(), normal_map);
    RenderBuffers buffers = render(swapped_vertices, *assets.mesh, texture,
                                   swapped.pose_coeffs(), viewport.width, viewport.height);

    double loss = 0.0;
    if (config.lambda_pho > 0.0) {
        loss += config.lambda_pho *
                photometric_loss(*view_i.image, buffers.image, *view_i.mask,
                                 config.squared_photometric)
                    .loss;
    }
    if (config.lambda_lmk > 0.0) {
        Eigen::MatrixX2d projected = project_landmarks(assets, swapped, viewport);
        loss += config.lambda_lmk * landmark_loss(*view_i.landmarks, projected).loss;
    }
    return loss;
}

} // namespace uvapm
