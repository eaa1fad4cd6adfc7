#pragma once

#include <array>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uvapm/adam.hpp"
#include "uvapm/camera.hpp"
#include "uvapm/image.hpp"
#include "uvapm/losses.hpp"
#include "uvapm/mesh.hpp"
#include "uvapm/model.hpp"
#include "uvapm/normals.hpp"
#include "uvapm/rasterizer.hpp"
#include "uvapm/sh.hpp"
#include "uvapm/shape_model.hpp"

namespace uvapm {

enum class CoeffGroup { Beta = 0, Xi, Pose, Gamma, AlphaC, AlphaD };
inline constexpr std::array<CoeffGroup, 6> kAllGroups = {
    CoeffGroup::Beta, CoeffGroup::Xi, CoeffGroup::Pose,
    CoeffGroup::Gamma, CoeffGroup::AlphaC, CoeffGroup::AlphaD};
const char* group_name(CoeffGroup group);

/// One vector per coefficient group. Pose packs as
/// (f, tx, ty, tz, pitch, yaw, roll); gamma as 27 channel-major values.
struct Coefficients {
    Eigen::VectorXd beta;
    Eigen::VectorXd xi;
    Eigen::VectorXd pose;
    Eigen::VectorXd gamma;
    Eigen::VectorXd alpha_c;
    Eigen::VectorXd alpha_d;

    Eigen::VectorXd& operator[](CoeffGroup group);
    const Eigen::VectorXd& operator[](CoeffGroup group) const;

    PoseCoeffs pose_coeffs() const { return PoseCoeffs::from_vector(pose); }
    SHCoeffs sh_coeffs() const { return SHCoeffs::from_vector(gamma); }
};

/// Per-group L2 regularizer weights. Pose is never regularized.
struct RegWeights {
    double beta = 1e-4;
    double xi = 1e-4;
    double gamma = 1e-5;
    double alpha_c = 1e-4;
    double alpha_d = 1e-3;
};

struct FitConfig {
    double lambda_pho = 1.0;
    double lambda_lmk = 2e-3;
    double lambda_id = 0.0;  // needs an EmbeddingProvider when > 0
    double lambda_mfc = 0.0; // multi-view only
    RegWeights reg;
    std::array<int, 3> stage_iterations = {200, 200, 100};
    double learning_rate = 1e-2;
    double lr_decay = 0.99; // multiplicative, per iteration within a stage
    AdamParams adam;        // learning_rate here is ignored; see learning_rate
    std::uint64_t seed = 0;
    int image_size = 224;
    int refresh_every = 10; // correspondence refresh cadence R
    bool squared_photometric = false;
    bool joint_alpha_c_stage3 = false;

    void validate() const; // throws ConfigError
};

FitConfig load_fit_config_json(const std::filesystem::path& path);
void save_fit_config_json(const FitConfig& config, const std::filesystem::path& path);

/// Everything a fit needs besides the observation itself.
struct FitAssets {
    const LinearShapeModel* shape = nullptr;
    const FaceMesh* mesh = nullptr;
    const UVAPMModel* albedo_model = nullptr;
    const DetailBasis* detail_basis = nullptr;
    const EmbeddingProvider* embedder = nullptr; // optional
};

/// Optimizable state: all coefficient groups plus per-group Adam moments,
/// a step counter, and the per-stage loss history.
struct FitState {
    Coefficients coeffs;
    std::array<AdamMoments, 6> adam;
    int step = 0;
    std::vector<std::vector<double>> loss_history;
};

/// Zero coefficients, with pose initialized by a closed-form similarity
/// alignment (scale + image-plane translation, no rotation) of the mean
/// shape's landmark projections to the observed landmarks.
FitState make_initial_state(const FitAssets& assets, const LandmarkSet& landmarks,
                            const Viewport& viewport);

PoseCoeffs align_pose_to_landmarks(const LinearShapeModel& shape, const FaceMesh& mesh,
                                   const LandmarkSet& landmarks, const Viewport& viewport);

/// Which albedo feeds the shaded texture.
enum class TextureMode {
    MeanAlbedo, // stage 1: model mean, no albedo gradient
    Coarse,     // stage 2: decode_coarse(alpha_c) at the model resolution
    Fused,      // stage 3: coarse + V detail at the detail resolution
};

/// Builds the albedo for a texture mode (mean, coarse, or fused).
UVImage build_albedo(const FitAssets& assets, const Coefficients& coeffs, TextureMode mode);

struct LossBreakdown {
    double total = 0.0;
    double photometric = 0.0;
    double landmark = 0.0;
    double identity = 0.0;
    double mfc = 0.0;
    double regularization = 0.0;
};

/// Sum of per-group weighted squared norms over beta, xi, gamma, alpha_c,
/// alpha_d, with gradients (2 * w * x per group; pose untouched).
struct RegResult {
    double loss = 0.0;
    Coefficients gradients;
};
RegResult reg_loss(const Coefficients& coeffs, const RegWeights& weights);

struct TotalLossResult {
    LossBreakdown losses;
    Coefficients gradients;
    UVImage rendered;
};

/// Weighted sum of the active losses with gradients per coefficient group.
/// Photometric gradients flow through the frozen correspondence buffers to
/// gamma and the albedo coefficients; pose/shape gradients flow only
/// through the (smooth) landmark projection path.
TotalLossResult total_loss(const FitAssets& assets, const Coefficients& coeffs,
                           const UVImage& image, const LandmarkSet& landmarks,
                           const FaceMask& mask, const RenderBuffers& frozen,
                           const NormalMap& normal_map, TextureMode mode,
                           const FitConfig& config);

struct StageReport {
    std::string name;
    int iterations = 0;
    std::vector<double> loss_curve; // one entry per evaluation; last = best
    double initial_loss = 0.0;
    double final_loss = 0.0;
};

struct FitReport {
    std::array<StageReport, 3> stages;
    LossBreakdown final_losses;
};

struct FitResult {
    FitState state;
    FitReport report;
    UVImage rendered; // final full-detail render
};

/// Three-stage coefficient recovery from one image. Deterministic for a
/// fixed config. Stage 1 fits pose/shape/lighting against landmarks plus
/// the mean-albedo photometric term; stage 2 fits the coarse albedo
/// coefficients; stage 3 fits the detail coefficients (optionally jointly
/// refining alpha_c). Correspondence buffers refresh every
/// config.refresh_every iterations, and each stage keeps its best iterate.
FitResult fit(const UVImage& image, const LandmarkSet& landmarks, const FaceMask& mask,
              const FitAssets& assets, const FitConfig& config);

void save_fit_report_json(const FitResult& result, const std::filesystem::path& path);

// ---- Multi-view feature consistency ----------------------------------

struct ViewObservation {
    const UVImage* image = nullptr;
    const LandmarkSet* landmarks = nullptr;
    const FaceMask* mask = nullptr;
};

/// Uniform random ordered pair (i, j), i != j unless there is one view.
std::pair<int, int> mfc_select_pair(int n_views, std::mt19937_64& rng);

/// View j's identity and expression with view i's pose, lighting and albedo.
Coefficients mfc_swap(const Coefficients& view_i, const Coefficients& view_j);

/// Photometric + landmark loss of view i rendered with the swapped
/// coefficients; the texture keeps view i's albedo, lighting, and normals.
double mfc_swap_loss(const FitAssets& assets, const ViewObservation& view_i,
                     const Coefficients& coeffs_i, const Coefficients& coeffs_j,
                     const FitConfig& config);

} // namespace uvapm
