#pragma once

#include <filesystem>

#include <Eigen/Core>

namespace uvapm {

/// Linear shape model: S = mean + B_id * beta + B_exp * xi, with vertices
/// flattened xyz-interleaved (rows 3v, 3v+1, 3v+2 hold vertex v).
struct LinearShapeModel {
    Eigen::VectorXd mean;      // 3n
    Eigen::MatrixXd id_basis;  // 3n x |beta|
    Eigen::MatrixXd exp_basis; // 3n x |xi|

    int vertex_count() const { return static_cast<int>(mean.size() / 3); }
    int id_dims() const { return static_cast<int>(id_basis.cols()); }
    int exp_dims() const { return static_cast<int>(exp_basis.cols()); }
};

/// Evaluates the linear model and reshapes to n x 3 (one row per vertex).
Eigen::MatrixX3d assemble_shape(const LinearShapeModel& model,
                                const Eigen::VectorXd& beta,
                                const Eigen::VectorXd& xi);

// Binary "UVSHP1" format: magic, u16 version, u32 n, u32 |beta|, u32 |xi|,
// then f32 mean[3n], f32 id_basis (column-major), f32 exp_basis
// (column-major); little-endian.
void save_shape_model(const LinearShapeModel& model, const std::filesystem::path& path);
LinearShapeModel load_shape_model(const std::filesystem::path& path);

} // namespace uvapm
