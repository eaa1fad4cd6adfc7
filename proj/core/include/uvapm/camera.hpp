#pragma once

#include <Eigen/Core>

namespace uvapm {

/// Weak-perspective pose: uniform scale, translation, and Euler angles.
/// t_z never reaches the image (depth is dropped after translation) but is
/// kept so the coefficient vector matches the seven-parameter pose layout.
struct PoseCoeffs {
    double scale = 1.0;                              // f, must stay > 0
    Eigen::Vector3d translation{0.0, 0.0, 0.0};      // t
    double pitch = 0.0, yaw = 0.0, roll = 0.0;       // radians

    // Packing order: (f, tx, ty, tz, pitch, yaw, roll).
    Eigen::Matrix<double, 7, 1> to_vector() const;
    static PoseCoeffs from_vector(const Eigen::Matrix<double, 7, 1>& v);
};

/// Rotation applied to row vectors (p' = p * R), composed intrinsically
/// x -> y -> z: R = R_z(roll) * R_y(yaw) * R_x(pitch). With this convention
/// yaw = +pi/2 takes (1,0,0) to (0,0,-1).
Eigen::Matrix3d euler_to_rotation(double pitch, double yaw, double roll);

/// d(rotation)/d(angle) for axis 0 = pitch, 1 = yaw, 2 = roll.
Eigen::Matrix3d euler_rotation_derivative(double pitch, double yaw, double roll, int axis);

/// View-space vertices: f * (S * R) + t, row-vector convention. The z
/// column is the depth used by the rasterizer (larger z = closer).
Eigen::MatrixX3d view_transform(const Eigen::MatrixX3d& vertices, const PoseCoeffs& pose);

/// Weak-perspective projection p = (f * S * R + t) * Pi, dropping z.
/// Output is in the model's image plane, not pixels.
Eigen::MatrixX2d project(const Eigen::MatrixX3d& vertices, const PoseCoeffs& pose);

/// Maps plane coordinates x,y in [-1,1] to pixel centers, row 0 at the top:
/// px = (x+1) * W/2 - 0.5, py = (1-y) * H/2 - 0.5.
struct Viewport {
    int width = 0;
    int height = 0;

    Eigen::Vector2d to_pixels(const Eigen::Vector2d& plane) const {
        return {(plane.x() + 1.0) * width * 0.5 - 0.5,
                (1.0 - plane.y()) * height * 0.5 - 0.5};
    }
    Eigen::Vector2d from_pixels(const Eigen::Vector2d& px) const {
        return {(px.x() + 0.5) * 2.0 / width - 1.0,
                1.0 - (px.y() + 0.5) * 2.0 / height};
    }
};

/// project + viewport in one call; used for landmarks and rasterization.
Eigen::MatrixX2d project_to_pixels(const Eigen::MatrixX3d& vertices, const PoseCoeffs& pose,
                                   const Viewport& viewport);

} // namespace uvapm
