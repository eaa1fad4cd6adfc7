#include "uvapm/camera.hpp"

#include <cmath>

#include "uvapm/errors.hpp"

namespace uvapm {

namespace {

// Row-vector forms (transposes of the usual column-acting matrices).
Eigen::Matrix3d rot_x(double a) {
    double c = std::cos(a), s = std::sin(a);
    Eigen::Matrix3d r;
    r << 1, 0, 0,
         0, c, s,
         0, -s, c;
    return r;
}

Eigen::Matrix3d rot_y(double a) {
    double c = std::cos(a), s = std::sin(a);
    Eigen::Matrix3d r;
    r << c, 0, -s,
         0, 1, 0,
         s, 0, c;
    return r;
}

Eigen::Matrix3d rot_z(double a) {
    double c = std::cos(a), s = std::sin(a);
    Eigen::Matrix3d r;
    r << c, s, 0,
         -s, c, 0,
         0, 0, 1;
    return r;
}

Eigen::Matrix3d rot_x_deriv(double a) {
    double c = std::cos(a), s = std::sin(a);
    Eigen::Matrix3d r;
    r << 0, 0, 0,
         0, -s, c,
         0, -c, -s;
    return r;
}

Eigen::Matrix3d rot_y_deriv(double a) {
    double c = std::cos(a), s = std::sin(a);
    Eigen::Matrix3d r;
    r << -s, 0, -c,
         0, 0, 0,
         c, 0, -s;
    return r;
}

Eigen::Matrix3d rot_z_deriv(double a) {
    double c = std::cos(a), s = std::sin(a);
    Eigen::Matrix3d r;
    r << -s, c, 0,
         -c, -s, 0,
         0, 0, 0;
    return r;
}

void check_pose(const PoseCoeffs& pose) {
    if (!(pose.scale > 0.0) || !std::isfinite(pose.scale)) {
        throw InvalidInputError("pose: scale must be positive and finite");
    }
    if (!pose.translation.allFinite() || !std::isfinite(pose.pitch) ||
        !std::isfinite(pose.yaw) || !std::isfinite(pose.roll)) {
        throw InvalidInputError("pose: non-finite component");
    }
}

} // namespace

Eigen::Matrix<double, 7, 1> PoseCoeffs::to_vector() const {
    Eigen::Matrix<double, 7, 1> v;
    v << scale, translation.x(), translation.y(), translation.z(), pitch, yaw, roll;
    return v;
}

PoseCoeffs PoseCoeffs::from_vector(const Eigen::Matrix<double, 7, 1>& v) {
    PoseCoeffs p;
    p.scale = v[0];
    p.translation = {v[1], v[2], v[3]};
    p.pitch = v[4];
    p.yaw = v[5];
    p.roll = v[6];
    return p;
}

Eigen::Matrix3d euler_to_rotation(double pitch, double yaw, double roll) {
    return rot_z(roll) * rot_y(yaw) * rot_x(pitch);
}

Eigen::Matrix3d euler_rotation_derivative(double pitch, double yaw, double roll, int axis) {
    switch (axis) {
        case 0: return rot_z(roll) * rot_y(yaw) * rot_x_deriv(pitch);
        case 1: return rot_z(roll) * rot_y_deriv(yaw) * rot_x(pitch);
        case 2: return rot_z_deriv(roll) * rot_y(yaw) * rot_x(pitch);
        default: throw InvalidInputError("euler_rotation_derivative: axis out of range");
    }
}

Eigen::MatrixX3d view_transform(const Eigen::MatrixX3d& vertices, const PoseCoeffs& pose) {
    check_pose(pose);
    Eigen::Matrix3d rot = euler_to_rotation(pose.pitch, pose.yaw, pose.roll);
    Eigen::MatrixX3d out = pose.scale * (vertices * rot);
    out.rowwise() += pose.translation.transpose();
    return out;
}

Eigen::MatrixX2d project(const Eigen::MatrixX3d& vertices, const PoseCoeffs& pose) {
    return view_transform(vertices, pose).leftCols<2>();
}

Eigen::MatrixX2d project_to_pixels(const Eigen::MatrixX3d& vertices, const PoseCoeffs& pose,
                                   const Viewport& viewport) {
    Eigen::MatrixX2d plane = project(vertices, pose);
    Eigen::MatrixX2d px(plane.rows(), 2);
    for (Eigen::Index i = 0; i < plane.rows(); ++i) {
        px.row(i) = viewport.to_pixels(plane.row(i)).transpose();
    }
    return px;
}

} // namespace uvapm
