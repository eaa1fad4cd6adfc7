#include "uvapm/normals.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "uvapm/errors.hpp"

namespace uvapm {

Eigen::MatrixX3d vertex_normals(const Eigen::MatrixX3d& vertices,
                                const std::vector<std::array<int, 3>>& triangles) {
    const Eigen::Index n = vertices.rows();
    Eigen::MatrixX3d accum = Eigen::MatrixX3d::Zero(n, 3);

    for (const auto& tri : triangles) {
        Eigen::Vector3d a = vertices.row(tri[0]);
        Eigen::Vector3d b = vertices.row(tri[1]);
        Eigen::Vector3d c = vertices.row(tri[2]);
        // Cross product magnitude is twice the face area, so adding the raw
        // cross products area-weights the average.
        Eigen::Vector3d face = (b - a).cross(c - a);
        for (int v : tri) accum.row(v) += face.transpose();
    }

    for (Eigen::Index v = 0; v < n; ++v) {
        double norm = accum.row(v).norm();
        if (norm > 1e-300) {
            accum.row(v) /= norm;
        } else {
            accum.row(v) = Eigen::RowVector3d(0.0, 0.0, 1.0);
        }
    }
    return accum;
}

double NormalMap::coverage_fraction() const {
    if (coverage.empty()) return 0.0;
    size_t covered_count = 0;
    for (uint8_t c : coverage) covered_count += c != 0;
    return static_cast<double>(covered_count) / coverage.size();
}

NormalMap bake_normals_uv(const FaceMesh& mesh, const Eigen::MatrixX3d& normals, int d) {
    if (d <= 0) throw InvalidInputError("bake_normals_uv: non-positive resolution");
    if (normals.rows() != mesh.vertex_count()) {
        throw InvalidInputError("bake_normals_uv: normal count does not match mesh");
    }

    NormalMap map;
    map.size = d;
    map.normals.assign(static_cast<size_t>(d) * d * 3, 0.0);
    map.coverage.assign(static_cast<size_t>(d) * d, 0);
    // Uncovered texels default to +z.
    for (size_t i = 0; i < map.coverage.size(); ++i) map.normals[i * 3 + 2] = 1.0;

    // Winner per texel is the smallest covering triangle id, which makes the
    // bake independent of triangle submission order.
    std::vector<int32_t> owner(static_cast<size_t>(d) * d, INT32_MAX);

    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        // Texel-space corners: x = u*d - 0.5, y = (1-v)*d - 0.5.
        Eigen::Vector2d p0(mesh.uvs[tri[0]].x() * d - 0.5, (1.0 - mesh.uvs[tri[0]].y()) * d - 0.5);
        Eigen::Vector2d p1(mesh.uvs[tri[1]].x() * d - 0.5, (1.0 - mesh.uvs[tri[1]].y()) * d - 0.5);
        Eigen::Vector2d p2(mesh.uvs[tri[2]].x() * d - 0.5, (1.0 - mesh.uvs[tri[2]].y()) * d - 0.5);

        double area = (p1.x() - p0.x()) * (p2.y() - p0.y()) -
                      (p1.y() - p0.y()) * (p2.x() - p0.x());
        if (std::abs(area) < 1e-14) {
            ++map.skipped_degenerate;
            continue;
        }

        int min_x = std::max(0, static_cast<int>(std::ceil(std::min({p0.x(), p1.x(), p2.x()}))));
        int max_x = std::min(d - 1, static_cast<int>(std::floor(std::max({p0.x(), p1.x(), p2.x()}))));
        int min_y = std::max(0, static_cast<int>(std::ceil(std::min({p0.y(), p1.y(), p2.y()}))));
        int max_y = std::min(d - 1, static_cast<int>(std::floor(std::max({p0.y(), p1.y(), p2.y()}))));

        for (int y = min_y; y <= max_y; ++y) {
            for (int x = min_x; x <= max_x; ++x) {
                Eigen::Vector2d p(x, y);
                double w0 = ((p1.x() - p.x()) * (p2.y() - p.y()) -
                             (p1.y() - p.y()) * (p2.x() - p.x())) / area;
                double w1 = ((p2.x() - p.x()) * (p0.y() - p.y()) -
                             (p2.y() - p.y()) * (p0.x() - p.x())) / area;
                double w2 = 1.0 - w0 - w1;
                if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;

                const size_t idx = static_cast<size_t>(y) * d + x;
                if (static_cast<int32_t>(t) >= owner[idx]) continue;
                owner[idx] = static_cast<int32_t>(t);

                Eigen::Vector3d nrm = w0 * normals.row(tri[0]).transpose() +
                                      w1 * normals.row(tri[1]).transpose() +
                                      w2 * normals.row(tri[2]).transpose();
                double len = nrm.norm();
                if (len > 1e-300) {
                    nrm /= len;
                } else {
                    nrm = Eigen::Vector3d(0.0, 0.0, 1.0);
                }
                map.normals[idx * 3 + 0] = nrm.x();
                map.normals[idx * 3 + 1] = nrm.y();
                map.normals[idx * 3 + 2] = nrm.z();
                map.coverage[idx] = 1;
            }
        }
    }
    return map;
}

} // namespace uvapm
