#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "uvapm/mesh.hpp"

namespace uvapm {

/// Area-weighted per-vertex normals (sum of incident face cross products,
/// normalized). Vertices with a zero accumulated normal fall back to +z.
Eigen::MatrixX3d vertex_normals(const Eigen::MatrixX3d& vertices,
                                const std::vector<std::array<int, 3>>& triangles);

/// UV-space normal map. Uncovered texels hold (0,0,1) with coverage 0.
struct NormalMap {
    int size = 0;                  // square resolution d
    std::vector<double> normals;   // d*d*3, row-major, unit where covered
    std::vector<uint8_t> coverage; // d*d
    int skipped_degenerate = 0;    // UV-degenerate triangles dropped

    Eigen::Vector3d at(int row, int col) const {
        const size_t i = (static_cast<size_t>(row) * size + col) * 3;
        return {normals[i], normals[i + 1], normals[i + 2]};
    }
    bool covered(int row, int col) const {
        return coverage[static_cast<size_t>(row) * size + col] != 0;
    }
    double coverage_fraction() const;
};

/// Rasterizes the mesh in UV space, interpolating vertex normals
/// barycentrically and renormalizing per texel. Texel (row r, col c) maps
/// to uv = ((c+0.5)/d, 1-(r+0.5)/d), matching image row 0 at the top.
NormalMap bake_normals_uv(const FaceMesh& mesh, const Eigen::MatrixX3d& normals, int d);

} // namespace uvapm
