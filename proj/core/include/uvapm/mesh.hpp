#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

namespace uvapm {

/// Triangle topology with one UV coordinate per vertex and the 68 landmark
/// vertex ids. Vertex positions come from the shape model, not the mesh;
/// the rest positions read from the OBJ are kept for fixture building only.
struct FaceMesh {
    std::vector<std::array<int, 3>> triangles;
    std::vector<Eigen::Vector2d> uvs;            // per vertex, [0,1]^2
    std::vector<int> landmark_indices;           // 68 vertex ids
    std::vector<Eigen::Vector3d> rest_positions; // from the OBJ 'v' records

    int vertex_count() const { return static_cast<int>(uvs.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
};

/// Wavefront OBJ subset: v, vt, and f with v/vt corners (1-based indices,
/// fan triangulation for polygons). Every vertex must resolve to a single
/// UV; faces without vt indices are rejected.
FaceMesh load_obj(const std::filesystem::path& path);
void save_obj(const FaceMesh& mesh, const std::filesystem::path& path);

/// JSON array of exactly 68 vertex ids.
std::vector<int> load_landmark_indices(const std::filesystem::path& path, int vertex_count);
void save_landmark_indices(const std::vector<int>& indices, const std::filesystem::path& path);

} // namespace uvapm
