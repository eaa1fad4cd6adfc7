#include "uvapm/mesh.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "uvapm/errors.hpp"

namespace uvapm {

namespace {

struct Corner {
    int v = -1;
    int vt = -1;
};

Corner parse_corner(const std::string& token, size_t v_count, size_t vt_count, int line_no) {
    Corner c;
    size_t slash = token.find('/');
    auto context = [&] { return " (line " + std::to_string(line_no) + ")"; };
    try {
        c.v = std::stoi(token.substr(0, slash));
        if (slash != std::string::npos) {
            size_t next = token.find('/', slash + 1);
            std::string vt_str = token.substr(slash + 1, next == std::string::npos
                                                             ? std::string::npos
                                                             : next - slash - 1);
            if (!vt_str.empty()) c.vt = std::stoi(vt_str);
        }
    } catch (const std::exception&) {
        throw FormatError("obj: malformed face corner '" + token + "'" + context());
    }
    if (c.v < 0) c.v = static_cast<int>(v_count) + c.v + 1;
    if (c.vt < 0 && c.vt != -1) c.vt = static_cast<int>(vt_count) + c.vt + 1;
    if (c.v < 1 || c.v > static_cast<int>(v_count)) {
        throw FormatError("obj: vertex index out of range" + context());
    }
    if (c.vt == -1) {
        throw FormatError("obj: face corner without a vt index" + context());
    }
    if (c.vt < 1 || c.vt > static_cast<int>(vt_count)) {
        throw FormatError("obj: texture index out of range" + context());
    }
    c.v -= 1;
    c.vt -= 1;
    return c;
}

} // namespace

FaceMesh load_obj(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open OBJ file: " + path.string());

    std::vector<Eigen::Vector3d> positions;
    std::vector<Eigen::Vector2d> texcoords;
    std::vector<std::array<Corner, 3>> faces;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag.empty() || tag[0] == '#') continue;

        if (tag == "v") {
            double x, y, z;
            if (!(ss >> x >> y >> z)) {
                throw FormatError("obj: malformed vertex (line " + std::to_string(line_no) + ")");
            }
            positions.emplace_back(x, y, z);
        } else if (tag == "vt") {
            double u, v;
            if (!(ss >> u >> v)) {
                throw FormatError("obj: malformed texcoord (line " + std::to_string(line_no) + ")");
            }
            texcoords.emplace_back(u, v);
        } else if (tag == "f") {
            std::vector<Corner> corners;
            std::string token;
            while (ss >> token) {
                corners.push_back(parse_corner(token, positions.size(), texcoords.size(), line_no));
            }
            if (corners.size() < 3) {
                throw FormatError("obj: face with fewer than 3 corners (line " +
                                  std::to_string(line_no) + ")");
            }
            for (size_t i = 1; i + 1 < corners.size(); ++i) {
                faces.push_back({corners[0], corners[i], corners[i + 1]});
            }
        }
        // Other tags (vn, o, g, s, usemtl, ...) are ignored.
    }

    FaceMesh mesh;
    mesh.rest_positions = std::move(positions);
    mesh.uvs.assign(mesh.rest_positions.size(), Eigen::Vector2d(-1.0, -1.0));

    for (const auto& face : faces) {
        std::array<int, 3> tri{};
        for (int c = 0; c < 3; ++c) {
            const Corner& corner = face[c];
            const Eigen::Vector2d& uv = texcoords[corner.vt];
            Eigen::Vector2d& slot = mesh.uvs[corner.v];
            if (slot.x() < 0.0) {
                slot = uv;
            } else if ((slot - uv).cwiseAbs().maxCoeff() > 1e-9) {
                throw FormatError("obj: vertex " + std::to_string(corner.v + 1) +
                                  " referenced with conflicting texture coordinates");
            }
            tri[c] = corner.v;
        }
        mesh.triangles.push_back(tri);
    }

    for (size_t i = 0; i < mesh.uvs.size(); ++i) {
        if (mesh.uvs[i].x() < 0.0) {
            // Vertex never referenced by a face; park it at the origin texel.
            mesh.uvs[i] = Eigen::Vector2d(0.0, 0.0);
        }
    }
    return mesh;
}

void save_obj(const FaceMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write OBJ file: " + path.string());
    out.precision(9);
    for (const auto& p : mesh.rest_positions) {
        out << "v " << p.x() << " " << p.y() << " " << p.z() << "\n";
    }
    for (const auto& uv : mesh.uvs) {
        out << "vt " << uv.x() << " " << uv.y() << "\n";
    }
    for (const auto& t : mesh.triangles) {
        out << "f " << t[0] + 1 << "/" << t[0] + 1 << " " << t[1] + 1 << "/" << t[1] + 1
            << " " << t[2] + 1 << "/" << t[2] + 1 << "\n";
    }
}

std::vector<int> load_landmark_indices(const std::filesystem::path& path, int vertex_count) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open landmark index file: " + path.string());

    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("landmark indices: invalid JSON in " + path.string() + ": " + e.what());
    }
    if (!j.is_array() || j.size() != 68) {
        throw FormatError("landmark indices: expected a JSON array of 68 vertex ids in " +
                          path.string());
    }
    std::vector<int> indices;
    indices.reserve(68);
    for (const auto& item : j) {
        if (!item.is_number_integer()) {
            throw FormatError("landmark indices: non-integer entry in " + path.string());
        }
        int idx = item.get<int>();
        if (idx < 0 || idx >= vertex_count) {
            throw FormatError("landmark indices: vertex id " + std::to_string(idx) +
                              " out of range in " + path.string());
        }
        indices.push_back(idx);
    }
    return indices;
}

void save_landmark_indices(const std::vector<int>& indices, const std::filesystem::path& path) {
    if (indices.size() != 68) {
        throw InvalidInputError("save_landmark_indices: expected 68 ids");
    }
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write landmark index file: " + path.string());
    out << nlohmann::json(indices).dump() << "\n";
}

} // namespace uvapm
