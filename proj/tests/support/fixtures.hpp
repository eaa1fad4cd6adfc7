#pragma once

// Deterministic desk-scale fixtures: a dome "face" mesh with a full UV
// unwrap, a tiny linear shape model over it, and procedural skin-like
// textures with controllable high-frequency structure.

#include <array>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uvapm/color.hpp"
#include "uvapm/image.hpp"
#include "uvapm/mesh.hpp"
#include "uvapm/shape_model.hpp"

namespace fixtures {

/// RAII temp directory under the system temp root.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("uvapm_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline double quantize_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

/// Dome mesh over a (grid+1)^2 vertex lattice spanning [-1,1]^2 with
/// z = height * exp(-(x^2+y^2)), full UV coverage, CCW triangles seen from
/// +z, and 68 landmark ids spread deterministically over the lattice.
inline uvapm::FaceMesh dome_mesh(int grid = 12, double height = 0.6) {
    uvapm::FaceMesh mesh;
    const int side = grid + 1;
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            const double x = -1.0 + 2.0 * c / grid;
            const double y = -1.0 + 2.0 * r / grid;
            const double z = height * std::exp(-(x * x + y * y));
            mesh.rest_positions.emplace_back(quantize_f32(x), quantize_f32(y), quantize_f32(z));
            mesh.uvs.emplace_back((x + 1.0) / 2.0, (y + 1.0) / 2.0);
        }
    }
    for (int r = 0; r < grid; ++r) {
        for (int c = 0; c < grid; ++c) {
            const int a = r * side + c;
            const int b = a + 1;
            const int d = a + side;
            const int e = d + 1;
            // CCW when viewed from +z (y up, x right).
            mesh.triangles.push_back({a, b, e});
            mesh.triangles.push_back({a, e, d});
        }
    }
    const int n = side * side;
    mesh.landmark_indices.resize(68);
    for (int i = 0; i < 68; ++i) {
        mesh.landmark_indices[i] = static_cast<int>((static_cast<long long>(i) * (n - 1)) / 67);
    }
    return mesh;
}

/// Small linear shape model over the dome: smooth sinusoidal displacement
/// fields as identity/expression columns. Values are f32-quantized so the
/// model serializes bit-exactly.
inline uvapm::LinearShapeModel dome_shape_model(const uvapm::FaceMesh& mesh, int id_dims = 4,
                                                int exp_dims = 2) {
    const int n = mesh.vertex_count();
    uvapm::LinearShapeModel model;
    model.mean.resize(3 * n);
    for (int v = 0; v < n; ++v) {
        model.mean[3 * v + 0] = mesh.rest_positions[v].x();
        model.mean[3 * v + 1] = mesh.rest_positions[v].y();
        model.mean[3 * v + 2] = mesh.rest_positions[v].z();
    }

    auto field = [&](int v, int mode, double amp, int axis) {
        const double x = mesh.rest_positions[v].x();
        const double y = mesh.rest_positions[v].y();
        const double phase = 0.7 * mode + 0.3 * axis;
        return amp * std::sin((mode + 1) * 1.3 * x + phase) *
               std::cos((mode + 1) * 0.9 * y - phase);
    };

    model.id_basis.resize(3 * n, id_dims);
    for (int j = 0; j < id_dims; ++j) {
        for (int v = 0; v < n; ++v) {
            model.id_basis(3 * v + 0, j) = quantize_f32(field(v, j, 0.05, 0));
            model.id_basis(3 * v + 1, j) = quantize_f32(field(v, j, 0.05, 1));
            model.id_basis(3 * v + 2, j) = quantize_f32(field(v, j, 0.10, 2));
        }
    }
    model.exp_basis.resize(3 * n, exp_dims);
    for (int j = 0; j < exp_dims; ++j) {
        for (int v = 0; v < n; ++v) {
            model.exp_basis(3 * v + 0, j) = quantize_f32(field(v, j + id_dims, 0.03, 0));
            model.exp_basis(3 * v + 1, j) = quantize_f32(field(v, j + id_dims, 0.03, 1));
            model.exp_basis(3 * v + 2, j) = quantize_f32(field(v, j + id_dims, 0.06, 2));
        }
    }
    return model;
}

/// Random image with values in [lo, hi].
inline uvapm::UVImage random_image(int w, int h, std::mt19937& rng, double lo = 0.0,
                                   double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    uvapm::UVImage img(w, h);
    for (double& v : img.data) v = dist(rng);
    return img;
}

inline uvapm::ChannelPlane random_plane(int w, int h, std::mt19937& rng, double lo = -0.2,
                                        double hi = 0.2) {
    std::uniform_real_distribution<double> dist(lo, hi);
    uvapm::ChannelPlane p(w, h);
    for (double& v : p.data) v = dist(rng);
    return p;
}

/// Procedural face-like albedo: a per-image skin tone, smooth low-frequency
/// blobs, and (optionally) high-frequency structure injected into the V
/// channel as a random mix of fixed fine patterns. The HF mix is low-rank
/// across a dataset by construction.
inline uvapm::UVImage procedural_face(int d, std::mt19937& rng, double hf_amplitude = 0.08) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const double base_r = 0.55 + 0.25 * uni(rng);
    const double base_g = 0.40 + 0.20 * uni(rng);
    const double base_b = 0.30 + 0.20 * uni(rng);

    struct Blob {
        double cx, cy, radius, gain[3];
    };
    std::vector<Blob> blobs(4);
    for (auto& blob : blobs) {
        blob.cx = uni(rng);
        blob.cy = uni(rng);
        blob.radius = 0.15 + 0.25 * uni(rng);
        for (double& g : blob.gain) g = -0.12 + 0.24 * uni(rng);
    }

    uvapm::UVImage img(d, d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            const double x = (c + 0.5) / d;
            const double y = (r + 0.5) / d;
            double rgb[3] = {base_r, base_g, base_b};
            for (const auto& blob : blobs) {
                const double dist2 = (x - blob.cx) * (x - blob.cx) + (y - blob.cy) * (y - blob.cy);
                const double fall = std::exp(-dist2 / (blob.radius * blob.radius));
                for (int ch = 0; ch < 3; ++ch) rgb[ch] += blob.gain[ch] * fall;
            }
            for (int ch = 0; ch < 3; ++ch) {
                img.at(r, c, ch) = std::clamp(rgb[ch], 0.05, 0.95);
            }
        }
    }

    if (hf_amplitude > 0.0) {
        // Fixed fine patterns, random per-image weights.
        std::array<double, 3> weights = {uni(rng), uni(rng), uni(rng)};
        uvapm::UVImage hsv = uvapm::rgb_to_hsv(img);
        for (int r = 0; r < d; ++r) {
            for (int c = 0; c < d; ++c) {
                const double x = (c + 0.5) / d;
                const double y = (r + 0.5) / d;
                const double p0 = std::sin(2.0 * M_PI * d * 0.45 * x);
                const double p1 = std::sin(2.0 * M_PI * d * 0.35 * (x + y));
                const double p2 = std::cos(2.0 * M_PI * d * 0.40 * y);
                const double hf =
                    hf_amplitude * (weights[0] * p0 + weights[1] * p1 + weights[2] * p2) / 3.0;
                double& v = hsv.at(r, c, 2);
                v = std::clamp(v + hf, 0.02, 0.98);
            }
        }
        img = uvapm::hsv_to_rgb(hsv);
    }
    return img;
}

inline std::vector<uvapm::UVImage> procedural_dataset(int count, int d, unsigned seed,
                                                      double hf_amplitude = 0.08) {
    std::mt19937 rng(seed);
    std::vector<uvapm::UVImage> images;
    images.reserve(count);
    for (int i = 0; i < count; ++i) images.push_back(procedural_face(d, rng, hf_amplitude));
    return images;
}

} // namespace fixtures
