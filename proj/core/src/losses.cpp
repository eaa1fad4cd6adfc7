#include "uvapm/losses.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "uvapm/errors.hpp"

namespace uvapm {

LandmarkSet LandmarkSet::with_default_weights(Eigen::MatrixX2d pts) {
    if (pts.rows() != 68) {
        throw InvalidInputError("landmarks: expected 68 points, got " +
                                std::to_string(pts.rows()));
    }
    LandmarkSet set;
    set.points = std::move(pts);
    set.weights = Eigen::VectorXd::Ones(68);
    // Jaw contour correspondence slides along the silhouette; weight it down.
    set.weights.head(17).setConstant(0.5);
    return set;
}

LandmarkSet load_landmarks_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open landmark file: " + path.string());

    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("landmarks: invalid JSON in " + path.string() + ": " + e.what());
    }
    if (!j.is_array() || j.size() != 68) {
        throw FormatError("landmarks: expected a JSON array of 68 [x,y] pairs in " +
                          path.string());
    }
    Eigen::MatrixX2d pts(68, 2);
    for (int i = 0; i < 68; ++i) {
        const auto& p = j[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw FormatError("landmarks: entry " + std::to_string(i) +
                              " is not an [x,y] pair in " + path.string());
        }
        pts(i, 0) = p[0].get<double>();
        pts(i, 1) = p[1].get<double>();
    }
    return LandmarkSet::with_default_weights(std::move(pts));
}

void save_landmarks_json(const LandmarkSet& landmarks, const std::filesystem::path& path) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < landmarks.points.rows(); ++i) {
        j.push_back({landmarks.points(i, 0), landmarks.points(i, 1)});
    }
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write landmark file: " + path.string());
    out << j.dump() << "\n";
}

PhotometricResult photometric_loss(const UVImage& image, const UVImage& rendered,
                                   const FaceMask& mask, bool squared) {
    if (!image.same_size(rendered)) {
        throw InvalidInputError("photometric_loss: image and render dimensions differ");
    }
    if (mask.width() != image.width || mask.height() != image.height) {
        throw InvalidInputError("photometric_loss: mask dimensions differ from image");
    }

    double skin_total = 0.0;
    for (double g : mask.skin.data) skin_total += g;
    if (skin_total <= 0.0) {
        throw EmptyMaskError("photometric_loss: mask selects no skin pixels");
    }

    PhotometricResult res;
    res.render_adjoint = UVImage(image.width, image.height, 0.0);

    const size_t n = image.pixel_count();
    double accum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double gw = mask.skin.data[i] * mask.weights.data[i];
        if (gw == 0.0) continue;

        const double dr = image.data[i * 3 + 0] - rendered.data[i * 3 + 0];
        const double dg = image.data[i * 3 + 1] - rendered.data[i * 3 + 1];
        const double db = image.data[i * 3 + 2] - rendered.data[i * 3 + 2];
        const double sq = dr * dr + dg * dg + db * db;

        if (squared) {
            accum += gw * sq;
            res.render_adjoint.data[i * 3 + 0] = -2.0 * gw * dr;
            res.render_adjoint.data[i * 3 + 1] = -2.0 * gw * dg;
            res.render_adjoint.data[i * 3 + 2] = -2.0 * gw * db;
        } else {
            const double norm = std::sqrt(sq);
            accum += gw * norm;
            if (norm > 0.0) {
                res.render_adjoint.data[i * 3 + 0] = -gw * dr / norm;
                res.render_adjoint.data[i * 3 + 1] = -gw * dg / norm;
                res.render_adjoint.data[i * 3 + 2] = -gw * db / norm;
            }
            // norm == 0: subgradient 0 by contract
        }
    }

    res.loss = accum / skin_total;
    for (double& v : res.render_adjoint.data) v /= skin_total;
    return res;
}

LandmarkLossResult landmark_loss(const LandmarkSet& gt, const Eigen::MatrixX2d& projected) {
    if (gt.points.rows() != 68 || gt.weights.size() != 68) {
        throw InvalidInputError("landmark_loss: ground truth must hold 68 weighted points");
    }
    if (projected.rows() != 68) {
        throw InvalidInputError("landmark_loss: expected 68 projected points, got " +
                                std::to_string(projected.rows()));
    }

    LandmarkLossResult res;
    res.point_adjoint = Eigen::MatrixX2d::Zero(68, 2);
    for (int i = 0; i < 68; ++i) {
        const double w = gt.weights[i];
        const Eigen::Vector2d diff = projected.row(i) - gt.points.row(i);
        res.loss += w * diff.squaredNorm();
        res.point_adjoint.row(i) = 2.0 * w * diff.transpose();
    }
    return res;
}

double identity_loss(const EmbeddingProvider& provider, const UVImage& image,
                     const UVImage& rendered) {
    Eigen::VectorXd a = provider.embed(image);
    Eigen::VectorXd b = provider.embed(rendered);
    if (a.size() != b.size() || a.size() == 0) {
        throw InvalidInputError("identity_loss: provider returned mismatched embeddings");
    }
    const double na = a.norm(), nb = b.norm();
    if (na <= 0.0 || nb <= 0.0) {
        throw InvalidInputError("identity_loss: provider returned a zero embedding");
    }
    return 1.0 - a.dot(b) / (na * nb);
}

} // namespace uvapm
