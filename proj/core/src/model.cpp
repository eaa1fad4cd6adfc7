#include "uvapm/model.hpp"

#include <string>

#include "uvapm/albedo.hpp"
#include "uvapm/color.hpp"
#include "uvapm/errors.hpp"
#include "uvapm/pca.hpp"

namespace uvapm {

namespace {

// Rounds every entry through IEEE float32 so the in-memory model is exactly
// what the 32-bit file payload will hold.
void quantize_f32(Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = static_cast<double>(static_cast<float>(m.data()[i]));
    }
}

void quantize_f32(Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = static_cast<double>(static_cast<float>(v[i]));
    }
}

AlbedoChannelBasis finish_channel(PCAResult&& pca, int resolution) {
    AlbedoChannelBasis ch;
    ch.resolution = resolution;
    ch.mean = std::move(pca.mean);
    ch.basis = std::move(pca.basis);
    ch.singular_values = std::move(pca.singular_values);
    ch.total_variance = pca.total_variance;
    quantize_f32(ch.mean);
    quantize_f32(ch.basis);
    quantize_f32(ch.singular_values);
    return ch;
}

} // namespace

Eigen::VectorXd plane_to_vector(const ChannelPlane& plane) {
    return Eigen::Map<const Eigen::VectorXd>(plane.data.data(),
                                             static_cast<Eigen::Index>(plane.size()));
}

ChannelPlane vector_to_plane(const Eigen::VectorXd& v, int width, int height) {
    if (v.size() != static_cast<Eigen::Index>(width) * height) {
        throw InvalidInputError("vector_to_plane: length does not match dimensions");
    }
    ChannelPlane plane(width, height);
    Eigen::Map<Eigen::VectorXd>(plane.data.data(), v.size()) = v;
    return plane;
}

UVAPMModel build_uvapm(const std::vector<UVImage>& images, int k) {
    const auto n = static_cast<Eigen::Index>(images.size());
    if (n < 2) {
        throw InsufficientDataError("build_uvapm: need at least 2 images, got " +
                                    std::to_string(n));
    }
    const int d = images[0].width;
    if (images[0].height != d) {
        throw InvalidInputError("build_uvapm: images must be square");
    }
    for (const UVImage& img : images) {
        if (img.width != d || img.height != d) {
            throw InvalidInputError("build_uvapm: mixed image resolutions");
        }
        if (!all_finite(img)) {
            throw InvalidInputError("build_uvapm: non-finite pixel value");
        }
    }

    const Eigen::Index dim = static_cast<Eigen::Index>(d) * d;
    UVAPMModel model;
    model.n_samples = static_cast<int>(n);

    // Channels are independent; each gets its own snapshot PCA.
    for (int ch = 0; ch < 3; ++ch) {
        Eigen::MatrixXd samples(dim, n);
        for (Eigen::Index s = 0; s < n; ++s) {
            const UVImage& img = images[s];
            for (Eigen::Index px = 0; px < dim; ++px) {
                samples(px, s) = img.data[px * 3 + ch];
            }
        }
        model.channels[ch] = finish_channel(snapshot_pca(samples, k), d);
    }

    // Degenerate data can clamp channels to different ranks; a shared rank
    // keeps the channel-major coefficient layout well-defined.
    int shared = model.channels[0].rank();
    for (int ch = 1; ch < 3; ++ch) shared = std::min(shared, model.channels[ch].rank());
    for (auto& c : model.channels) {
        if (c.rank() != shared) {
            c.basis.conservativeResize(Eigen::NoChange, shared);
            c.singular_values.conservativeResize(shared);
        }
    }
    return model;
}

CoarseCoeffs encode_coarse(const UVImage& img, const UVAPMModel& model) {
    const int d = model.resolution();
    if (img.width != d || img.height != d) {
        throw InvalidInputError("encode_coarse: image resolution " +
                                std::to_string(img.width) + "x" + std::to_string(img.height) +
                                " does not match model resolution " + std::to_string(d));
    }
    const int k = model.rank();
    CoarseCoeffs coeffs = CoarseCoeffs::zero(k);
    auto [r, g, b] = split_channels(img);
    const ChannelPlane* planes[3] = {&r, &g, &b};
    for (int ch = 0; ch < 3; ++ch) {
        const AlbedoChannelBasis& basis = model.channels[ch];
        Eigen::VectorXd x = plane_to_vector(*planes[ch]);
        coeffs.values.segment(static_cast<Eigen::Index>(ch) * k, k) =
            basis.basis.transpose() * (x - basis.mean);
    }
    return coeffs;
}

std::vector<ChannelPlane> extract_residuals(const std::vector<UVImage>& images,
                                            const UVAPMModel& model, int d_detail) {
    const int d = model.resolution();
    if (d_detail < d) {
        throw InvalidInputError("extract_residuals: detail resolution " +
                                std::to_string(d_detail) +
                                " below model resolution " + std::to_string(d));
    }

    std::vector<ChannelPlane> residuals;
    residuals.reserve(images.size());
    for (const UVImage& img : images) {
        if (img.width < d || img.height < d) {
            throw InvalidInputError("extract_residuals: image resolution below model resolution");
        }
        UVImage at_d = resize_bilinear(img, d, d);
        UVImage coarse = decode_coarse(model, encode_coarse(at_d, model));
        UVImage coarse_up = resize_bilinear(coarse, d_detail, d_detail);
        UVImage original = resize_bilinear(img, d_detail, d_detail);

        UVImage hsv_orig = rgb_to_hsv(original);
        UVImage hsv_coarse = rgb_to_hsv(coarse_up);

        ChannelPlane r(d_detail, d_detail);
        for (size_t px = 0; px < r.size(); ++px) {
            r.data[px] = hsv_orig.data[px * 3 + 2] - hsv_coarse.data[px * 3 + 2];
        }
        residuals.push_back(std::move(r));
    }
    return residuals;
}

DetailBasis build_detail_basis(const std::vector<ChannelPlane>& residuals, int m) {
    const auto n = static_cast<Eigen::Index>(residuals.size());
    if (n < 2) {
        throw InsufficientDataError("build_detail_basis: need at least 2 residuals, got " +
                                    std::to_string(n));
    }
    const int d = residuals[0].width;
    if (residuals[0].height != d) {
        throw InvalidInputError("build_detail_basis: residual planes must be square");
    }
    for (const ChannelPlane& plane : residuals) {
        if (plane.width != d || plane.height != d) {
            throw InvalidInputError("build_detail_basis: mixed residual resolutions");
        }
        if (!all_finite(plane)) {
            throw InvalidInputError("build_detail_basis: non-finite residual value");
        }
    }

    Eigen::MatrixXd samples(static_cast<Eigen::Index>(d) * d, n);
    for (Eigen::Index s = 0; s < n; ++s) {
        samples.col(s) = plane_to_vector(residuals[s]);
    }

    DetailBasis detail;
    detail.n_samples = static_cast<int>(n);
    detail.channel = finish_channel(snapshot_pca(samples, m), d);
    return detail;
}

DetailCoeffs encode_detail(const ChannelPlane& residual, const DetailBasis& basis) {
    const int d = basis.resolution();
    if (residual.width != d || residual.height != d) {
        throw InvalidInputError("encode_detail: plane resolution does not match basis");
    }
    Eigen::VectorXd x = plane_to_vector(residual);
    return DetailCoeffs(basis.channel.basis.transpose() * (x - basis.channel.mean));
}

double explained_variance(const AlbedoChannelBasis& channel, int r, int n_samples) {
    if (channel.total_variance <= 0.0 || n_samples < 2) return 0.0;
    r = std::min(r, channel.rank());
    double captured = 0.0;
    for (int i = 0; i < r; ++i) {
        double s = channel.singular_values[i];
        captured += s * s;
    }
    // Singular values are on the data scale; the stored total is on the
    // covariance (1/(N-1)) scale.
    return captured / (channel.total_variance * (n_samples - 1));
}

} // namespace uvapm
