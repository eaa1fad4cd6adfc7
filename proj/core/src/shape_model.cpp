#include "uvapm/shape_model.hpp"

#include <string>

#include "binary_io.hpp"
#include "uvapm/errors.hpp"

namespace uvapm {

Eigen::MatrixX3d assemble_shape(const LinearShapeModel& model,
                                const Eigen::VectorXd& beta,
                                const Eigen::VectorXd& xi) {
    if (beta.size() != model.id_basis.cols()) {
        throw InvalidInputError("assemble_shape: beta length " + std::to_string(beta.size()) +
                                " does not match id basis columns " +
                                std::to_string(model.id_basis.cols()));
    }
    if (xi.size() != model.exp_basis.cols()) {
        throw InvalidInputError("assemble_shape: xi length " + std::to_string(xi.size()) +
                                " does not match expression basis columns " +
                                std::to_string(model.exp_basis.cols()));
    }
    Eigen::VectorXd flat = model.mean;
    if (beta.size() > 0) flat.noalias() += model.id_basis * beta;
    if (xi.size() > 0) flat.noalias() += model.exp_basis * xi;

    const int n = model.vertex_count();
    Eigen::MatrixX3d vertices(n, 3);
    for (int v = 0; v < n; ++v) {
        vertices(v, 0) = flat[3 * v + 0];
        vertices(v, 1) = flat[3 * v + 1];
        vertices(v, 2) = flat[3 * v + 2];
    }
    return vertices;
}

namespace {
constexpr char kShapeMagic[7] = "UVSHP1";
constexpr uint16_t kVersion = 1;
} // namespace

void save_shape_model(const LinearShapeModel& model, const std::filesystem::path& path) {
    detail::BinaryWriter w(path);
    w.magic(kShapeMagic);
    w.u16(kVersion);
    w.u32(static_cast<uint32_t>(model.vertex_count()));
    w.u32(static_cast<uint32_t>(model.id_dims()));
    w.u32(static_cast<uint32_t>(model.exp_dims()));
    w.f32_vector(model.mean);
    w.f32_matrix(model.id_basis);
    w.f32_matrix(model.exp_basis);
    w.finish();
}

LinearShapeModel load_shape_model(const std::filesystem::path& path) {
    detail::BinaryReader r(path);
    r.expect_magic(kShapeMagic, "shape model");
    uint16_t version = r.u16("version");
    if (version != kVersion) {
        throw FormatError(path.string() + ": unsupported version " + std::to_string(version) +
                          " in section 'version' at offset 6");
    }
    const auto n = static_cast<Eigen::Index>(r.u32("vertex count"));
    const auto nb = static_cast<Eigen::Index>(r.u32("identity dims"));
    const auto ne = static_cast<Eigen::Index>(r.u32("expression dims"));

    LinearShapeModel model;
    model.mean = r.f32_vector(3 * n, "mean shape");
    model.id_basis = r.f32_matrix(3 * n, nb, "identity basis");
    model.exp_basis = r.f32_matrix(3 * n, ne, "expression basis");
    r.expect_end();
    return model;
}

} // namespace uvapm
