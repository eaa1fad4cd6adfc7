#include "uvapm/model_io.hpp"

#include "binary_io.hpp"

namespace uvapm {

namespace {

constexpr char kModelMagic[7] = "UVAPM1";
constexpr char kDetailMagic[7] = "UVDET1";
constexpr uint16_t kVersion = 1;

void write_channel(detail::BinaryWriter& w, const AlbedoChannelBasis& ch) {
    w.f64(ch.total_variance);
    w.f32_vector(ch.mean);
    w.f32_vector(ch.singular_values);
    w.f32_matrix(ch.basis);
}

AlbedoChannelBasis read_channel(detail::BinaryReader& r, int d, int k,
                                const std::string& label) {
    AlbedoChannelBasis ch;
    ch.resolution = d;
    const Eigen::Index dim = static_cast<Eigen::Index>(d) * d;
    ch.total_variance = r.f64(label + " total variance");
    ch.mean = r.f32_vector(dim, label + " mean");
    ch.singular_values = r.f32_vector(k, label + " singular values");
    ch.basis = r.f32_matrix(dim, k, label + " basis");
    return ch;
}

void check_version(uint16_t version, const std::filesystem::path& path) {
    if (version != kVersion) {
        throw FormatError(path.string() + ": unsupported version " +
                          std::to_string(version) + " in section 'version' at offset 6");
    }
}

} // namespace

void save_model(const UVAPMModel& model, const std::filesystem::path& path) {
    detail::BinaryWriter w(path);
    w.magic(kModelMagic);
    w.u16(kVersion);
    w.u32(static_cast<uint32_t>(model.resolution()));
    w.u32(static_cast<uint32_t>(model.rank()));
    w.u32(static_cast<uint32_t>(model.n_samples));
    for (const auto& ch : model.channels) write_channel(w, ch);
    w.finish();
}

UVAPMModel load_model(const std::filesystem::path& path) {
    detail::BinaryReader r(path);
    r.expect_magic(kModelMagic, "UVAPM model");
    check_version(r.u16("version"), path);
    const int d = static_cast<int>(r.u32("resolution"));
    const int k = static_cast<int>(r.u32("rank"));
    const int n = static_cast<int>(r.u32("sample count"));

    UVAPMModel model;
    model.n_samples = n;
    static const char* names[3] = {"R channel", "G channel", "B channel"};
    for (int ch = 0; ch < 3; ++ch) {
        model.channels[ch] = read_channel(r, d, k, names[ch]);
    }
    r.expect_end();
    return model;
}

void save_detail_basis(const DetailBasis& basis, const std::filesystem::path& path) {
    detail::BinaryWriter w(path);
    w.magic(kDetailMagic);
    w.u16(kVersion);
    w.u32(static_cast<uint32_t>(basis.resolution()));
    w.u32(static_cast<uint32_t>(basis.rank()));
    w.u32(static_cast<uint32_t>(basis.n_samples));
    write_channel(w, basis.channel);
    w.finish();
}

DetailBasis load_detail_basis(const std::filesystem::path& path) {
    detail::BinaryReader r(path);
    r.expect_magic(kDetailMagic, "detail basis");
    check_version(r.u16("version"), path);
    const int d = static_cast<int>(r.u32("resolution"));
    const int m = static_cast<int>(r.u32("rank"));
    const int n = static_cast<int>(r.u32("sample count"));

    DetailBasis basis;
    basis.n_samples = n;
    basis.channel = read_channel(r, d, m, "V residual channel");
    r.expect_end();
    return basis;
}

} // namespace uvapm
