#include "uvapm/coeffs_json.hpp"

#include <fstream>

#include <json.hpp>

#include "uvapm/errors.hpp"

namespace uvapm {

namespace {

Eigen::VectorXd vector_from_json(const nlohmann::json& arr, const std::string& key) {
    if (!arr.is_array()) {
        throw FormatError("coefficients: '" + key + "' must be an array");
    }
    Eigen::VectorXd v(arr.size());
    Eigen::Index i = 0;
    for (const auto& item : arr) {
        if (!item.is_number()) {
            throw FormatError("coefficients: '" + key + "' contains a non-numeric entry");
        }
        v[i++] = item.get<double>();
    }
    return v;
}

} // namespace

CoeffsFile load_coeffs_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open coefficients file: " + path.string());

    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("coefficients: invalid JSON in " + path.string() + ": " + e.what());
    }

    if (!j.contains("alpha_c")) {
        throw FormatError("coefficients: missing 'alpha_c' in " + path.string());
    }
    CoeffsFile out;
    out.alpha_c = CoarseCoeffs(vector_from_json(j["alpha_c"], "alpha_c"));
    if (j.contains("alpha_d") && !j["alpha_d"].is_null()) {
        out.alpha_d = DetailCoeffs(vector_from_json(j["alpha_d"], "alpha_d"));
    }
    return out;
}

void save_coeffs_json(const CoeffsFile& coeffs, const std::filesystem::path& path) {
    nlohmann::json j;
    j["alpha_c"] = std::vector<double>(coeffs.alpha_c.values.begin(), coeffs.alpha_c.values.end());
    if (coeffs.alpha_d) {
        j["alpha_d"] = std::vector<double>(coeffs.alpha_d->values.begin(), coeffs.alpha_d->values.end());
    }
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write coefficients file: " + path.string());
    out << j.dump(2) << "\n";
}

} // namespace uvapm
