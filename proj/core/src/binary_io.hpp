#pragma once

// Little-endian binary encode/decode helpers shared by the model and shape
// file formats. Not installed; internal to the library.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uvapm/errors.hpp"

namespace uvapm::detail {

class BinaryWriter {
public:
    explicit BinaryWriter(const std::filesystem::path& path)
        : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw FormatError("cannot open file for writing: " + path.string());
    }

    void magic(const char (&m)[7]) { bytes(m, 6); }
    void u16(uint16_t v) { raw_le(v); }
    void u32(uint32_t v) { raw_le(v); }
    void f32(float v) {
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        raw_le(bits);
    }
    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        raw_le(bits);
    }

    void f32_vector(const Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) f32(static_cast<float>(v[i]));
    }
    // Column-major element order.
    void f32_matrix(const Eigen::MatrixXd& m) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r) f32(static_cast<float>(m(r, c)));
    }

    void finish() {
        out_.flush();
        if (!out_) throw FormatError("write failed: " + path_.string());
    }

private:
    void bytes(const char* p, size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }

    template <typename T>
    void raw_le(T v) {
        char buf[sizeof(T)];
        for (size_t i = 0; i < sizeof(T); ++i) {
            buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        }
        bytes(buf, sizeof(T));
    }

    std::filesystem::path path_;
    std::ofstream out_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::filesystem::path& path) : path_(path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw FormatError("cannot open file: " + path.string());
        buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    size_t offset() const { return pos_; }
    size_t remaining() const { return buf_.size() - pos_; }

    void expect_magic(const char (&m)[7], const std::string& kind) {
        if (remaining() < 6 || std::memcmp(buf_.data() + pos_, m, 6) != 0) {
            throw FormatError(path_.string() + ": bad magic in section 'magic' at offset 0 (expected " +
                              kind + " file)");
        }
        pos_ += 6;
    }

    uint16_t u16(const std::string& section) { return raw_le<uint16_t>(section); }
    uint32_t u32(const std::string& section) { return raw_le<uint32_t>(section); }
    float f32(const std::string& section) {
        uint32_t bits = raw_le<uint32_t>(section);
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    double f64(const std::string& section) {
        uint64_t bits = raw_le<uint64_t>(section);
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    Eigen::VectorXd f32_vector(Eigen::Index n, const std::string& section) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = static_cast<double>(f32(section));
        return v;
    }
    Eigen::MatrixXd f32_matrix(Eigen::Index rows, Eigen::Index cols, const std::string& section) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index r = 0; r < rows; ++r)
                m(r, c) = static_cast<double>(f32(section));
        return m;
    }

    void expect_end() {
        if (remaining() != 0) {
            throw FormatError(path_.string() + ": " + std::to_string(remaining()) +
                              " trailing bytes after payload at offset " + std::to_string(pos_));
        }
    }

private:
    template <typename T>
    T raw_le(const std::string& section) {
        if (remaining() < sizeof(T)) {
            throw FormatError(path_.string() + ": truncated in section '" + section +
                              "' at offset " + std::to_string(pos_));
        }
        T v = 0;
        for (size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<T>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        }
        pos_ += sizeof(T);
        return v;
    }

    std::filesystem::path path_;
    std::vector<char> buf_;
    size_t pos_ = 0;
};

} // namespace uvapm::detail
