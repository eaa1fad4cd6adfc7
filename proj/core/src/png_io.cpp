#include "uvapm/png_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include <png.h>

#include "uvapm/errors.hpp"

namespace uvapm {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    // libpng longjmps by default; rethrow as our format error instead.
    throw FormatError(std::string("png: ") + msg);
    (void)png;
}

void png_warn_fn(png_structp, png_const_charp) {}

struct DecodedPng {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1 (gray) or 3 (rgb)
    int bit_depth = 0; // 8 or 16
    std::vector<double> samples; // channel-interleaved, already in [0,1]
};

DecodedPng decode_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) {
        throw FormatError("cannot open PNG file: " + path.string());
    }

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw FormatError("not a PNG file: " + path.string());
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                             png_error_fn, png_warn_fn);
    if (!png) throw Error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("png_create_info_struct failed");
    }

    DecodedPng out;
    std::vector<png_byte> raw;
    try {
        png_init_io(png, fp.get());
        png_set_sig_bytes(png, 8);
        png_read_info(png, info);

        png_uint_32 w = 0, h = 0;
        int depth = 0, color_type = 0;
        png_get_IHDR(png, info, &w, &h, &depth, &color_type, nullptr, nullptr, nullptr);

        if (depth != 8 && depth != 16) {
            throw FormatError("unsupported PNG bit depth " + std::to_string(depth) +
                              " in " + path.string() + " (want 8 or 16)");
        }
        if (color_type == PNG_COLOR_TYPE_PALETTE) {
            throw FormatError("palette PNG not supported: " + path.string());
        }
        if (color_type & PNG_COLOR_MASK_ALPHA) {
            png_set_strip_alpha(png);
        }
        png_read_update_info(png, info);

        color_type = png_get_color_type(png, info);
        int channels =
            (color_type == PNG_COLOR_TYPE_GRAY) ? 1 :
            (color_type == PNG_COLOR_TYPE_RGB)  ? 3 : -1;
        if (channels < 0) {
            throw FormatError("unsupported PNG color type in " + path.string());
        }

        out.width = static_cast<int>(w);
        out.height = static_cast<int>(h);
        out.channels = channels;
        out.bit_depth = depth;

        const size_t rowbytes = png_get_rowbytes(png, info);
        raw.resize(rowbytes * h);
        std::vector<png_bytep> rows(h);
        for (png_uint_32 r = 0; r < h; ++r) rows[r] = raw.data() + r * rowbytes;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);

    const double maxval = (out.bit_depth == 8) ? 255.0 : 65535.0;
    const size_t n = static_cast<size_t>(out.width) * out.height * out.channels;
    out.samples.resize(n);
    if (out.bit_depth == 8) {
        for (size_t i = 0; i < n; ++i) out.samples[i] = raw[i] / maxval;
    } else {
        // PNG stores 16-bit samples big-endian.
        for (size_t i = 0; i < n; ++i) {
            unsigned v = (static_cast<unsigned>(raw[i * 2]) << 8) | raw[i * 2 + 1];
            out.samples[i] = v / maxval;
        }
    }
    return out;
}

void encode_png(const std::filesystem::path& path, int width, int height,
                int channels, int bit_depth, const std::vector<double>& samples) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw InvalidInputError("save: bit depth must be 8 or 16, got " +
                                std::to_string(bit_depth));
    }
    for (double v : samples) {
        if (!std::isfinite(v)) {
            throw InvalidInputError("save: non-finite pixel value");
        }
    }

    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) {
        throw FormatError("cannot open PNG file for writing: " + path.string());
    }

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              png_error_fn, png_warn_fn);
    if (!png) throw Error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("png_create_info_struct failed");
    }

    const double maxval = (bit_depth == 8) ? 255.0 : 65535.0;
    const size_t n = samples.size();
    const size_t bytes_per_sample = bit_depth / 8;
    std::vector<png_byte> raw(n * bytes_per_sample);
    for (size_t i = 0; i < n; ++i) {
        double clamped = std::clamp(samples[i], 0.0, 1.0);
        unsigned q = static_cast<unsigned>(std::floor(clamped * maxval + 0.5));
        if (bit_depth == 8) {
            raw[i] = static_cast<png_byte>(q);
        } else {
            raw[i * 2] = static_cast<png_byte>(q >> 8);
            raw[i * 2 + 1] = static_cast<png_byte>(q & 0xff);
        }
    }

    try {
        png_init_io(png, fp.get());
        int color_type = (channels == 1) ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
        png_set_IHDR(png, info, width, height, bit_depth, color_type,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);

        const size_t rowbytes = static_cast<size_t>(width) * channels * bytes_per_sample;
        std::vector<png_bytep> rows(height);
        for (int r = 0; r < height; ++r) rows[r] = raw.data() + r * rowbytes;
        png_write_image(png, rows.data());
        png_write_end(png, nullptr);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
}

} // namespace

UVImage load_image(const std::filesystem::path& path) {
    DecodedPng d = decode_png(path);
    UVImage img(d.width, d.height);
    const size_t n = img.pixel_count();
    if (d.channels == 3) {
        img.data = std::move(d.samples);
    } else {
        for (size_t i = 0; i < n; ++i) {
            img.data[i * 3 + 0] = d.samples[i];
            img.data[i * 3 + 1] = d.samples[i];
            img.data[i * 3 + 2] = d.samples[i];
        }
    }
    return img;
}

void save_image(const UVImage& img, const std::filesystem::path& path, int bit_depth) {
    if (img.width <= 0 || img.height <= 0) {
        throw InvalidInputError("save_image: empty image");
    }
    encode_png(path, img.width, img.height, 3, bit_depth, img.data);
}

ChannelPlane load_plane(const std::filesystem::path& path) {
    DecodedPng d = decode_png(path);
    if (d.channels != 1) {
        throw FormatError("expected grayscale PNG for plane data: " + path.string());
    }
    ChannelPlane plane(d.width, d.height);
    plane.data = std::move(d.samples);
    return plane;
}

void save_plane(const ChannelPlane& plane, const std::filesystem::path& path, int bit_depth) {
    if (plane.width <= 0 || plane.height <= 0) {
        throw InvalidInputError("save_plane: empty plane");
    }
    encode_png(path, plane.width, plane.height, 1, bit_depth, plane.data);
}

FaceMask load_mask(const std::filesystem::path& weights_path,
                   const std::optional<std::filesystem::path>& skin_path) {
    ChannelPlane w = load_plane(weights_path);
    if (!skin_path) return make_mask(std::move(w));

    ChannelPlane g = load_plane(*skin_path);
    // Binary PNG: anything at or above half scale counts as skin.
    for (double& v : g.data) v = v >= 0.5 ? 1.0 : 0.0;
    return make_mask(std::move(w), std::move(g));
}

} // namespace uvapm
