#include "uvapm/metrics.hpp"

#include <cmath>
#include <vector>

#include "uvapm/errors.hpp"

namespace uvapm {

namespace {

void check_pair(const UVImage& a, const UVImage& b) {
    if (!a.same_size(b)) {
        throw InvalidInputError("metrics: image dimensions differ");
    }
    if (a.width <= 0 || a.height <= 0) {
        throw InvalidInputError("metrics: empty image");
    }
}

} // namespace

double mse(const UVImage& a, const UVImage& b) {
    check_pair(a, b);
    double accum = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = (a.data[i] - b.data[i]) * 255.0;
        accum += d * d;
    }
    return accum / static_cast<double>(a.data.size());
}

double psnr(const UVImage& a, const UVImage& b) {
    const double err = mse(a, b);
    if (err <= 0.0) return 99.0;
    return std::min(99.0, 10.0 * std::log10(255.0 * 255.0 / err));
}

double ssim(const UVImage& a, const UVImage& b) {
    check_pair(a, b);
    constexpr int kWindow = 8;
    constexpr double kL = 255.0;
    constexpr double kC1 = (0.01 * kL) * (0.01 * kL);
    constexpr double kC2 = (0.03 * kL) * (0.03 * kL);

    const int w = a.width, h = a.height;
    if (w < kWindow || h < kWindow) {
        throw InvalidInputError("ssim: image smaller than the 8x8 window");
    }

    // Summed-area tables over x, y, x^2, y^2, xy per channel give O(1)
    // window statistics. Table row/col 0 are zero padding.
    const int tw = w + 1, th = h + 1;
    std::vector<double> sx(static_cast<size_t>(tw) * th);
    std::vector<double> sy(sx.size()), sxx(sx.size()), syy(sx.size()), sxy(sx.size());

    double total = 0.0;
    const double inv_n = 1.0 / (kWindow * kWindow);
    const int wins_x = w - kWindow + 1;
    const int wins_y = h - kWindow + 1;

    for (int c = 0; c < 3; ++c) {
        for (int r = 0; r < h; ++r) {
            for (int col = 0; col < w; ++col) {
                const double x = a.at(r, col, c) * 255.0;
                const double y = b.at(r, col, c) * 255.0;
                const size_t cur = static_cast<size_t>(r + 1) * tw + (col + 1);
                const size_t up = cur - tw, left = cur - 1, diag = up - 1;
                sx[cur] = x + sx[up] + sx[left] - sx[diag];
                sy[cur] = y + sy[up] + sy[left] - sy[diag];
                sxx[cur] = x * x + sxx[up] + sxx[left] - sxx[diag];
                syy[cur] = y * y + syy[up] + syy[left] - syy[diag];
                sxy[cur] = x * y + sxy[up] + sxy[left] - sxy[diag];
            }
        }

        auto window_sum = [&](const std::vector<double>& t, int r, int col) {
            const size_t r0 = static_cast<size_t>(r) * tw + col;
            const size_t r1 = static_cast<size_t>(r + kWindow) * tw + col;
            return t[r1 + kWindow] - t[r1] - t[r0 + kWindow] + t[r0];
        };

        double channel_total = 0.0;
        for (int r = 0; r < wins_y; ++r) {
            for (int col = 0; col < wins_x; ++col) {
                const double mu_x = window_sum(sx, r, col) * inv_n;
                const double mu_y = window_sum(sy, r, col) * inv_n;
                const double var_x = window_sum(sxx, r, col) * inv_n - mu_x * mu_x;
                const double var_y = window_sum(syy, r, col) * inv_n - mu_y * mu_y;
                const double cov = window_sum(sxy, r, col) * inv_n - mu_x * mu_y;

                const double num = (2.0 * mu_x * mu_y + kC1) * (2.0 * cov + kC2);
                const double den = (mu_x * mu_x + mu_y * mu_y + kC1) * (var_x + var_y + kC2);
                channel_total += num / den;
            }
        }
        total += channel_total / (static_cast<double>(wins_x) * wins_y);
    }
    return total / 3.0;
}

} // namespace uvapm
