#pragma once

// Per-pixel arithmetic shared by the serial and OpenMP kernels, so that both
// produce bit-identical output.

#include "mcc/error.hpp"
#include "mcc/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace mcc::imgproc::detail {

struct WindowStats {
    long n = 0;
    long long sum = 0;
    long long sum_sq = 0;

    double mean() const { return static_cast<double>(sum) / static_cast<double>(n); }
    double variance() const
    {
        const double nn = static_cast<double>(n);
        return static_cast<double>(n * sum_sq - sum * sum) / (nn * nn);
    }
};

inline std::uint8_t clamp_u8(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Noise power: mean local variance, accumulated row by row in order.
inline double mean_noise(const std::vector<double>& row_var, int width)
{
    double total = 0.0;
    for (double v : row_var)
        total += v;
    return total / (static_cast<double>(width) * static_cast<double>(row_var.size()));
}

inline std::uint8_t wiener_pixel(std::uint8_t value, const WindowStats& s, double noise)
{
    const double mean = s.mean();
    const double var = s.variance();
    if (var <= noise)
        return clamp_u8(mean);
    return clamp_u8(mean + (var - noise) / var * (static_cast<double>(value) - mean));
}

inline void check_window(const ImageBuffer& img, int window)
{
    if (img.empty())
        throw InvalidInput("empty image");
    if (window < 1 || window % 2 == 0)
        throw InvalidInput("filter window must be odd and positive");
}

inline void check_threshold_window(const ImageBuffer& img, int window)
{
    check_window(img, window);
    if (window < 3)
        throw InvalidInput("threshold window must be at least 3");
    if (window > img.width() || window > img.height())
        throw InvalidInput("threshold window larger than image");
}

inline void check_resize(const ImageBuffer& img, int width, int height)
{
    if (img.empty())
        throw InvalidInput("empty image");
    if (width < 1 || height < 1)
        throw InvalidInput("resize target must be positive");
}

// Pixel centers aligned: src = (dst + 0.5) * scale - 0.5, edges clamped.
inline void resize_row(const ImageBuffer& src, ImageBuffer& dst, int y)
{
    const double sy = (y + 0.5) * static_cast<double>(src.height()) / dst.height() - 0.5;
    const double cy = std::clamp(sy, 0.0, static_cast<double>(src.height() - 1));
    const int y0 = static_cast<int>(std::floor(cy));
    const int y1 = std::min(y0 + 1, src.height() - 1);
    const double fy = cy - y0;
    const double scale_x = static_cast<double>(src.width()) / dst.width();
    for (int x = 0; x < dst.width(); ++x) {
        const double sx = std::clamp((x + 0.5) * scale_x - 0.5, 0.0,
                                     static_cast<double>(src.width() - 1));
        const int x0 = static_cast<int>(std::floor(sx));
        const int x1 = std::min(x0 + 1, src.width() - 1);
        const double fx = sx - x0;
        for (int c = 0; c < src.channels(); ++c) {
            const double top = src.at(x0, y0, c) * (1.0 - fx) + src.at(x1, y0, c) * fx;
            const double bot = src.at(x0, y1, c) * (1.0 - fx) + src.at(x1, y1, c) * fx;
            dst.at(x, y, c) = clamp_u8(top * (1.0 - fy) + bot * fy);
        }
    }
}

}  // namespace mcc::imgproc::detail
