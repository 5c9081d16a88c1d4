// Reference implementations of the data-parallel kernels. Plain loops with
// brute-force windows; kept for testing the OpenMP versions.

#include "mcc/error.hpp"
#include "mcc/imgproc.hpp"
#include "kernels_common.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace mcc::imgproc::serial {

ImageBuffer resize_bilinear(const ImageBuffer& img, int width, int height)
{
    detail::check_resize(img, width, height);
    ImageBuffer out(width, height, img.channels());
    for (int y = 0; y < height; ++y)
        detail::resize_row(img, out, y);
    return out;
}

ImageBuffer wiener_filter(const ImageBuffer& img, int window)
{
    detail::check_window(img, window);
    const int r = window / 2;
    const int w = img.width(), h = img.height(), nc = img.channels();
    ImageBuffer out(w, h, nc);
    for (int c = 0; c < nc; ++c) {
        std::vector<detail::WindowStats> stats(static_cast<std::size_t>(w) * h);
        std::vector<double> row_var(h, 0.0);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                detail::WindowStats s;
                for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy)
                    for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) {
                        const long v = img.at(xx, yy, c);
                        s.n += 1;
                        s.sum += v;
                        s.sum_sq += v * v;
                    }
                stats[static_cast<std::size_t>(y) * w + x] = s;
                row_var[y] += s.variance();
            }
        }
        const double noise = detail::mean_noise(row_var, w);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                out.at(x, y, c) =
                    detail::wiener_pixel(img.at(x, y, c), stats[static_cast<std::size_t>(y) * w + x], noise);
    }
    return out;
}

BinaryMask adaptive_threshold(const ImageBuffer& img, int window, double offset)
{
    detail::check_threshold_window(img, window);
    const auto luma = luma_milli(img);
    const int w = img.width(), h = img.height(), r = window / 2;
    const long long off = std::llround(offset * 1000.0);
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            long long n = 0, sum = 0;
            for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy)
                for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) {
                    sum += luma[static_cast<std::size_t>(yy) * w + xx];
                    ++n;
                }
            const long long v = luma[static_cast<std::size_t>(y) * w + x];
            out.set(x, y, v * n < sum - off * n);
        }
    return out;
}

BinaryMask erode3x3(const BinaryMask& mask)
{
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            bool all = true;
            for (int dy = -1; dy <= 1 && all; ++dy)
                for (int dx = -1; dx <= 1 && all; ++dx)
                    all = mask.get_or_false(x + dx, y + dy);
            out.set(x, y, all);
        }
    return out;
}

BinaryMask dilate3x3(const BinaryMask& mask)
{
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            bool any = false;
            for (int dy = -1; dy <= 1 && !any; ++dy)
                for (int dx = -1; dx <= 1 && !any; ++dx)
                    any = mask.get_or_false(x + dx, y + dy);
            out.set(x, y, any);
        }
    return out;
}

// Breadth-first flood fill in raster order of seeds.
LabelImage label_components(const BinaryMask& mask)
{
    LabelImage out;
    out.width = mask.width();
    out.height = mask.height();
    out.labels.assign(static_cast<std::size_t>(out.width) * out.height, 0);
    std::deque<std::pair<int, int>> queue;
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
            const auto idx = static_cast<std::size_t>(y) * out.width + x;
            if (!mask.get(x, y) || out.labels[idx] != 0)
                continue;
            const int label = ++out.count;
            out.labels[idx] = label;
            queue.emplace_back(x, y);
            while (!queue.empty()) {
                auto [cx, cy] = queue.front();
                queue.pop_front();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if (!mask.get_or_false(nx, ny))
                            continue;
                        auto& l = out.labels[static_cast<std::size_t>(ny) * out.width + nx];
                        if (l == 0) {
                            l = label;
                            queue.emplace_back(nx, ny);
                        }
                    }
            }
        }
    return out;
}

}  // namespace mcc::imgproc::serial
