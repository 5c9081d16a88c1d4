// OpenMP kernels. Windowed sums go through integral images; labeling runs
// union-find per horizontal strip and stitches strip seams afterwards.

#include "mcc/error.hpp"
#include "mcc/imgproc.hpp"
#include "kernels_common.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcc::imgproc {

namespace {

// (w+1) x (h+1) summed-area table.
struct Integral {
    int w = 0;
    int h = 0;
    std::vector<long long> sum;
    std::vector<long long> sum_sq;

    long long at(const std::vector<long long>& t, int x, int y) const
    {
        return t[static_cast<std::size_t>(y) * (w + 1) + x];
    }

    detail::WindowStats window(int x, int y, int r) const
    {
        const int x0 = std::max(0, x - r), x1 = std::min(w - 1, x + r) + 1;
        const int y0 = std::max(0, y - r), y1 = std::min(h - 1, y + r) + 1;
        detail::WindowStats s;
        s.n = static_cast<long>(x1 - x0) * (y1 - y0);
        s.sum = at(sum, x1, y1) - at(sum, x0, y1) - at(sum, x1, y0) + at(sum, x0, y0);
        if (!sum_sq.empty())
            s.sum_sq = at(sum_sq, x1, y1) - at(sum_sq, x0, y1) - at(sum_sq, x1, y0) + at(sum_sq, x0, y0);
        return s;
    }
};

template <typename Get>
Integral build_integral(int w, int h, bool squares, Get&& get)
{
    Integral t;
    t.w = w;
    t.h = h;
    const std::size_t stride = static_cast<std::size_t>(w) + 1;
    t.sum.assign(stride * (h + 1), 0);
    if (squares)
        t.sum_sq.assign(stride * (h + 1), 0);
    // Row prefix sums in parallel, then column accumulation in parallel.
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        long long acc = 0, acc_sq = 0;
        for (int x = 0; x < w; ++x) {
            const long long v = get(x, y);
            acc += v;
            t.sum[(y + 1) * stride + x + 1] = acc;
            if (squares) {
                acc_sq += v * v;
                t.sum_sq[(y + 1) * stride + x + 1] = acc_sq;
            }
        }
    }
#pragma omp parallel for schedule(static)
    for (int x = 1; x <= w; ++x) {
        for (int y = 1; y <= h; ++y) {
            t.sum[y * stride + x] += t.sum[(y - 1) * stride + x];
            if (squares)
                t.sum_sq[y * stride + x] += t.sum_sq[(y - 1) * stride + x];
        }
    }
    return t;
}

int find_root(const std::vector<int>& parent, int i)
{
    while (parent[i] != i)
        i = parent[i];
    return i;
}

// Links the larger root under the smaller, so roots are raster-first pixels.
void unite(std::vector<int>& parent, int a, int b)
{
    a = find_root(parent, a);
    b = find_root(parent, b);
    if (a == b)
        return;
    if (a < b)
        parent[b] = a;
    else
        parent[a] = b;
}

}  // namespace

ImageBuffer resize_bilinear(const ImageBuffer& img, int width, int height)
{
    detail::check_resize(img, width, height);
    ImageBuffer out(width, height, img.channels());
#pragma omp parallel for schedule(static)
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
        const Integral t = build_integral(w, h, true, [&](int x, int y) { return img.at(x, y, c); });
        std::vector<double> row_var(h, 0.0);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            double acc = 0.0;
            for (int x = 0; x < w; ++x)
                acc += t.window(x, y, r).variance();
            row_var[y] = acc;
        }
        const double noise = detail::mean_noise(row_var, w);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                out.at(x, y, c) = detail::wiener_pixel(img.at(x, y, c), t.window(x, y, r), noise);
    }
    return out;
}

BinaryMask adaptive_threshold(const ImageBuffer& img, int window, double offset)
{
    detail::check_threshold_window(img, window);
    const auto luma = luma_milli(img);
    const int w = img.width(), h = img.height(), r = window / 2;
    const long long off = std::llround(offset * 1000.0);
    const Integral t = build_integral(w, h, false, [&](int x, int y) {
        return static_cast<long long>(luma[static_cast<std::size_t>(y) * w + x]);
    });
    BinaryMask out(w, h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const auto s = t.window(x, y, r);
            const long long v = luma[static_cast<std::size_t>(y) * w + x];
            out.set(x, y, v * s.n < s.sum - off * s.n);
        }
    return out;
}

BinaryMask erode3x3(const BinaryMask& mask)
{
    const int w = mask.width(), h = mask.height();
    BinaryMask out(w, h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        if (y == 0 || y == h - 1)
            continue;  // out-of-image neighbours are background
        for (int x = 1; x < w - 1; ++x) {
            bool all = true;
            for (int dy = -1; dy <= 1 && all; ++dy)
                for (int dx = -1; dx <= 1 && all; ++dx)
                    all = mask.get(x + dx, y + dy);
            out.set(x, y, all);
        }
    }
    return out;
}

BinaryMask dilate3x3(const BinaryMask& mask)
{
    const int w = mask.width(), h = mask.height();
    BinaryMask out(w, h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool any = false;
            for (int dy = -1; dy <= 1 && !any; ++dy)
                for (int dx = -1; dx <= 1 && !any; ++dx)
                    any = mask.get_or_false(x + dx, y + dy);
            out.set(x, y, any);
        }
    return out;
}

LabelImage label_components(const BinaryMask& mask)
{
    const int w = mask.width(), h = mask.height();
    const int n = w * h;
    std::vector<int> parent(static_cast<std::size_t>(n), -1);

    const int strips = std::max(1, std::min(omp_get_max_threads(), h));
    const int rows_per = (h + strips - 1) / strips;

#pragma omp parallel for schedule(static)
    for (int s = 0; s < strips; ++s) {
        const int y_begin = s * rows_per;
        const int y_end = std::min(h, y_begin + rows_per);
        for (int y = y_begin; y < y_end; ++y)
            for (int x = 0; x < w; ++x) {
                if (!mask.get(x, y))
                    continue;
                const int idx = y * w + x;
                parent[idx] = idx;
                if (x > 0 && mask.get(x - 1, y))
                    unite(parent, idx, idx - 1);
                if (y > y_begin) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx;
                        if (nx >= 0 && nx < w && mask.get(nx, y - 1))
                            unite(parent, idx, idx - w + dx);
                    }
                }
            }
    }

    // Seams between strips.
    for (int s = 1; s < strips; ++s) {
        const int y = s * rows_per;
        if (y >= h)
            break;
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y))
                continue;
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = x + dx;
                if (nx >= 0 && nx < w && mask.get(nx, y - 1))
                    unite(parent, y * w + x, (y - 1) * w + nx);
            }
        }
    }

    LabelImage out;
    out.width = w;
    out.height = h;
    out.labels.assign(static_cast<std::size_t>(n), 0);
    // Roots are the raster-first pixel of each component.
    std::vector<int> label_of_root(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        if (parent[i] == i)
            label_of_root[i] = ++out.count;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        if (parent[i] >= 0)
            out.labels[i] = label_of_root[find_root(parent, i)];
    return out;
}

}  // namespace mcc::imgproc
