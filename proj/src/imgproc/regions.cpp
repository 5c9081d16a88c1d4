#include "mcc/error.hpp"
#include "mcc/imgproc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace mcc::imgproc {

namespace {

// Clockwise on screen (y down): E, SE, S, SW, W, NW, N, NE.
constexpr std::array<int, 8> kDx = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr std::array<int, 8> kDy = {0, 1, 1, 1, 0, -1, -1, -1};

// Moore-neighbour tracing of the outer boundary with Jacob's stopping rule.
std::vector<Point2> trace_outer(const LabelImage& lab, int label, int sx, int sy)
{
    auto inside = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < lab.width && y < lab.height &&
               lab.labels[static_cast<std::size_t>(y) * lab.width + x] == label;
    };

    std::vector<Point2> contour{{static_cast<double>(sx), static_cast<double>(sy)}};
    int x = sx, y = sy;
    int search = 4;  // the start pixel's W, NW, N and NE neighbours are outside
    int first_dir = -1;
    for (;;) {
        int dir = -1;
        for (int k = 0; k < 8; ++k) {
            const int d = (search + k) % 8;
            if (inside(x + kDx[d], y + kDy[d])) {
                dir = d;
                break;
            }
        }
        if (dir < 0)
            break;  // isolated pixel
        if (x == sx && y == sy) {
            if (first_dir < 0)
                first_dir = dir;
            else if (dir == first_dir)
                break;
        }
        x += kDx[dir];
        y += kDy[dir];
        contour.push_back({static_cast<double>(x), static_cast<double>(y)});
        search = (dir % 2 == 0) ? (dir + 6) % 8 : (dir + 5) % 8;
        if (contour.size() > static_cast<std::size_t>(4) * lab.width * lab.height + 8)
            break;
    }
    // The walk re-enters the start pixel before stopping.
    if (contour.size() > 1 && contour.back() == contour.front())
        contour.pop_back();
    return contour;
}

double polygon_perimeter(const std::vector<Point2>& poly)
{
    double p = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        p += distance(poly[i], poly[(i + 1) % poly.size()]);
    return p;
}

}  // namespace

double chain_code_length(const std::vector<Point2>& closed_contour)
{
    if (closed_contour.size() < 2)
        return 0.0;
    return polygon_perimeter(closed_contour);
}

double shannon_entropy(const std::vector<long>& histogram)
{
    long total = 0;
    for (long c : histogram)
        total += c;
    if (total == 0)
        return 0.0;
    double h = 0.0;
    for (long c : histogram) {
        if (c == 0)
            continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return std::max(0.0, h);
}

std::vector<Region> connected_components(const BinaryMask& mask, const ImageBuffer& img)
{
    if (mask.width() != img.width() || mask.height() != img.height())
        throw InvalidInput("mask and image dimensions differ");
    const LabelImage lab = label_components(mask);
    const int w = lab.width, h = lab.height;
    if (lab.count == 0)
        return {};

    const auto luma = luma_milli(img);

    // Bucket pixels by label (counting sort); labels follow raster order of
    // their first pixel, so each bucket's first entry is the trace start.
    std::vector<int> offsets(static_cast<std::size_t>(lab.count) + 2, 0);
    for (int l : lab.labels)
        if (l)
            ++offsets[l + 1];
    for (std::size_t i = 1; i < offsets.size(); ++i)
        offsets[i] += offsets[i - 1];
    std::vector<int> pixels(static_cast<std::size_t>(offsets.back()));
    {
        std::vector<int> cursor(offsets.begin(), offsets.end() - 1);
        for (int i = 0; i < w * h; ++i)
            if (lab.labels[i])
                pixels[cursor[lab.labels[i]]++] = i;
    }

    std::vector<Region> regions(static_cast<std::size_t>(lab.count));
#pragma omp parallel for schedule(dynamic, 16)
    for (int label = 1; label <= lab.count; ++label) {
        Region& r = regions[label - 1];
        r.label = label;
        const int begin = offsets[label], end = offsets[label + 1];
        r.pixel_count = end - begin;

        double sx = 0, sy = 0;
        int x0 = w, y0 = h, x1 = -1, y1 = -1;
        std::vector<long> hist(256, 0);
        for (int k = begin; k < end; ++k) {
            const int idx = pixels[k];
            const int x = idx % w, y = idx / w;
            sx += x;
            sy += y;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
            ++hist[std::clamp((luma[idx] + 500) / 1000, 0, 255)];
        }
        const double n = static_cast<double>(r.pixel_count);
        r.centroid = {sx / n, sy / n};
        r.bbox = {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1),
                  static_cast<double>(y1)};

        // Normalized second central moments; each pixel is a unit square,
        // hence the 1/12 terms.
        double uxx = 0, uyy = 0, uxy = 0;
        for (int k = begin; k < end; ++k) {
            const double dx = pixels[k] % w - r.centroid.x;
            const double dy = pixels[k] / w - r.centroid.y;
            uxx += dx * dx;
            uyy += dy * dy;
            uxy += dx * dy;
        }
        uxx = uxx / n + 1.0 / 12.0;
        uyy = uyy / n + 1.0 / 12.0;
        uxy = uxy / n;
        const double common = std::sqrt((uxx - uyy) * (uxx - uyy) + 4.0 * uxy * uxy);
        r.axis_major = 2.0 * std::numbers::sqrt2 * std::sqrt(uxx + uyy + common);
        r.axis_minor = 2.0 * std::numbers::sqrt2 * std::sqrt(std::max(0.0, uxx + uyy - common));

        r.entropy = shannon_entropy(hist);

        const int start = pixels[begin];
        r.contour = trace_outer(lab, label, start % w, start / w);
        // A lone pixel has no chain steps; use its crack length.
        r.perimeter = r.contour.size() < 2 ? 4.0 : chain_code_length(r.contour);

        // Lattice hull area plus half its perimeter plus one: the pixel-square
        // area of the hull (exact for axis-aligned rectangles, never below the
        // pixel count).
        const auto hull = convex_hull(r.contour);
        const double hull_area = hull.size() >= 3 ? std::abs(signed_area(hull)) : 0.0;
        const double hull_perim = hull.size() >= 2 ? polygon_perimeter(hull) : 0.0;
        r.convex_area = hull_area + hull_perim / 2.0 + 1.0;
    }
    return regions;
}

}  // namespace mcc::imgproc
