#include "mcc/error.hpp"
#include "mcc/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mcc::recognition {

bool passes_region_filter(const imgproc::Region& r, const RecognitionConfig& cfg)
{
    if (r.convex_area <= 0 || r.axis_major <= 0 || r.perimeter <= 0)
        return false;
    const double area = static_cast<double>(r.pixel_count);
    const double convexity = area / r.convex_area;
    const double axes = r.axis_minor / r.axis_major;
    const double circularity = 4.0 * std::numbers::pi * area / (r.perimeter * r.perimeter);
    return convexity > cfg.convexity_min && axes > cfg.axes_ratio_min &&
           circularity > cfg.circularity_min && circularity < cfg.circularity_max &&
           r.entropy < cfg.entropy_max;
}

std::vector<imgproc::Region> filter_regions(const std::vector<imgproc::Region>& regions,
                                            const RecognitionConfig& cfg)
{
    std::vector<imgproc::Region> out;
    std::copy_if(regions.begin(), regions.end(), std::back_inserter(out),
                 [&](const imgproc::Region& r) { return passes_region_filter(r, cfg); });
    return out;
}

std::optional<std::pair<Color, Color>> sample_quad(const ImageBuffer& img, const Quadrilateral& q)
{
    const Box bb = q.bbox();
    const int x0 = std::max(0, static_cast<int>(std::ceil(bb.x0)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(bb.y0)));
    const int x1 = std::min(img.width() - 1, static_cast<int>(std::floor(bb.x1)));
    const int y1 = std::min(img.height() - 1, static_cast<int>(std::floor(bb.y1)));
    if (!std::isfinite(bb.x0) || !std::isfinite(bb.x1) || !std::isfinite(bb.y0) ||
        !std::isfinite(bb.y1))
        return std::nullopt;

    std::array<double, 3> sum{}, sum_sq{};
    long n = 0;
    const int nc = img.channels();
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            if (!q.contains({static_cast<double>(x), static_cast<double>(y)}))
                continue;
            ++n;
            for (int c = 0; c < 3; ++c) {
                const double v = img.at(x, y, nc == 3 ? c : 0) / 255.0;
                sum[c] += v;
                sum_sq[c] += v * v;
            }
        }
    if (n == 0)
        return std::nullopt;
    Color mean{}, sd{};
    for (int c = 0; c < 3; ++c) {
        mean[c] = sum[c] / n;
        sd[c] = std::sqrt(std::max(0.0, sum_sq[c] / n - mean[c] * mean[c]));
    }
    return std::make_pair(mean, sd);
}

std::vector<PatchCandidate> extract_patches(const std::vector<imgproc::Region>& regions,
                                            const ImageBuffer& img, const RecognitionConfig& cfg)
{
    std::vector<PatchCandidate> out;
    for (const auto& r : regions) {
        if (r.contour.size() < 4)
            continue;
        const double eps = cfg.rdp_epsilon_factor * r.perimeter;
        if (rdp_simplify(r.contour, eps).size() != 4)
            continue;

        // Parallelogram around the pixel squares of the boundary.
        std::vector<Point2> corners;
        corners.reserve(r.contour.size() * 4);
        for (const auto& p : r.contour)
            for (double dx : {-0.5, 0.5})
                for (double dy : {-0.5, 0.5})
                    corners.push_back({p.x + dx, p.y + dy});
        Quadrilateral quad;
        try {
            quad = min_bounding_parallelogram(corners);
        } catch (const DegenerateGeometry&) {
            continue;
        }
        PatchCandidate pc;
        pc.quad = quad;
        pc.center = r.centroid;
        pc.area = static_cast<double>(r.pixel_count);
        pc.axis_max = r.axis_major;
        const auto stats = sample_quad(img, quad.scaled_about_centroid(cfg.sample_shrink));
        if (!stats)
            continue;
        pc.mean_color = stats->first;
        out.push_back(pc);
    }
    return out;
}

}  // namespace mcc::recognition
