#include "mcc/error.hpp"
#include "mcc/recognition.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace mcc::recognition {

namespace {

// Drops patches whose area is far from the group median; perspective keeps
// genuine chart patches within a small factor of each other.
PatchGroup prune_area_outliers(const PatchGroup& group)
{
    std::vector<double> areas;
    for (const auto& p : group)
        areas.push_back(p.area);
    std::nth_element(areas.begin(), areas.begin() + static_cast<std::ptrdiff_t>(areas.size() / 2),
                     areas.end());
    const double med = areas[areas.size() / 2];
    PatchGroup out;
    for (const auto& p : group)
        if (p.area > med / 3.0 && p.area < med * 3.0)
            out.push_back(p);
    return out;
}

ImageBuffer crop(const ImageBuffer& img, int x0, int y0, int x1, int y1)
{
    ImageBuffer out(x1 - x0 + 1, y1 - y0 + 1, img.channels());
    const int nc = img.channels();
    for (int y = y0; y <= y1; ++y) {
        const auto src = img.row(y);
        auto dst = out.row(y - y0);
        std::copy(src.begin() + static_cast<std::ptrdiff_t>(x0) * nc,
                  src.begin() + static_cast<std::ptrdiff_t>(x1 + 1) * nc, dst.begin());
    }
    return out;
}

}  // namespace

std::vector<CheckerHypothesis> recognize(const ImageBuffer& img, const ColorCheckerModel& model,
                                         const RecognitionConfig& cfg)
{
    ImageBuffer rgb = img;
    if (img.channels() == 1) {
        rgb = ImageBuffer(img.width(), img.height(), 3);
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                for (int c = 0; c < 3; ++c)
                    rgb.at(x, y, c) = img.at(x, y);
    }

    const ImageBuffer canon = imgproc::canonize(rgb, {cfg.canonical_min_dim, cfg.wiener_window});
    // Patches are lighter than the chart's dark lattice: the regions of
    // interest are the complement of the dark foreground.
    const BinaryMask dark = imgproc::adaptive_threshold(canon, cfg.threshold_window, cfg.threshold_offset);
    const BinaryMask cells = imgproc::morph_cleanup(invert(dark));
    auto regions = imgproc::connected_components(cells, canon);
    std::erase_if(regions, [&](const imgproc::Region& r) {
        return static_cast<double>(r.pixel_count) < cfg.min_region_area;
    });
    const auto kept = filter_regions(regions, cfg);
    const auto patches = extract_patches(kept, canon, cfg);
    const auto groups = cluster_patches(patches, cfg);

    // Canonical pixel -> source pixel (pixel centers aligned).
    const double sx = static_cast<double>(canon.width()) / img.width();
    const double sy = static_cast<double>(canon.height()) / img.height();
    const Homography to_source({1.0 / sx, 0, 0.5 / sx - 0.5, 0, 1.0 / sy, 0.5 / sy - 0.5, 0, 0, 1});

    std::vector<CheckerHypothesis> out;
    for (const auto& raw : groups) {
        const PatchGroup group = prune_area_outliers(raw);
        if (static_cast<int>(group.size()) < cfg.min_group_size)
            continue;
        try {
            const GridAssignment grid = complete_grid(group);
            const auto ranked = rank_orientations(grid, model);
            const std::size_t n = std::min<std::size_t>(ranked.size(),
                                                        static_cast<std::size_t>(std::max(1, cfg.orientation_candidates)));
            for (std::size_t i = 0; i < n; ++i) {
                try {
                    const CheckerHypothesis local = build_hypothesis(group, grid, ranked[i]);
                    CheckerHypothesis h = hypothesis_from_homography((to_source * local.homography).normalized());
                    h.theta = local.theta;
                    h.delta = local.delta;
                    const auto s = score_hypothesis(h, rgb, model, cfg.sample_shrink);
                    h.cost = s.cost;
                    h.mu = s.mu;
                    h.sigma = s.sigma;
                    out.push_back(std::move(h));
                } catch (const MalformedGroup&) {
                } catch (const InvalidHypothesis&) {
                } catch (const DegenerateGeometry&) {
                }
            }
        } catch (const MalformedGroup&) {
            // group cannot be laid on the grid
        }
    }
    return out;
}

DetectionResult detect(const ImageBuffer& img, const ColorCheckerModel& model,
                       const std::optional<std::vector<Box>>& rois, std::optional<int> n_expected,
                       const RecognitionConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    if (img.empty())
        throw InvalidInput("empty image");

    std::vector<CheckerHypothesis> candidates;
    std::vector<Box> used;
    if (!rois) {
        candidates = recognize(img, model, cfg);
    } else {
        for (const Box& roi : *rois) {
            if (roi.x1 < 0 || roi.y1 < 0 || roi.x0 > img.width() - 1 || roi.y0 > img.height() - 1 ||
                roi.x1 <= roi.x0 || roi.y1 <= roi.y0)
                continue;
            const double mx = cfg.roi_margin * roi.width();
            const double my = cfg.roi_margin * roi.height();
            const int x0 = std::max(0, static_cast<int>(std::floor(roi.x0 - mx)));
            const int y0 = std::max(0, static_cast<int>(std::floor(roi.y0 - my)));
            const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(roi.x1 + mx)));
            const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(roi.y1 + my)));
            if (x1 - x0 + 1 < 24 || y1 - y0 + 1 < 24)
                continue;
            used.push_back(roi);
            try {
                const bool whole = x0 == 0 && y0 == 0 && x1 == img.width() - 1 && y1 == img.height() - 1;
                auto local = whole ? recognize(img, model, cfg)
                                   : recognize(crop(img, x0, y0, x1, y1), model, cfg);
                const Homography shift = Homography::translation(x0, y0);
                for (auto& h : local) {
                    CheckerHypothesis g = hypothesis_from_homography((shift * h.homography).normalized());
                    g.theta = h.theta;
                    g.delta = h.delta;
                    g.roi = roi;
                    try {
                        const auto s = score_hypothesis(g, img, model, cfg.sample_shrink);
                        g.cost = s.cost;
                        g.mu = s.mu;
                        g.sigma = s.sigma;
                    } catch (const InvalidHypothesis&) {
                        continue;
                    }
                    candidates.push_back(std::move(g));
                }
            } catch (const InvalidInput&) {
                // ROI too small or unusable: contributes nothing
            }
        }
    }

    DetectionResult result = select_hypotheses(std::move(candidates), n_expected, cfg.cost_threshold, cfg.nms_iou);
    result.rois = std::move(used);
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace mcc::recognition
