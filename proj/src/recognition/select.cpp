#include "mcc/error.hpp"
#include "mcc/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcc::recognition {

HypothesisScore score_hypothesis(const CheckerHypothesis& h, const ImageBuffer& img,
                                 const ColorCheckerModel& model, double shrink)
{
    HypothesisScore s;
    int inside = 0;
    double angular = 0.0, spread = 0.0;
    for (int k = 0; k < ColorCheckerModel::kPatches; ++k) {
        const auto stats = sample_quad(img, h.patch_quads[k].scaled_about_centroid(shrink));
        if (!stats) {
            s.mu[k] = {0, 0, 0};
            s.sigma[k] = {0, 0, 0};
            angular += 2.0;
            continue;
        }
        ++inside;
        s.mu[k] = stats->first;
        s.sigma[k] = stats->second;
        angular += 1.0 - cosine_similarity(s.mu[k], model.color(k));
        for (double v : s.sigma[k])
            spread += v * v;
    }
    if (inside == 0)
        throw InvalidHypothesis("every patch of the hypothesis lies outside the image");
    s.cost = angular + spread;
    return s;
}

DetectionResult select_hypotheses(std::vector<CheckerHypothesis> candidates,
                                  std::optional<int> n_expected, double cost_threshold,
                                  double iou_threshold)
{
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const CheckerHypothesis& a, const CheckerHypothesis& b) {
                         return a.cost < b.cost;
                     });
    DetectionResult result;
    for (auto& c : candidates) {
        const Box box = c.bbox();
        const bool overlaps = std::any_of(
            result.hypotheses.begin(), result.hypotheses.end(),
            [&](const CheckerHypothesis& kept) { return iou_box(kept.bbox(), box) >= iou_threshold; });
        if (!overlaps)
            result.hypotheses.push_back(std::move(c));
    }
    if (n_expected) {
        if (static_cast<int>(result.hypotheses.size()) > *n_expected)
            result.hypotheses.resize(static_cast<std::size_t>(std::max(0, *n_expected)));
    } else {
        std::erase_if(result.hypotheses,
                      [&](const CheckerHypothesis& h) { return !(h.cost < cost_threshold); });
    }
    return result;
}

}  // namespace mcc::recognition
