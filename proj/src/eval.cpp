#include "mcc/eval.hpp"

#include "mcc/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mcc::eval {

Quality quality(const ChartRecord& pred, const ChartRecord& gt)
{
    Quality q;
    q.a0 = iou_box(pred.outline.bbox(), gt.outline.bbox());
    double patch = 0.0, col = 0.0;
    for (int k = 0; k < ColorCheckerModel::kPatches; ++k) {
        patch += iou_polygon(pred.patches[k], gt.patches[k]);
        col += cosine_similarity(pred.mu[k], gt.mu[k]);
    }
    q.a1 = patch / ColorCheckerModel::kPatches;
    q.a2 = col / ColorCheckerModel::kPatches;
    return q;
}

Metrics compute_metrics(const Counts& c)
{
    Metrics m;
    const double total = c.total > 0 ? static_cast<double>(c.total) : static_cast<double>(c.tp + c.fp + c.fn);
    if (total > 0)
        m.accuracy = c.tp / total;
    if (c.tp + c.fp > 0)
        m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0)
        m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (m.precision + m.recall > 0)
        m.f_measure = 2 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

ImageReport match_image(const std::string& image, const std::vector<ChartRecord>& preds,
                        const std::vector<ChartRecord>& gts, double tp_threshold)
{
    struct Pair {
        double a0;
        int p, g;
    };
    std::vector<Pair> pairs;
    for (int p = 0; p < static_cast<int>(preds.size()); ++p)
        for (int g = 0; g < static_cast<int>(gts.size()); ++g) {
            const double a0 = iou_box(preds[p].outline.bbox(), gts[g].outline.bbox());
            if (a0 > 0)
                pairs.push_back({a0, p, g});
        }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.a0 != b.a0)
            return a.a0 > b.a0;
        if (a.p != b.p)
            return a.p < b.p;
        return a.g < b.g;
    });

    ImageReport r;
    r.image = image;
    r.detections.resize(preds.size());
    std::vector<bool> gt_used(gts.size(), false), pred_used(preds.size(), false);
    for (const auto& pr : pairs) {
        if (pr.a0 < tp_threshold)
            break;
        if (pred_used[pr.p] || gt_used[pr.g])
            continue;
        pred_used[pr.p] = gt_used[pr.g] = true;
        r.detections[pr.p] = {pr.p, pr.g, quality(preds[pr.p], gts[pr.g]), true};
    }
    for (int p = 0; p < static_cast<int>(preds.size()); ++p) {
        if (pred_used[p])
            continue;
        Detection d{p, -1, {}, false};
        double best = 0.0;
        for (const auto& pr : pairs)
            if (pr.p == p && pr.a0 > best) {
                best = pr.a0;
                d.gt = pr.g;
            }
        if (d.gt >= 0)
            d.q = quality(preds[p], gts[d.gt]);
        r.detections[p] = d;
    }
    for (int g = 0; g < static_cast<int>(gts.size()); ++g)
        if (!gt_used[g])
            r.missed.push_back(g);
    r.tp = static_cast<int>(std::count(pred_used.begin(), pred_used.end(), true));
    r.fp = static_cast<int>(preds.size()) - r.tp;
    r.fn = static_cast<int>(r.missed.size());
    return r;
}

MatchReport match_and_score(const std::vector<ImageInput>& inputs, double tp_threshold)
{
    MatchReport m;
    for (const auto& in : inputs) {
        m.images.push_back(match_image(in.image, in.preds, in.gts, tp_threshold));
        m.counts.tp += m.images.back().tp;
        m.counts.fp += m.images.back().fp;
        m.counts.fn += m.images.back().fn;
    }
    m.counts.total = m.counts.tp + m.counts.fp + m.counts.fn;
    m.metrics = compute_metrics(m.counts);
    return m;
}

MatchReport match_and_score(const std::vector<std::pair<std::string, std::vector<ChartRecord>>>& preds,
                            const std::vector<std::pair<std::string, std::vector<ChartRecord>>>& gts,
                            double tp_threshold)
{
    std::map<std::string, const std::vector<ChartRecord>*> by_id;
    for (const auto& [id, recs] : preds)
        if (!by_id.emplace(id, &recs).second)
            throw ScoringError("duplicate prediction image id: " + id);
    std::vector<ImageInput> inputs;
    std::set<std::string> seen;
    for (const auto& [id, recs] : gts) {
        const auto it = by_id.find(id);
        if (it == by_id.end())
            throw ScoringError("no predictions for image id: " + id);
        if (!seen.insert(id).second)
            throw ScoringError("duplicate ground-truth image id: " + id);
        inputs.push_back({id, *it->second, recs});
    }
    for (const auto& [id, recs] : preds)
        if (!seen.contains(id))
            throw ScoringError("no ground truth for image id: " + id);
    return match_and_score(inputs, tp_threshold);
}

std::vector<CurvePoint> accuracy_curve(const std::vector<ImageReport>& reports, Metric metric, int steps)
{
    if (steps < 1)
        throw InvalidInput("curve needs at least one step");
    std::vector<double> values;
    for (const auto& r : reports)
        for (const auto& d : r.detections)
            values.push_back(metric == Metric::A0 ? d.q.a0 : metric == Metric::A1 ? d.q.a1 : d.q.a2);
    std::vector<CurvePoint> out;
    for (int i = 0; i <= steps; ++i) {
        const double tau = static_cast<double>(i) / steps;
        const auto n = std::count_if(values.begin(), values.end(), [&](double v) { return v >= tau; });
        out.push_back({tau, values.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(values.size())});
    }
    return out;
}

}  // namespace mcc::eval
