#pragma once

#include "mcc/geometry.hpp"
#include "mcc/model.hpp"

#include <array>
#include <string>
#include <vector>

namespace mcc::eval {

// The parts of a chart that the metrics compare; patches are indexed by
// model cell.
struct ChartRecord {
    Quadrilateral outline;
    std::array<Quadrilateral, ColorCheckerModel::kPatches> patches{};
    std::array<Color, ColorCheckerModel::kPatches> mu{};
};

struct Quality {
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
};

// a0 on bounding boxes, a1 mean patch IOU, a2 mean color cosine.
Quality quality(const ChartRecord& pred, const ChartRecord& gt);

struct Detection {
    int pred = -1;
    int gt = -1;  // best-overlap ground truth, -1 when none overlaps
    Quality q;
    bool true_positive = false;
};

struct ImageReport {
    std::string image;
    std::vector<Detection> detections;  // one per prediction
    std::vector<int> missed;            // unmatched ground-truth indices
    int tp = 0;
    int fp = 0;
    int fn = 0;
};

struct Counts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long total = 0;  // tp + fp + fn unless given explicitly
};

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

Metrics compute_metrics(const Counts& c);

struct MatchReport {
    std::vector<ImageReport> images;
    Counts counts;
    Metrics metrics;
};

ImageReport match_image(const std::string& image, const std::vector<ChartRecord>& preds,
                        const std::vector<ChartRecord>& gts, double tp_threshold = 0.5);

struct ImageInput {
    std::string image;
    std::vector<ChartRecord> preds;
    std::vector<ChartRecord> gts;
};

MatchReport match_and_score(const std::vector<ImageInput>& inputs, double tp_threshold = 0.5);

// Pairs predictions with ground truth by image id; throws ScoringError when
// an id is missing on either side.
MatchReport match_and_score(const std::vector<std::pair<std::string, std::vector<ChartRecord>>>& preds,
                            const std::vector<std::pair<std::string, std::vector<ChartRecord>>>& gts,
                            double tp_threshold = 0.5);

enum class Metric { A0, A1, A2 };

struct CurvePoint {
    double tau = 0.0;
    double fraction = 0.0;
};

// Fraction of detections (TP + FP) with metric >= tau on tau = 0, 1/steps, ..., 1.
std::vector<CurvePoint> accuracy_curve(const std::vector<ImageReport>& reports, Metric metric,
                                       int steps = 100);

}  // namespace mcc::eval
