#pragma once

#include "mcc/geometry.hpp"
#include "mcc/image.hpp"
#include "mcc/imgproc.hpp"
#include "mcc/model.hpp"

#include <array>
#include <optional>
#include <vector>

namespace mcc::recognition {

struct RecognitionConfig {
    int canonical_min_dim = 400;
    int wiener_window = 5;
    int threshold_window = 15;
    double threshold_offset = 3.0;

    double rdp_epsilon_factor = 0.03;
    double convexity_min = 0.90;
    double axes_ratio_min = 0.4;
    double circularity_min = 0.65;
    double circularity_max = 0.97;
    double entropy_max = 4.9;
    double min_region_area = 16.0;

    double b0_factor = 1.65;
    int min_group_size = 4;

    double sample_shrink = 0.7;
    // Alternative (theta, delta) placements turned into hypotheses per group.
    int orientation_candidates = 3;

    double nms_iou = 0.5;
    double cost_threshold = 1.5;
    // ROIs grow by this fraction of their size on each side before cropping.
    double roi_margin = 0.1;
};

struct PatchCandidate {
    Quadrilateral quad;
    Point2 center;
    double area = 0.0;
    double axis_max = 0.0;
    Color mean_color{};
};

using PatchGroup = std::vector<PatchCandidate>;

// Sub-grid found in one patch group, in the group's own row/column frame.
struct GridAssignment {
    int rows = 0;
    int cols = 0;
    std::vector<int> cell_patch;                // rows*cols, patch index or -1
    std::vector<std::optional<Color>> cell_color;
    std::vector<Point2> cell_centers;           // image coords, missing cells estimated
    Homography image_to_grid;                   // image -> unit square of the MEQ
    Quadrilateral meq;

    int patch_at(int r, int c) const { return cell_patch[r * cols + c]; }
    int assigned() const;
};

// Rotation (degrees clockwise) and placement of a sub-grid inside the chart.
struct Orientation {
    int theta = 0;
    int delta = 1;       // 1-based row-major placement index
    int row_offset = 0;  // model row of the rotated sub-grid's first row
    int col_offset = 0;
    int rotated_rows = 0;
    int rotated_cols = 0;
    double cost = 0.0;   // J
    double gain = 1.0;

    // Model cell of detected cell (r, c).
    std::pair<int, int> model_cell(int r, int c, int rows, int cols) const;
};

struct CheckerHypothesis {
    Quadrilateral corners;  // clockwise, first corner next to patch 0
    Homography homography;  // model plane -> image
    std::array<Quadrilateral, ColorCheckerModel::kPatches> patch_quads{};
    int theta = 0;
    int delta = 1;
    std::array<Color, ColorCheckerModel::kPatches> mu{};
    std::array<Color, ColorCheckerModel::kPatches> sigma{};
    double cost = 0.0;
    std::optional<Box> roi;

    Box bbox() const { return corners.bbox(); }
};

struct DetectionResult {
    std::vector<CheckerHypothesis> hypotheses;
    double seconds = 0.0;
    std::vector<Box> rois;
};

std::vector<imgproc::Region> filter_regions(const std::vector<imgproc::Region>& regions,
                                            const RecognitionConfig& cfg = {});

bool passes_region_filter(const imgproc::Region& r, const RecognitionConfig& cfg = {});

std::vector<PatchCandidate> extract_patches(const std::vector<imgproc::Region>& regions,
                                            const ImageBuffer& img,
                                            const RecognitionConfig& cfg = {});

// d_ij = (1 + |A_i - A_j| / (A_i + A_j)) * |X_i - X_j|.
double patch_distance(const PatchCandidate& a, const PatchCandidate& b);

// Connected components of the B0-similarity graph, small groups dropped.
std::vector<PatchGroup> cluster_patches(const std::vector<PatchCandidate>& patches,
                                        const RecognitionConfig& cfg = {});

// Same graph, as component ids per patch (no size filter).
std::vector<int> similarity_components(const std::vector<PatchCandidate>& patches,
                                       double b0_factor = 1.65);

GridAssignment complete_grid(const PatchGroup& group);

// All (theta, delta) placements, ascending J.
std::vector<Orientation> rank_orientations(const GridAssignment& grid,
                                           const ColorCheckerModel& model);
Orientation fit_orientation(const GridAssignment& grid, const ColorCheckerModel& model);

// Chart pose from a placed sub-grid; homography refit on the assigned patches.
CheckerHypothesis build_hypothesis(const PatchGroup& group, const GridAssignment& grid,
                                   const Orientation& orient);

// Chart pose from an explicit model-plane -> image homography.
CheckerHypothesis hypothesis_from_homography(const Homography& h);

struct HypothesisScore {
    double cost = 0.0;
    std::array<Color, ColorCheckerModel::kPatches> mu{};
    std::array<Color, ColorCheckerModel::kPatches> sigma{};
};

HypothesisScore score_hypothesis(const CheckerHypothesis& h, const ImageBuffer& img,
                                 const ColorCheckerModel& model, double shrink = 0.7);

// Mean and per-channel standard deviation of the pixels whose centers lie in
// the quad; nullopt when no pixel center does.
std::optional<std::pair<Color, Color>> sample_quad(const ImageBuffer& img,
                                                   const Quadrilateral& q);

DetectionResult select_hypotheses(std::vector<CheckerHypothesis> candidates,
                                  std::optional<int> n_expected, double cost_threshold = 1.5,
                                  double iou_threshold = 0.5);

// Recognition on one image (or crop); hypotheses in its pixel coordinates,
// before selection.
std::vector<CheckerHypothesis> recognize(const ImageBuffer& img, const ColorCheckerModel& model,
                                         const RecognitionConfig& cfg = {});

DetectionResult detect(const ImageBuffer& img, const ColorCheckerModel& model,
                       const std::optional<std::vector<Box>>& rois = std::nullopt,
                       std::optional<int> n_expected = std::nullopt,
                       const RecognitionConfig& cfg = {});

}  // namespace mcc::recognition
