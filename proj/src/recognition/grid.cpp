#include "mcc/error.hpp"
#include "mcc/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mcc::recognition {

namespace {

constexpr int kRows = ColorCheckerModel::kRows;
constexpr int kCols = ColorCheckerModel::kCols;

double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1)
        return *mid;
    return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

// Splits sorted coordinates wherever consecutive values are more than
// `gap` apart, then inserts centers where a spacing spans several pitches.
std::vector<double> cluster_axis(std::vector<double> values, double gap)
{
    std::sort(values.begin(), values.end());
    std::vector<double> centers;
    double sum = values.front();
    int n = 1;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] - values[i - 1] > gap) {
            centers.push_back(sum / n);
            sum = 0;
            n = 0;
        }
        sum += values[i];
        ++n;
    }
    centers.push_back(sum / n);

    if (centers.size() >= 3) {
        std::vector<double> spacing;
        for (std::size_t i = 1; i < centers.size(); ++i)
            spacing.push_back(centers[i] - centers[i - 1]);
        const double pitch = median(spacing);
        std::vector<double> filled{centers.front()};
        for (std::size_t i = 1; i < centers.size(); ++i) {
            const double s = centers[i] - centers[i - 1];
            const int steps = static_cast<int>(std::lround(s / pitch));
            if (s > 1.5 * pitch && steps > 1)
                for (int k = 1; k < steps; ++k)
                    filled.push_back(centers[i - 1] + s * k / steps);
            filled.push_back(centers[i]);
        }
        centers = std::move(filled);
    }
    return centers;
}

std::size_t nearest(const std::vector<double>& centers, double v)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < centers.size(); ++i)
        if (std::abs(centers[i] - v) < std::abs(centers[best] - v))
            best = i;
    return best;
}

// Detected cell (r, c) after a clockwise index rotation of theta degrees.
std::pair<int, int> rotate_cell(int r, int c, int rows, int cols, int theta)
{
    switch (theta) {
    case 90:
        return {c, rows - 1 - r};
    case 180:
        return {rows - 1 - r, cols - 1 - c};
    case 270:
        return {cols - 1 - c, r};
    default:
        return {r, c};
    }
}

}  // namespace

int GridAssignment::assigned() const
{
    return static_cast<int>(std::count_if(cell_patch.begin(), cell_patch.end(),
                                          [](int p) { return p >= 0; }));
}

std::pair<int, int> Orientation::model_cell(int r, int c, int rows, int cols) const
{
    const auto [rr, rc] = rotate_cell(r, c, rows, cols, theta);
    return {row_offset + rr, col_offset + rc};
}

GridAssignment complete_grid(const PatchGroup& group)
{
    if (group.size() < 4)
        throw MalformedGroup("group has fewer than 4 patches");

    std::vector<Quadrilateral> quads;
    quads.reserve(group.size());
    for (const auto& p : group)
        quads.push_back(p.quad);

    GridAssignment g;
    try {
        g.meq = min_enclosing_quadrilateral(quads);
        const std::array<Point2, 4> unit{Point2{0, 0}, Point2{1, 0}, Point2{1, 1}, Point2{0, 1}};
        g.image_to_grid = estimate_homography(g.meq.corners, unit);
    } catch (const FitFailure& e) {
        throw MalformedGroup(std::string("enclosing quadrilateral failed: ") + e.what());
    } catch (const DegenerateGeometry& e) {
        throw MalformedGroup(std::string("degenerate enclosing quadrilateral: ") + e.what());
    }

    std::vector<Point2> norm_centers;
    std::vector<double> us, vs, widths, heights;
    for (const auto& p : group) {
        const Point2 c = g.image_to_grid.apply(p.center);
        norm_centers.push_back(c);
        us.push_back(c.x);
        vs.push_back(c.y);
        const Box b = apply(g.image_to_grid, p.quad).bbox();
        widths.push_back(b.width());
        heights.push_back(b.height());
    }
    const auto cols = cluster_axis(us, 0.5 * median(widths));
    const auto rows = cluster_axis(vs, 0.5 * median(heights));
    g.rows = static_cast<int>(rows.size());
    g.cols = static_cast<int>(cols.size());
    const bool fits = (g.rows <= kRows && g.cols <= kCols) || (g.rows <= kCols && g.cols <= kRows);
    if (!fits)
        throw MalformedGroup("group spans " + std::to_string(g.rows) + "x" + std::to_string(g.cols) +
                             " cells");

    const std::size_t ncell = static_cast<std::size_t>(g.rows) * g.cols;
    g.cell_patch.assign(ncell, -1);
    std::vector<double> best(ncell, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < group.size(); ++i) {
        const std::size_t r = nearest(rows, norm_centers[i].y);
        const std::size_t c = nearest(cols, norm_centers[i].x);
        const std::size_t cell = r * g.cols + c;
        const double d = std::hypot(norm_centers[i].x - cols[c], norm_centers[i].y - rows[r]);
        if (d < best[cell]) {
            best[cell] = d;
            g.cell_patch[cell] = static_cast<int>(i);
        }
    }

    const Homography grid_to_image = g.image_to_grid.inverse();
    g.cell_centers.resize(ncell);
    g.cell_color.assign(ncell, std::nullopt);
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c) {
            const std::size_t cell = static_cast<std::size_t>(r) * g.cols + c;
            const int p = g.cell_patch[cell];
            if (p >= 0) {
                g.cell_centers[cell] = group[p].center;
                g.cell_color[cell] = group[p].mean_color;
            } else {
                g.cell_centers[cell] = grid_to_image.apply({cols[c], rows[r]});
            }
        }
    return g;
}

std::vector<Orientation> rank_orientations(const GridAssignment& grid,
                                           const ColorCheckerModel& model)
{
    std::vector<Orientation> out;
    for (int theta : {0, 90, 180, 270}) {
        const bool swap = theta == 90 || theta == 270;
        const int rr = swap ? grid.cols : grid.rows;
        const int rc = swap ? grid.rows : grid.cols;
        if (rr > kRows || rc > kCols)
            continue;
        const int per_row = kCols - rc + 1;
        for (int r0 = 0; r0 + rr <= kRows; ++r0)
            for (int c0 = 0; c0 + rc <= kCols; ++c0) {
                Orientation o;
                o.theta = theta;
                o.row_offset = r0;
                o.col_offset = c0;
                o.rotated_rows = rr;
                o.rotated_cols = rc;
                o.delta = r0 * per_row + c0 + 1;

                // J with the detected colors under the least-squares gain that
                // best matches the template (absorbs global illumination).
                double cross_sum = 0.0, self_sum = 0.0;
                for (int r = 0; r < grid.rows; ++r)
                    for (int c = 0; c < grid.cols; ++c) {
                        const auto& col = grid.cell_color[static_cast<std::size_t>(r) * grid.cols + c];
                        if (!col)
                            continue;
                        const auto [mr, mc] = o.model_cell(r, c, grid.rows, grid.cols);
                        const Color& ref = model.color(mr * kCols + mc);
                        for (int ch = 0; ch < 3; ++ch) {
                            cross_sum += ref[ch] * (*col)[ch];
                            self_sum += (*col)[ch] * (*col)[ch];
                        }
                    }
                o.gain = self_sum > 0 ? std::max(0.0, cross_sum / self_sum) : 1.0;
                double j = 0.0;
                for (int r = 0; r < grid.rows; ++r)
                    for (int c = 0; c < grid.cols; ++c) {
                        const auto& col = grid.cell_color[static_cast<std::size_t>(r) * grid.cols + c];
                        if (!col)
                            continue;
                        const auto [mr, mc] = o.model_cell(r, c, grid.rows, grid.cols);
                        const Color& ref = model.color(mr * kCols + mc);
                        for (int ch = 0; ch < 3; ++ch) {
                            const double diff = ref[ch] - o.gain * (*col)[ch];
                            j += diff * diff;
                        }
                    }
                o.cost = j;
                out.push_back(o);
            }
    }
    if (out.empty())
        throw MalformedGroup("sub-grid does not fit the 4x6 template in any rotation");

    constexpr double tie = 1e-12;
    std::stable_sort(out.begin(), out.end(), [](const Orientation& a, const Orientation& b) {
        return a.cost < b.cost;
    });
    // Among (numerically) equal minima prefer smaller delta, then smaller theta.
    auto best = out.begin();
    for (auto it = out.begin(); it != out.end() && it->cost <= out.front().cost + tie; ++it)
        if (it->delta < best->delta || (it->delta == best->delta && it->theta < best->theta))
            best = it;
    std::rotate(out.begin(), best, best + 1);
    return out;
}

Orientation fit_orientation(const GridAssignment& grid, const ColorCheckerModel& model)
{
    return rank_orientations(grid, model).front();
}

CheckerHypothesis hypothesis_from_homography(const Homography& h)
{
    CheckerHypothesis hyp;
    hyp.homography = h;
    hyp.corners = apply(h, ColorCheckerModel::chart_quad());
    for (int k = 0; k < ColorCheckerModel::kPatches; ++k)
        hyp.patch_quads[k] = apply(h, ColorCheckerModel::patch_quad(k));
    return hyp;
}

CheckerHypothesis build_hypothesis(const PatchGroup& group, const GridAssignment& grid,
                                   const Orientation& orient)
{
    std::vector<Point2> model_pts, image_pts;
    std::vector<std::pair<int, int>> used;  // (patch, model index)
    std::vector<int> rows_seen, cols_seen;
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c) {
            const int p = grid.patch_at(r, c);
            if (p < 0)
                continue;
            const auto [mr, mc] = orient.model_cell(r, c, grid.rows, grid.cols);
            model_pts.push_back(ColorCheckerModel::cell_center(mr, mc));
            image_pts.push_back(group[p].center);
            used.emplace_back(p, mr * kCols + mc);
            rows_seen.push_back(mr);
            cols_seen.push_back(mc);
        }
    std::sort(rows_seen.begin(), rows_seen.end());
    std::sort(cols_seen.begin(), cols_seen.end());
    const bool spans_rows = rows_seen.size() > 1 && rows_seen.front() != rows_seen.back();
    const bool spans_cols = cols_seen.size() > 1 && cols_seen.front() != cols_seen.back();
    if (model_pts.size() < 4 || !spans_rows || !spans_cols)
        throw MalformedGroup("assigned patches are collinear");

    Homography h;
    try {
        h = estimate_homography(model_pts, image_pts);
        // Few patches: add their corners, matched to model corners through the
        // center-only fit.
        if (used.size() < 8) {
            const Homography inv = h.inverse();
            for (const auto& [p, k] : used) {
                const Quadrilateral mq = ColorCheckerModel::patch_quad(k);
                for (const auto& corner : group[p].quad.corners) {
                    const Point2 m = inv.apply(corner);
                    const auto closest = std::min_element(
                        mq.corners.begin(), mq.corners.end(),
                        [&](const Point2& a, const Point2& b) { return distance(a, m) < distance(b, m); });
                    model_pts.push_back(*closest);
                    image_pts.push_back(corner);
                }
            }
            h = estimate_homography(model_pts, image_pts);
        }
    } catch (const DegenerateGeometry& e) {
        throw MalformedGroup(std::string("homography fit failed: ") + e.what());
    }

    CheckerHypothesis hyp = hypothesis_from_homography(h);
    hyp.theta = orient.theta;
    hyp.delta = orient.delta;
    for (const auto& p : hyp.corners.corners)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw MalformedGroup("chart projects to infinity");
    if (signed_area(hyp.corners.corners) <= 0 || !hyp.corners.is_convex())
        throw MalformedGroup("chart outline is mirrored or not convex");
    return hyp;
}

}  // namespace mcc::recognition
