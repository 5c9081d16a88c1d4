#pragma once

// Independent oracles and fixtures shared by the unit and acceptance tests.

#include "mcc/geometry.hpp"
#include "mcc/image.hpp"
#include "mcc/model.hpp"
#include "mcc/eval.hpp"
#include "mcc/imgproc.hpp"
#include "mcc/recognition.hpp"
#include "mcc/render.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace mcc::testing {

inline ImageBuffer random_image(int w, int h, int channels, std::mt19937_64& rng)
{
    ImageBuffer img(w, h, channels);
    std::uniform_int_distribution<int> u(0, 255);
    for (auto& v : img.data())
        v = static_cast<std::uint8_t>(u(rng));
    return img;
}

// Blobby mask: random rectangles and discs, so components have real shapes.
inline BinaryMask random_mask(int w, int h, std::mt19937_64& rng, int shapes = 25)
{
    BinaryMask m(w, h);
    std::uniform_int_distribution<int> ux(0, w - 1), uy(0, h - 1), us(1, std::max(2, std::min(w, h) / 6));
    for (int s = 0; s < shapes; ++s) {
        const int cx = ux(rng), cy = uy(rng), r = us(rng);
        const bool disc = rng() % 2 == 0;
        for (int y = std::max(0, cy - r); y <= std::min(h - 1, cy + r); ++y)
            for (int x = std::max(0, cx - r); x <= std::min(w - 1, cx + r); ++x)
                if (!disc || (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
                    m.set(x, y, true);
    }
    std::bernoulli_distribution speck(0.01);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (speck(rng))
                m.set(x, y, !m.get(x, y));
    return m;
}

// Plain union-find.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t i)
    {
        while (parent_[i] != i)
            i = parent_[i] = parent_[parent_[i]];
        return i;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

// True when two labelings induce the same partition.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if ((a[i] == a[j]) != (b[i] == b[j]))
                return false;
    return true;
}

// Point-in-convex-polygon by edge signs (either orientation).
inline bool inside_convex(const std::vector<Point2>& poly, const Point2& p)
{
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
        const double c = cross(b - a, p - a);
        pos |= c > 0;
        neg |= c < 0;
    }
    return !(pos && neg);
}

// IOU of two convex polygons by sampling an n x n grid over their joint bbox.
inline double raster_iou(const std::vector<Point2>& a, const std::vector<Point2>& b, int n = 1000)
{
    std::vector<Point2> all = a;
    all.insert(all.end(), b.begin(), b.end());
    const Box box = bounding_box(all);
    long inter = 0, uni = 0;
    for (int j = 0; j < n; ++j) {
        const double y = box.y0 + (j + 0.5) * box.height() / n;
        for (int i = 0; i < n; ++i) {
            const Point2 p{box.x0 + (i + 0.5) * box.width() / n, y};
            const bool ia = inside_convex(a, p), ib = inside_convex(b, p);
            inter += ia && ib;
            uni += ia || ib;
        }
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline std::vector<Point2> box_poly(const Box& b)
{
    return {{b.x0, b.y0}, {b.x1, b.y0}, {b.x1, b.y1}, {b.x0, b.y1}};
}

inline std::vector<Point2> quad_poly(const Quadrilateral& q) { return {q.corners.begin(), q.corners.end()}; }

// Hull by brute force: a point is a vertex when some line through it has
// every other point on one side (gift wrapping without ordering shortcuts).
inline double hull_area_bruteforce(const std::vector<Point2>& pts)
{
    // Jarvis march.
    const std::size_t n = pts.size();
    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (pts[i].x < pts[start].x || (pts[i].x == pts[start].x && pts[i].y < pts[start].y))
            start = i;
    std::vector<Point2> hull;
    std::size_t cur = start;
    do {
        hull.push_back(pts[cur]);
        std::size_t next = (cur + 1) % n;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = cross(pts[next] - pts[cur], pts[i] - pts[cur]);
            if (c < 0 || (c == 0 && distance(pts[cur], pts[i]) > distance(pts[cur], pts[next])))
                next = i;
        }
        cur = next;
    } while (cur != start && hull.size() <= n);
    double a = 0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        a += cross(hull[i], hull[(i + 1) % hull.size()]);
    return std::abs(a) / 2;
}

// Minimum-area enclosing rectangle: some side is collinear with a hull edge,
// so trying every pair of points as an edge direction is exhaustive.
inline double min_rect_area(const std::vector<Point2>& pts)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (i == j)
                continue;
            const Point2 d = pts[j] - pts[i];
            const double len = norm(d);
            if (len == 0)
                continue;
            const Point2 u{d.x / len, d.y / len}, v{-u.y, u.x};
            double u0 = 1e300, u1 = -1e300, v0 = 1e300, v1 = -1e300;
            for (const auto& p : pts) {
                u0 = std::min(u0, dot(p, u));
                u1 = std::max(u1, dot(p, u));
                v0 = std::min(v0, dot(p, v));
                v1 = std::max(v1, dot(p, v));
            }
            best = std::min(best, (u1 - u0) * (v1 - v0));
        }
    return best;
}

// 4 x 6 grid of unit patches with the given gap, as clockwise quads.
inline std::vector<Quadrilateral> grid_patches(double patch, double gap, int rows = 4, int cols = 6)
{
    std::vector<Quadrilateral> out;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const double x = c * (patch + gap), y = r * (patch + gap);
            out.push_back({{Point2{x, y}, Point2{x + patch, y}, Point2{x + patch, y + patch}, Point2{x, y + patch}}});
        }
    return out;
}

inline double frobenius_relative(const Homography& a, const Homography& b)
{
    // Both scaled to unit Frobenius norm with matching sign.
    auto unit = [](const Homography& h) {
        std::array<double, 9> v = h.values();
        double n = 0;
        for (double x : v)
            n += x * x;
        n = std::sqrt(n);
        std::size_t big = 0;
        for (std::size_t i = 1; i < 9; ++i)
            if (std::abs(v[i]) > std::abs(v[big]))
                big = i;
        const double s = (v[big] < 0 ? -1.0 : 1.0) / n;
        for (double& x : v)
            x *= s;
        return v;
    };
    const auto ua = unit(a), ub = unit(b);
    double e = 0;
    for (std::size_t i = 0; i < 9; ++i)
        e += (ua[i] - ub[i]) * (ua[i] - ub[i]);
    return std::sqrt(e);
}

// Connected components of the patch similarity graph by pairwise checks.
inline std::vector<int> bruteforce_components(const std::vector<recognition::PatchCandidate>& p, double b0)
{
    UnionFind uf(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (i == j)
                continue;
            const double w = std::abs(p[i].area - p[j].area) / (p[i].area + p[j].area);
            const double d = (1 + w) * std::hypot(p[i].center.x - p[j].center.x, p[i].center.y - p[j].center.y);
            if (d < b0 * p[i].axis_max)
                uf.unite(i, j);
        }
    std::vector<int> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        out[i] = static_cast<int>(uf.find(i));
    return out;
}

inline recognition::PatchCandidate square_patch(Point2 c, double side)
{
    recognition::PatchCandidate p;
    const double h = side / 2;
    p.quad = {{Point2{c.x - h, c.y - h}, Point2{c.x + h, c.y - h}, Point2{c.x + h, c.y + h}, Point2{c.x - h, c.y + h}}};
    p.center = c;
    p.area = side * side;
    p.axis_max = side;
    return p;
}

// One chart at the given pose on a flat or procedural background.
inline render::RenderedScene single_chart(const ColorCheckerModel& model, const render::RigidTransform& pose,
                                          const std::string& background = "@gray:0.5",
                                          double noise = 2.0 / 255.0, std::uint64_t seed = 3)
{
    render::SceneSpec s;
    s.background = background;
    s.seed = seed;
    s.checkers.push_back({pose, 0});
    return render::render_scene(s, model, render::Camera{}, noise);
}

inline render::RigidTransform frontal(double tz = -20.0)
{
    render::RigidTransform t;
    t.tz = tz;
    return t;
}

// The recognizer's front end up to patch extraction, in canonical pixels.
inline std::vector<recognition::PatchCandidate> patch_candidates(const ImageBuffer& img,
                                                                 const recognition::RecognitionConfig& cfg = {})
{
    const ImageBuffer canon = imgproc::canonize(img, {cfg.canonical_min_dim, cfg.wiener_window});
    const BinaryMask cells = imgproc::morph_cleanup(
        invert(imgproc::adaptive_threshold(canon, cfg.threshold_window, cfg.threshold_offset)));
    auto regions = imgproc::connected_components(cells, canon);
    std::erase_if(regions, [&](const imgproc::Region& r) { return r.pixel_count < cfg.min_region_area; });
    return recognition::extract_patches(recognition::filter_regions(regions, cfg), canon, cfg);
}

inline eval::ChartRecord record(const recognition::CheckerHypothesis& h) { return {h.corners, h.patch_quads, h.mu}; }
inline eval::ChartRecord record(const render::GroundTruthChecker& g) { return {g.outline, g.patches, g.mu}; }

// Detect on every scene and score against its ground truth.
inline eval::MatchReport run_suite(const std::vector<render::RenderedScene>& scenes, const ColorCheckerModel& model,
                                   bool gt_rois = false, std::optional<int> n_expected = std::nullopt,
                                   std::vector<double>* seconds = nullptr)
{
    std::vector<eval::ImageInput> inputs;
    for (const auto& s : scenes) {
        std::optional<std::vector<Box>> rois;
        if (gt_rois) {
            rois.emplace();
            for (const auto& c : s.truth.checkers)
                rois->push_back(c.bbox);
        }
        const auto r = recognition::detect(s.image, model, rois, n_expected);
        if (seconds)
            seconds->push_back(r.seconds);
        eval::ImageInput in;
        in.image = s.truth.image;
        for (const auto& h : r.hypotheses)
            in.preds.push_back(record(h));
        for (const auto& c : s.truth.checkers)
            in.gts.push_back(record(c));
        inputs.push_back(std::move(in));
    }
    return eval::match_and_score(inputs);
}

inline double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace mcc::testing
