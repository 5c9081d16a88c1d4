#include "mcc/error.hpp"
#include "mcc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mcc {

Line2 Line2::through(const Point2& a, const Point2& b)
{
    // Homogeneous cross product a x b.
    const double nx = a.y - b.y;
    const double ny = b.x - a.x;
    const double d = a.x * b.y - a.y * b.x;
    const double len = std::hypot(nx, ny);
    if (len == 0.0)
        throw DegenerateGeometry("line through coincident points");
    return {nx / len, ny / len, d / len};
}

Point2 intersect(const Line2& a, const Line2& b)
{
    const double w = a.nx * b.ny - a.ny * b.nx;
    if (std::abs(w) < 1e-12)
        throw DegenerateGeometry("parallel lines do not intersect");
    return {(a.ny * b.d - a.d * b.ny) / w, (a.d * b.nx - a.nx * b.d) / w};
}

Box bounding_box(std::span<const Point2> pts)
{
    if (pts.empty())
        return {};
    Box b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
    for (const auto& p : pts) {
        b.x0 = std::min(b.x0, p.x);
        b.y0 = std::min(b.y0, p.y);
        b.x1 = std::max(b.x1, p.x);
        b.y1 = std::max(b.y1, p.y);
    }
    return b;
}

double signed_area(std::span<const Point2> poly)
{
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        a += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * a;
}

double Quadrilateral::area() const { return std::abs(signed_area(corners)); }

Point2 Quadrilateral::centroid() const
{
    const double a = signed_area(corners);
    if (std::abs(a) < 1e-15) {
        Point2 c;
        for (const auto& p : corners)
            c = c + p * 0.25;
        return c;
    }
    double cx = 0, cy = 0;
    for (int i = 0; i < 4; ++i) {
        const auto& p = corners[i];
        const auto& q = corners[(i + 1) % 4];
        const double k = cross(p, q);
        cx += (p.x + q.x) * k;
        cy += (p.y + q.y) * k;
    }
    return {cx / (6.0 * a), cy / (6.0 * a)};
}

bool Quadrilateral::contains(const Point2& p, double tol) const
{
    // Clockwise on screen means the interior is on the right of each edge,
    // i.e. cross(edge, p - start) >= 0.
    const double orient = signed_area(corners) >= 0 ? 1.0 : -1.0;
    for (int i = 0; i < 4; ++i) {
        const auto& a = corners[i];
        const auto& b = corners[(i + 1) % 4];
        const double len = distance(a, b);
        if (len == 0.0)
            continue;
        if (orient * cross(b - a, p - a) / len < -tol)
            return false;
    }
    return true;
}

bool Quadrilateral::is_convex() const
{
    int sign = 0;
    for (int i = 0; i < 4; ++i) {
        const auto e1 = corners[(i + 1) % 4] - corners[i];
        const auto e2 = corners[(i + 2) % 4] - corners[(i + 1) % 4];
        const double c = cross(e1, e2);
        if (std::abs(c) < 1e-12)
            return false;
        const int s = c > 0 ? 1 : -1;
        if (sign == 0)
            sign = s;
        else if (s != sign)
            return false;
    }
    return true;
}

double Quadrilateral::min_angle_deg() const
{
    double best = 180.0;
    for (int i = 0; i < 4; ++i) {
        const auto a = corners[(i + 3) % 4] - corners[i];
        const auto b = corners[(i + 1) % 4] - corners[i];
        const double na = norm(a), nb = norm(b);
        if (na == 0 || nb == 0)
            return 0.0;
        const double c = std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
        best = std::min(best, std::acos(c) * 180.0 / std::numbers::pi);
    }
    return best;
}

double Quadrilateral::aspect_ratio() const
{
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double l = distance(corners[i], corners[(i + 1) % 4]);
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    return lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
}

Quadrilateral Quadrilateral::scaled_about_centroid(double factor) const
{
    const Point2 c = centroid();
    Quadrilateral q;
    for (int i = 0; i < 4; ++i)
        q.corners[i] = c + (corners[i] - c) * factor;
    return q;
}

Quadrilateral order_clockwise(std::array<Point2, 4> pts)
{
    Point2 c;
    for (const auto& p : pts)
        c = c + p * 0.25;
    // With y pointing down, increasing atan2 sweeps clockwise on screen.
    std::sort(pts.begin(), pts.end(), [&](const Point2& a, const Point2& b) {
        return std::atan2(a.y - c.y, a.x - c.x) < std::atan2(b.y - c.y, b.x - c.x);
    });
    std::size_t first = 0;
    for (std::size_t i = 1; i < 4; ++i) {
        const double si = pts[i].x + pts[i].y, sf = pts[first].x + pts[first].y;
        if (si < sf - 1e-9 || (std::abs(si - sf) <= 1e-9 && pts[i].y < pts[first].y))
            first = i;
    }
    Quadrilateral q;
    for (std::size_t i = 0; i < 4; ++i)
        q.corners[i] = pts[(first + i) % 4];
    return q;
}

std::vector<Point2> convex_hull(std::vector<Point2> pts)
{
    std::sort(pts.begin(), pts.end(),
              [](const Point2& a, const Point2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3)
        return pts;
    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    // Keep only turns with cross > 0: counter-clockwise in y-up terms,
    // which is clockwise on screen.
    auto turn = [](const Point2& o, const Point2& a, const Point2& b) { return cross(a - o, b - o); };
    for (const auto& p : pts) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= 0)
            --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double iou_box(const Box& a, const Box& b)
{
    const double ix = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    const double iy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    const double inter = (ix > 0 && iy > 0) ? ix * iy : 0.0;
    const double uni = a.area() + b.area() - inter;
    return uni > 0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

std::vector<Point2> clip_convex(std::span<const Point2> subject, std::span<const Point2> clip)
{
    std::vector<Point2> out(subject.begin(), subject.end());
    const double orient = signed_area(clip) >= 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < clip.size() && !out.empty(); ++i) {
        const Point2 a = clip[i];
        const Point2 b = clip[(i + 1) % clip.size()];
        auto side = [&](const Point2& p) { return orient * cross(b - a, p - a); };
        std::vector<Point2> in = std::move(out);
        out.clear();
        for (std::size_t j = 0; j < in.size(); ++j) {
            const Point2 p = in[j];
            const Point2 q = in[(j + 1) % in.size()];
            const double sp = side(p), sq = side(q);
            if (sp >= 0)
                out.push_back(p);
            if ((sp >= 0) != (sq >= 0)) {
                const double t = sp / (sp - sq);
                out.push_back(p + (q - p) * t);
            }
        }
    }
    return out;
}

double iou_polygon(const Quadrilateral& a, const Quadrilateral& b)
{
    const auto inter_poly = clip_convex(a.corners, b.corners);
    const double inter = inter_poly.size() >= 3 ? std::abs(signed_area(inter_poly)) : 0.0;
    const double uni = a.area() + b.area() - inter;
    return uni > 0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

}  // namespace mcc
