#include "mcc/error.hpp"
#include "mcc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace mcc {

namespace {

double segment_distance(const Point2& p, const Point2& a, const Point2& b)
{
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0)
        return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

// Marks the points kept by RDP on the open chain idx[first..last].
void rdp_chain(std::span<const Point2> pts, const std::vector<std::size_t>& idx, std::size_t first,
               std::size_t last, double epsilon, std::vector<char>& keep)
{
    std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
    while (!stack.empty()) {
        auto [lo, hi] = stack.back();
        stack.pop_back();
        if (hi <= lo + 1)
            continue;
        double worst = -1.0;
        std::size_t at = lo;
        for (std::size_t k = lo + 1; k < hi; ++k) {
            const double d = segment_distance(pts[idx[k]], pts[idx[lo]], pts[idx[hi]]);
            if (d > worst) {
                worst = d;
                at = k;
            }
        }
        if (worst > epsilon) {
            keep[idx[at]] = 1;
            stack.emplace_back(lo, at);
            stack.emplace_back(at, hi);
        }
    }
}

}  // namespace

std::vector<Point2> rdp_simplify(std::span<const Point2> contour, double epsilon)
{
    const std::size_t n = contour.size();
    if (n < 3)
        return {contour.begin(), contour.end()};

    // Split the ring at the start point and the point farthest from it.
    std::size_t far = 0;
    double best = -1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double d = distance(contour[0], contour[i]);
        if (d > best) {
            best = d;
            far = i;
        }
    }
    std::vector<char> keep(n, 0);
    keep[0] = 1;
    keep[far] = 1;
    std::vector<std::size_t> ring(n + 1);
    std::iota(ring.begin(), ring.end() - 1, 0);
    ring[n] = 0;
    rdp_chain(contour, ring, 0, far, epsilon, keep);
    rdp_chain(contour, ring, far, n, epsilon, keep);

    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < n; ++i)
        if (keep[i])
            kept.push_back(i);

    // The start point is an arbitrary split; drop it when the segment joining
    // its neighbours still covers every point in between.
    if (kept.size() > 3) {
        const std::size_t prev = kept.back();
        const std::size_t next = kept[1];
        bool removable = true;
        for (std::size_t k = prev + 1; k != next + n && removable; ++k) {
            const std::size_t i = k % n;
            if (i == next)
                break;
            removable = segment_distance(contour[i], contour[prev], contour[next]) <= epsilon;
        }
        if (removable)
            kept.erase(kept.begin());
    }

    std::vector<Point2> out;
    out.reserve(kept.size());
    for (std::size_t i : kept)
        out.push_back(contour[i]);
    return out;
}

Quadrilateral min_bounding_parallelogram(std::span<const Point2> pts)
{
    const auto hull = convex_hull({pts.begin(), pts.end()});
    if (hull.size() < 3 || std::abs(signed_area(hull)) < 1e-12)
        throw DegenerateGeometry("points are collinear");

    struct Slab {
        Point2 normal;
        double lo, hi;
        Point2 dir;
    };
    std::vector<Slab> slabs;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point2 e = hull[(i + 1) % hull.size()] - hull[i];
        const double len = norm(e);
        if (len == 0.0)
            continue;
        const Point2 dir = e * (1.0 / len);
        const Point2 nrm{-dir.y, dir.x};
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& p : hull) {
            lo = std::min(lo, dot(nrm, p));
            hi = std::max(hi, dot(nrm, p));
        }
        slabs.push_back({nrm, lo, hi, dir});
    }

    double best_area = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < slabs.size(); ++i)
        for (std::size_t j = i + 1; j < slabs.size(); ++j) {
            const double s = std::abs(cross(slabs[i].dir, slabs[j].dir));
            if (s < 1e-9)
                continue;
            const double area = (slabs[i].hi - slabs[i].lo) * (slabs[j].hi - slabs[j].lo) / s;
            if (area < best_area) {
                best_area = area;
                bi = i;
                bj = j;
            }
        }
    if (!std::isfinite(best_area))
        throw DegenerateGeometry("no parallelogram fits the hull");

    const Slab& a = slabs[bi];
    const Slab& b = slabs[bj];
    const Line2 a_lo{a.normal.x, a.normal.y, -a.lo}, a_hi{a.normal.x, a.normal.y, -a.hi};
    const Line2 b_lo{b.normal.x, b.normal.y, -b.lo}, b_hi{b.normal.x, b.normal.y, -b.hi};
    return order_clockwise({intersect(a_lo, b_lo), intersect(a_lo, b_hi), intersect(a_hi, b_hi),
                            intersect(a_hi, b_lo)});
}

Quadrilateral min_enclosing_quadrilateral(std::span<const Quadrilateral> charts,
                                          const MeqOptions& opts)
{
    if (charts.empty())
        throw FitFailure("no charts to enclose");

    std::vector<Point2> all;
    for (const auto& ch : charts)
        all.insert(all.end(), ch.corners.begin(), ch.corners.end());
    const Box bb = bounding_box(all);
    const double scale = std::max(1.0, std::hypot(bb.width(), bb.height()));
    const double tol = opts.side_tolerance * scale;
    Point2 center;
    for (const auto& p : all)
        center = center + p * (1.0 / all.size());

    struct Scored {
        Line2 line;
        long outside;
        double reach;
    };
    std::vector<Scored> lines;
    lines.reserve(charts.size() * 4);
    for (const auto& ch : charts) {
        const Point2 c = ch.centroid();
        for (int i = 0; i < 4; ++i) {
            const Point2& p = ch.corners[i];
            const Point2& q = ch.corners[(i + 1) % 4];
            if (distance(p, q) < 1e-12)
                continue;
            Line2 l = Line2::through(p, q);
            // Interior of the chart on the non-negative side.
            if (l.signed_distance(c) < 0)
                l = l.flipped();
            long outside = 0;
            for (const auto& pt : all)
                if (l.signed_distance(pt) < -tol)
                    ++outside;
            lines.push_back({l, outside, l.signed_distance(center)});
        }
    }
    std::sort(lines.begin(), lines.end(), [](const Scored& a, const Scored& b) {
        if (a.outside != b.outside)
            return a.outside < b.outside;
        if (a.reach != b.reach)
            return a.reach > b.reach;
        if (a.line.nx != b.line.nx)
            return a.line.nx < b.line.nx;
        return a.line.ny < b.line.ny;
    });

    const double max_cos = std::cos(opts.min_line_angle_deg * std::numbers::pi / 180.0);
    std::vector<Line2> chosen;
    for (const auto& s : lines) {
        const bool admissible = std::all_of(chosen.begin(), chosen.end(), [&](const Line2& c) {
            return c.nx * s.line.nx + c.ny * s.line.ny < max_cos;
        });
        if (admissible) {
            chosen.push_back(s.line);
            if (chosen.size() == 4)
                break;
        }
    }
    if (chosen.size() < 4)
        throw FitFailure("fewer than four admissible enclosing lines");

    std::sort(chosen.begin(), chosen.end(), [](const Line2& a, const Line2& b) {
        return std::atan2(a.ny, a.nx) < std::atan2(b.ny, b.nx);
    });
    for (int i = 0; i < 4; ++i) {
        const double a0 = std::atan2(chosen[i].ny, chosen[i].nx);
        const double a1 = std::atan2(chosen[(i + 1) % 4].ny, chosen[(i + 1) % 4].nx);
        double gap = a1 - a0;
        if (gap <= 0)
            gap += 2 * std::numbers::pi;
        if (gap >= std::numbers::pi - 1e-9)
            throw FitFailure("enclosing lines do not bound a quadrilateral");
    }
    std::array<Point2, 4> v;
    try {
        for (int i = 0; i < 4; ++i)
            v[i] = intersect(chosen[i], chosen[(i + 1) % 4]);
    } catch (const DegenerateGeometry&) {
        throw FitFailure("enclosing lines are parallel");
    }
    const Quadrilateral q = order_clockwise(v);
    if (!q.is_convex() || q.min_angle_deg() < opts.min_interior_angle_deg ||
        q.aspect_ratio() > opts.max_aspect_ratio)
        throw FitFailure("enclosing quadrilateral is degenerate");
    return q;
}

}  // namespace mcc
