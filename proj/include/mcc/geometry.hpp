#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace mcc {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Point2&) const = default;
};

inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point2& a, const Point2& b) { return norm(a - b); }

// Homogeneous line n_x*x + n_y*y + d = 0 with unit normal.
struct Line2 {
    double nx = 1.0;
    double ny = 0.0;
    double d = 0.0;

    static Line2 through(const Point2& a, const Point2& b);

    double signed_distance(const Point2& p) const { return nx * p.x + ny * p.y + d; }
    Line2 flipped() const { return {-nx, -ny, -d}; }
};

// Throws DegenerateGeometry for (near) parallel lines.
Point2 intersect(const Line2& a, const Line2& b);

// Axis-aligned box [x0,x1] x [y0,y1].
struct Box {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
    bool operator==(const Box&) const = default;
};

Box bounding_box(std::span<const Point2> pts);

// Four corners, clockwise on screen (image y axis points down).
struct Quadrilateral {
    std::array<Point2, 4> corners{};

    double area() const;
    Point2 centroid() const;
    Box bbox() const { return bounding_box(corners); }
    bool contains(const Point2& p, double tol = 0.0) const;
    bool is_convex() const;
    // Smallest interior angle in degrees.
    double min_angle_deg() const;
    // Longest over shortest side.
    double aspect_ratio() const;
    Quadrilateral scaled_about_centroid(double factor) const;
};

// Shoelace area; positive when clockwise on screen.
double signed_area(std::span<const Point2> poly);

// Reorders corners clockwise starting from the top-left-most corner
// (smallest x + y, ties by smaller y).
Quadrilateral order_clockwise(std::array<Point2, 4> corners);

// Andrew's monotone chain; output clockwise on screen, no repeated points.
std::vector<Point2> convex_hull(std::vector<Point2> pts);

class Homography {
public:
    Homography();  // identity
    explicit Homography(const std::array<double, 9>& row_major);

    Point2 apply(const Point2& p) const;
    Homography inverse() const;
    Homography operator*(const Homography& rhs) const;
    double operator()(int r, int c) const { return m_[r * 3 + c]; }
    const std::array<double, 9>& values() const { return m_; }
    // Scaled so m(2,2) = 1 when it is nonzero.
    Homography normalized() const;
    double determinant() const;

    static Homography translation(double tx, double ty);
    static Homography scaling(double sx, double sy);

private:
    std::array<double, 9> m_;
};

Quadrilateral apply(const Homography& h, const Quadrilateral& q);

// Normalized DLT, least squares for more than four correspondences.
Homography estimate_homography(std::span<const Point2> src, std::span<const Point2> dst);

// Closed-contour Ramer-Douglas-Peucker; returns a subsequence of the input.
std::vector<Point2> rdp_simplify(std::span<const Point2> contour, double epsilon);

// Minimum-area parallelogram enclosing the convex hull of the points.
Quadrilateral min_bounding_parallelogram(std::span<const Point2> pts);

struct MeqOptions {
    double min_line_angle_deg = 30.0;
    double min_interior_angle_deg = 10.0;
    double max_aspect_ratio = 10.0;
    // Slack when counting points on the outer side of a line.
    double side_tolerance = 1e-9;
};

// Four-line enclosing quadrilateral of a set of clockwise charts.
Quadrilateral min_enclosing_quadrilateral(std::span<const Quadrilateral> charts,
                                          const MeqOptions& opts = {});

double iou_box(const Box& a, const Box& b);

// Sutherland-Hodgman clip of subject against a convex clip polygon.
std::vector<Point2> clip_convex(std::span<const Point2> subject, std::span<const Point2> clip);

double iou_polygon(const Quadrilateral& a, const Quadrilateral& b);

}  // namespace mcc
