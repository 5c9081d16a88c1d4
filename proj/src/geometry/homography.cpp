#include "mcc/error.hpp"
#include "mcc/geometry.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace mcc {

Homography::Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Homography::Homography(const std::array<double, 9>& row_major) : m_(row_major) {}

Point2 Homography::apply(const Point2& p) const
{
    const double w = m_[6] * p.x + m_[7] * p.y + m_[8];
    return {(m_[0] * p.x + m_[1] * p.y + m_[2]) / w, (m_[3] * p.x + m_[4] * p.y + m_[5]) / w};
}

double Homography::determinant() const
{
    const auto& a = m_;
    return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
}

Homography Homography::inverse() const
{
    const auto& a = m_;
    const double det = determinant();
    if (std::abs(det) < 1e-300)
        throw DegenerateGeometry("singular homography");
    std::array<double, 9> inv{
        a[4] * a[8] - a[5] * a[7], a[2] * a[7] - a[1] * a[8], a[1] * a[5] - a[2] * a[4],
        a[5] * a[6] - a[3] * a[8], a[0] * a[8] - a[2] * a[6], a[2] * a[3] - a[0] * a[5],
        a[3] * a[7] - a[4] * a[6], a[1] * a[6] - a[0] * a[7], a[0] * a[4] - a[1] * a[3]};
    for (auto& v : inv)
        v /= det;
    return Homography(inv).normalized();
}

Homography Homography::operator*(const Homography& rhs) const
{
    std::array<double, 9> out{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            for (int k = 0; k < 3; ++k)
                out[r * 3 + c] += m_[r * 3 + k] * rhs.m_[k * 3 + c];
    return Homography(out);
}

Homography Homography::normalized() const
{
    if (std::abs(m_[8]) < 1e-15)
        return *this;
    std::array<double, 9> out = m_;
    for (auto& v : out)
        v /= m_[8];
    return Homography(out);
}

Homography Homography::translation(double tx, double ty)
{
    return Homography({1, 0, tx, 0, 1, ty, 0, 0, 1});
}

Homography Homography::scaling(double sx, double sy)
{
    return Homography({sx, 0, 0, 0, sy, 0, 0, 0, 1});
}

Quadrilateral apply(const Homography& h, const Quadrilateral& q)
{
    Quadrilateral out;
    for (int i = 0; i < 4; ++i)
        out.corners[i] = h.apply(q.corners[i]);
    return out;
}

namespace {

// Similarity moving the centroid to the origin with mean distance sqrt(2).
Eigen::Matrix3d normalizing_transform(std::span<const Point2> pts)
{
    double cx = 0, cy = 0;
    for (const auto& p : pts) {
        cx += p.x;
        cy += p.y;
    }
    cx /= pts.size();
    cy /= pts.size();
    double mean_dist = 0;
    for (const auto& p : pts)
        mean_dist += std::hypot(p.x - cx, p.y - cy);
    mean_dist /= pts.size();
    if (mean_dist < 1e-12)
        throw DegenerateGeometry("coincident correspondences");
    const double s = std::sqrt(2.0) / mean_dist;
    Eigen::Matrix3d t;
    t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
    return t;
}

bool any_three_collinear(std::span<const Point2> pts)
{
    double scale = 0;
    for (const auto& p : pts)
        for (const auto& q : pts)
            scale = std::max(scale, distance(p, q));
    const double tol = 1e-9 * scale * scale;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            for (std::size_t k = j + 1; k < pts.size(); ++k)
                if (std::abs(cross(pts[j] - pts[i], pts[k] - pts[i])) <= tol)
                    return true;
    return false;
}

}  // namespace

Homography estimate_homography(std::span<const Point2> src, std::span<const Point2> dst)
{
    if (src.size() != dst.size())
        throw InvalidInput("correspondence lists differ in length");
    if (src.size() < 4)
        throw InvalidInput("homography needs at least 4 correspondences");
    if (src.size() == 4 && (any_three_collinear(src) || any_three_collinear(dst)))
        throw DegenerateGeometry("three of four correspondences are collinear");

    const Eigen::Matrix3d ts = normalizing_transform(src);
    const Eigen::Matrix3d td = normalizing_transform(dst);
    const Eigen::Index n = static_cast<Eigen::Index>(src.size());
    Eigen::MatrixXd a(2 * n, 9);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Vector3d p = ts * Eigen::Vector3d(src[i].x, src[i].y, 1.0);
        const Eigen::Vector3d q = td * Eigen::Vector3d(dst[i].x, dst[i].y, 1.0);
        const double x = p.x(), y = p.y(), u = q.x(), v = q.y();
        a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
        a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv.size() >= 8 && sv(7) <= 1e-10 * sv(0))
        throw DegenerateGeometry("correspondences do not determine a homography");
    const Eigen::VectorXd hv = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << hv(0), hv(1), hv(2), hv(3), hv(4), hv(5), hv(6), hv(7), hv(8);
    const Eigen::Matrix3d h = td.inverse() * hn * ts;
    std::array<double, 9> vals{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            vals[r * 3 + c] = h(r, c);
    Homography out = Homography(vals).normalized();
    const double det = out.determinant();
    if (!std::isfinite(det) || std::abs(det) <= 1e-12)
        throw DegenerateGeometry("estimated homography is singular");
    return out;
}

}  // namespace mcc
