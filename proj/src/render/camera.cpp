#include "mcc/error.hpp"
#include "mcc/render.hpp"

#include <cmath>

namespace mcc::render {

namespace {

constexpr double kW = ColorCheckerModel::kWidth;
constexpr double kH = ColorCheckerModel::kHeight;

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 rotation(const RigidTransform& p)
{
    const double cx = std::cos(p.rx), sx = std::sin(p.rx);
    const double cy = std::cos(p.ry), sy = std::sin(p.ry);
    const double cz = std::cos(p.rz), sz = std::sin(p.rz);
    // Rz * Ry * Rx
    return {{{cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx},
             {sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx},
             {-sy, cy * sx, cy * cx}}};
}

}  // namespace

void Camera::validate() const
{
    if (!(focal > 0.0))
        throw ConfigError("camera.focal must be positive");
    if (width < 1 || height < 1)
        throw ConfigError("camera resolution must be at least 1x1");
    if (!(cx >= 0.0 && cx <= width - 1) || !(cy >= 0.0 && cy <= height - 1))
        throw ConfigError("camera principal point must lie inside the image");
}

Homography chart_homography(const RigidTransform& pose, const Camera& cam)
{
    const Mat3 r = rotation(pose);
    // Model (x, y) -> chart-centered plane coordinates with y up.
    const Homography center({1, 0, -kW / 2, 0, -1, kH / 2, 0, 0, 1});
    const Homography rt({r[0][0], r[0][1], pose.tx, r[1][0], r[1][1], pose.ty, r[2][0], r[2][1], pose.tz});
    // u = cx + f X / (-Z), v = cy - f Y / (-Z)
    const Homography k({cam.focal, 0, -cam.cx, 0, -cam.focal, -cam.cy, 0, 0, -1});
    return k * rt * center;
}

Point2 project_model_point(const Point2& m, const RigidTransform& pose, const Camera& cam)
{
    // Apply the three elementary rotations one after the other.
    double x = m.x - kW / 2, y = kH / 2 - m.y, z = 0.0;
    {
        const double c = std::cos(pose.rx), s = std::sin(pose.rx);
        const double y2 = c * y - s * z, z2 = s * y + c * z;
        y = y2;
        z = z2;
    }
    {
        const double c = std::cos(pose.ry), s = std::sin(pose.ry);
        const double x2 = c * x + s * z, z2 = -s * x + c * z;
        x = x2;
        z = z2;
    }
    {
        const double c = std::cos(pose.rz), s = std::sin(pose.rz);
        const double x2 = c * x - s * y, y2 = s * x + c * y;
        x = x2;
        y = y2;
    }
    x += pose.tx;
    y += pose.ty;
    z += pose.tz;
    const double depth = -z;
    if (!(depth > 0.0))
        throw InvalidInput("model point is not in front of the camera");
    return {cam.cx + cam.focal * x / depth, cam.cy - cam.focal * y / depth};
}

}  // namespace mcc::render
