#include "mcc/error.hpp"
#include "mcc/render.hpp"

#include <cmath>
#include <string>

namespace mcc::render {

namespace {

void check_interval(const Interval& iv, double lo, double hi, const std::string& name)
{
    if (!(iv.lo <= iv.hi))
        throw ConfigError(name + ": lower bound exceeds upper bound");
    if (iv.lo < lo - 1e-12 || iv.hi > hi + 1e-12)
        throw ConfigError(name + ": interval outside [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
}

double draw(const Interval& iv, std::mt19937_64& rng)
{
    if (iv.lo == iv.hi)
        return iv.lo;
    return std::uniform_real_distribution<double>(iv.lo, iv.hi)(rng);
}

struct Projected {
    Quadrilateral outline;
    bool in_front = false;
};

Projected project_outline(const RigidTransform& pose, const Camera& cam)
{
    const Homography h = chart_homography(pose, cam);
    Projected p;
    p.in_front = true;
    const Quadrilateral chart = ColorCheckerModel::chart_quad();
    for (int i = 0; i < 4; ++i) {
        const Point2 m = chart.corners[i];
        const double w = h(2, 0) * m.x + h(2, 1) * m.y + h(2, 2);
        if (!(w > 1.0))
            p.in_front = false;
        p.outline.corners[i] = h.apply(m);
    }
    return p;
}

double overlap_area(const Quadrilateral& a, const Quadrilateral& b)
{
    const auto poly = clip_convex(a.corners, b.corners);
    return poly.size() < 3 ? 0.0 : std::abs(signed_area(poly));
}

bool acceptable(const Quadrilateral& q, const std::vector<Quadrilateral>& placed,
                const RenderConfig& cfg)
{
    const Camera& cam = cfg.camera;
    if (!(signed_area(q.corners) > 0.0))
        return false;  // seen from behind
    const Box b = q.bbox();
    const Box clipped{std::max(b.x0, -0.5), std::max(b.y0, -0.5), std::min(b.x1, cam.width - 0.5),
                      std::min(b.y1, cam.height - 0.5)};
    if (clipped.width() <= 0 || clipped.height() <= 0)
        return false;
    if (cfg.require_visible)
        for (const auto& c : q.corners)
            if (c.x < 0 || c.y < 0 || c.x > cam.width - 1 || c.y > cam.height - 1)
                return false;
    if (clipped.area() < cfg.min_bbox_fraction * cam.width * cam.height)
        return false;
    if (cfg.non_overlapping)
        for (const auto& other : placed)
            if (overlap_area(q, other) > 0.0)
                return false;
    return true;
}

}  // namespace

void RenderConfig::validate() const
{
    camera.validate();
    if (min_checkers < 1 || max_checkers > 5 || min_checkers > max_checkers)
        throw ConfigError("checkers: counts must satisfy 1 <= min <= max <= 5");
    const double half_pi = std::numbers::pi / 2;
    check_interval(rx, -half_pi, half_pi, "rx");
    check_interval(ry, -half_pi, half_pi, "ry");
    check_interval(rz, -half_pi, half_pi, "rz");
    check_interval(tx, -1e6, 1e6, "tx");
    check_interval(ty, -1e6, 1e6, "ty");
    check_interval(tz, -30.0, -10.0, "tz");
    if (identities < 1)
        throw ConfigError("identities must be at least 1");
    if (backgrounds.empty())
        throw ConfigError("backgrounds: pool is empty");
    if (!(noise_sigma >= 0.0 && noise_sigma <= 0.5))
        throw ConfigError("noise_sigma outside [0, 0.5]");
    if (!(min_bbox_fraction >= 0.0 && min_bbox_fraction <= 1.0))
        throw ConfigError("min_bbox_fraction outside [0, 1]");
    if (max_attempts < 1)
        throw ConfigError("max_attempts must be at least 1");
}

SceneSpec sample_scene(const RenderConfig& cfg, std::mt19937_64& rng)
{
    cfg.validate();
    SceneSpec spec;
    const int count = std::uniform_int_distribution<int>(cfg.min_checkers, cfg.max_checkers)(rng);
    spec.background = cfg.backgrounds[std::uniform_int_distribution<std::size_t>(
        0, cfg.backgrounds.size() - 1)(rng)];
    spec.seed = rng();

    // Charts are placed one at a time; a chart that cannot be placed next to
    // the ones already drawn restarts the scene.
    constexpr int kPerChart = 200;
    int attempts = 0;
    std::vector<Quadrilateral> placed;
    while (static_cast<int>(spec.checkers.size()) < count) {
        bool ok = false;
        for (int k = 0; k < kPerChart && attempts < cfg.max_attempts; ++k, ++attempts) {
            CheckerPlacement c;
            c.pose.rx = draw(cfg.rx, rng);
            c.pose.ry = draw(cfg.ry, rng);
            c.pose.rz = draw(cfg.rz, rng);
            c.pose.tx = draw(cfg.tx, rng);
            c.pose.ty = draw(cfg.ty, rng);
            c.pose.tz = draw(cfg.tz, rng);
            c.identity = std::uniform_int_distribution<int>(0, cfg.identities - 1)(rng);
            const Projected p = project_outline(c.pose, cfg.camera);
            if (!p.in_front || !acceptable(p.outline, placed, cfg))
                continue;
            spec.checkers.push_back(c);
            placed.push_back(p.outline);
            ok = true;
            break;
        }
        if (attempts >= cfg.max_attempts && !ok)
            throw ConfigError("placement constraints not satisfied after " +
                              std::to_string(cfg.max_attempts) + " attempts");
        if (!ok) {
            spec.checkers.clear();
            placed.clear();
        }
    }
    return spec;
}

std::uint64_t image_seed(std::uint64_t master, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace mcc::render
