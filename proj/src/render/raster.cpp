#include "mcc/error.hpp"
#include "mcc/imgproc.hpp"
#include "mcc/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mcc::render {

namespace {

constexpr int kSuper = 4;

struct FloatImage {
    int width = 0;
    int height = 0;
    std::vector<double> v;  // RGB interleaved, [0,1]

    double* px(int x, int y) { return &v[(static_cast<std::size_t>(y) * width + x) * 3]; }
    const double* px(int x, int y) const { return &v[(static_cast<std::size_t>(y) * width + x) * 3]; }
};

FloatImage to_float(const ImageBuffer& img)
{
    FloatImage f{img.width(), img.height(), std::vector<double>(img.size())};
    const auto d = img.data();
    for (std::size_t i = 0; i < d.size(); ++i)
        f.v[i] = d[i] / 255.0;
    return f;
}

// Smooth lattice noise in [-1, 1] sampled at pixel (x, y).
class ValueNoise {
public:
    ValueNoise(int width, int height, double cell, std::mt19937_64& rng)
        : cell_(cell), nx_(static_cast<int>(width / cell) + 2), ny_(static_cast<int>(height / cell) + 2),
          values_(static_cast<std::size_t>(nx_) * ny_)
    {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& v : values_)
            v = u(rng);
    }

    double operator()(double x, double y) const
    {
        const double gx = x / cell_, gy = y / cell_;
        const int ix = static_cast<int>(gx), iy = static_cast<int>(gy);
        const double fx = smooth(gx - ix), fy = smooth(gy - iy);
        const double a = at(ix, iy) * (1 - fx) + at(ix + 1, iy) * fx;
        const double b = at(ix, iy + 1) * (1 - fx) + at(ix + 1, iy + 1) * fx;
        return a * (1 - fy) + b * fy;
    }

private:
    static double smooth(double t) { return t * t * (3 - 2 * t); }
    double at(int x, int y) const { return values_[static_cast<std::size_t>(y) * nx_ + x]; }

    double cell_;
    int nx_, ny_;
    std::vector<double> values_;
};

ImageBuffer procedural_background(const Camera& cam, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double base = 0.4 + 0.2 * u(rng);
    Color tint{};
    for (auto& t : tint)
        t = (u(rng) - 0.5) * 0.16;
    struct Octave {
        double cell, amp;
    };
    const std::array<Octave, 4> octaves{{{160, 0.5}, {80, 0.25}, {40, 0.15}, {20, 0.1}}};
    std::vector<ValueNoise> luma_noise, chroma_noise;
    for (const auto& o : octaves)
        luma_noise.emplace_back(cam.width, cam.height, o.cell, rng);
    for (int c = 0; c < 3; ++c)
        chroma_noise.emplace_back(cam.width, cam.height, 120.0, rng);

    ImageBuffer img(cam.width, cam.height, 3);
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) {
            double n = 0.0;
            for (std::size_t o = 0; o < octaves.size(); ++o)
                n += octaves[o].amp * luma_noise[o](x, y);
            for (int c = 0; c < 3; ++c) {
                const double v = base + tint[c] + 0.2 * n + 0.06 * chroma_noise[c](x, y);
                img.at(x, y, c) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
            }
        }
    return img;
}

// Region of a model-plane point: -1 outside the chart, 24 frame, else patch.
int classify(double x, double y)
{
    using M = ColorCheckerModel;
    if (x < 0 || y < 0 || x > M::kWidth || y > M::kHeight)
        return -1;
    const double gx = (x - M::kMargin) / M::kPitch;
    const double gy = (y - M::kMargin) / M::kPitch;
    if (gx < 0 || gy < 0)
        return M::kPatches;
    const int c = static_cast<int>(gx), r = static_cast<int>(gy);
    if (c >= M::kCols || r >= M::kRows)
        return M::kPatches;
    if (x - M::kMargin - c * M::kPitch > M::kPatchSize || y - M::kMargin - r * M::kPitch > M::kPatchSize)
        return M::kPatches;
    return r * M::kCols + c;
}

double model_luma(const ColorCheckerModel& model)
{
    using M = ColorCheckerModel;
    const double patch_area = M::kPatchSize * M::kPatchSize;
    const double total = M::kWidth * M::kHeight;
    double s = luma(model.frame_color()) * (total - M::kPatches * patch_area);
    for (const auto& c : model.colors())
        s += luma(c) * patch_area;
    return s / total;
}

double covered_luma(const FloatImage& bg, const Quadrilateral& q)
{
    const Box b = q.bbox();
    const int x0 = std::max(0, static_cast<int>(std::ceil(b.x0)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(b.y0)));
    const int x1 = std::min(bg.width - 1, static_cast<int>(std::floor(b.x1)));
    const int y1 = std::min(bg.height - 1, static_cast<int>(std::floor(b.y1)));
    double s = 0.0;
    long n = 0;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (q.contains({static_cast<double>(x), static_cast<double>(y)})) {
                const double* p = bg.px(x, y);
                s += luma({p[0], p[1], p[2]});
                ++n;
            }
    if (n == 0) {
        for (std::size_t i = 0; i < bg.v.size(); i += 3)
            s += luma({bg.v[i], bg.v[i + 1], bg.v[i + 2]});
        n = static_cast<long>(bg.v.size() / 3);
    }
    return s / static_cast<double>(n);
}

}  // namespace

ImageBuffer make_background(const std::string& spec, const Camera& cam, std::uint64_t seed)
{
    if (spec == "@procedural")
        return procedural_background(cam, seed);
    if (spec.rfind("@gray:", 0) == 0) {
        double v = 0.0;
        try {
            v = std::stod(spec.substr(6));
        } catch (const std::exception&) {
            throw ConfigError("bad gray background: " + spec);
        }
        if (!(v >= 0.0 && v <= 1.0))
            throw ConfigError("gray background level outside [0,1]: " + spec);
        return ImageBuffer(cam.width, cam.height, 3, static_cast<std::uint8_t>(std::lround(v * 255.0)));
    }
    ImageBuffer img = read_image(spec);
    if (img.channels() == 1) {
        ImageBuffer rgb(img.width(), img.height(), 3);
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                for (int c = 0; c < 3; ++c)
                    rgb.at(x, y, c) = img.at(x, y);
        img = std::move(rgb);
    }
    if (img.width() != cam.width || img.height() != cam.height)
        img = imgproc::resize_bilinear(img, cam.width, cam.height);
    return img;
}

RenderedScene render_scene(const SceneSpec& spec, std::span<const ColorCheckerModel> models,
                           const Camera& cam, double noise_sigma, bool luminance_adjustment)
{
    cam.validate();
    if (models.empty())
        throw InvalidInput("no chart model to render");
    const FloatImage bg = to_float(make_background(spec.background, cam, spec.seed));
    FloatImage out = bg;

    RenderedScene scene;
    scene.truth.width = cam.width;
    scene.truth.height = cam.height;
    std::vector<Homography> homs;

    for (const auto& placement : spec.checkers) {
        if (placement.identity < 0 || placement.identity >= static_cast<int>(models.size()))
            throw InvalidInput("checker identity " + std::to_string(placement.identity) + " has no model");
        const ColorCheckerModel& model = models[static_cast<std::size_t>(placement.identity)];
        const Homography h = chart_homography(placement.pose, cam);
        const Quadrilateral chart = ColorCheckerModel::chart_quad();
        for (const auto& m : chart.corners)
            if (!(h(2, 0) * m.x + h(2, 1) * m.y + h(2, 2) > 0.0))
                throw InvalidInput("chart is not entirely in front of the camera");

        GroundTruthChecker gt;
        gt.outline = apply(h, chart);
        gt.bbox = gt.outline.bbox();
        gt.pose = placement.pose;
        gt.identity = placement.identity;
        for (int k = 0; k < ColorCheckerModel::kPatches; ++k)
            gt.patches[k] = apply(h, ColorCheckerModel::patch_quad(k));

        double factor = 1.0;
        if (luminance_adjustment) {
            const double chart_luma = model_luma(model);
            if (chart_luma > 0.0)
                factor = covered_luma(bg, gt.outline) / chart_luma;
            // Keep every adjusted channel representable.
            double peak = *std::max_element(model.frame_color().begin(), model.frame_color().end());
            for (const auto& c : model.colors())
                peak = std::max(peak, *std::max_element(c.begin(), c.end()));
            if (peak > 0.0)
                factor = std::min(factor, 1.0 / peak);
        }
        std::array<Color, ColorCheckerModel::kPatches + 1> colors{};
        for (int k = 0; k < ColorCheckerModel::kPatches; ++k)
            for (int c = 0; c < 3; ++c)
                colors[k][c] = std::min(1.0, model.color(k)[c] * factor);
        for (int c = 0; c < 3; ++c)
            colors[ColorCheckerModel::kPatches][c] = std::min(1.0, model.frame_color()[c] * factor);
        for (int k = 0; k < ColorCheckerModel::kPatches; ++k)
            gt.mu[k] = colors[k];

        const Homography inv = h.inverse();
        const Box b = gt.bbox;
        const int x0 = std::max(0, static_cast<int>(std::floor(b.x0)) - 1);
        const int y0 = std::max(0, static_cast<int>(std::floor(b.y0)) - 1);
        const int x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(b.x1)) + 1);
        const int y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(b.y1)) + 1);
#pragma omp parallel for schedule(static) if (static_cast<long>(y1 - y0) * (x1 - x0) > 65536)
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                double acc[3] = {0, 0, 0};
                int covered = 0;
                for (int sy = 0; sy < kSuper; ++sy)
                    for (int sx = 0; sx < kSuper; ++sx) {
                        const double px = x - 0.5 + (sx + 0.5) / kSuper;
                        const double py = y - 0.5 + (sy + 0.5) / kSuper;
                        const double w = inv(2, 0) * px + inv(2, 1) * py + inv(2, 2);
                        int region = -1;
                        if (w != 0.0)
                            region = classify((inv(0, 0) * px + inv(0, 1) * py + inv(0, 2)) / w,
                                              (inv(1, 0) * px + inv(1, 1) * py + inv(1, 2)) / w);
                        if (region < 0)
                            continue;
                        ++covered;
                        for (int c = 0; c < 3; ++c)
                            acc[c] += colors[region][c];
                    }
                if (covered == 0)
                    continue;
                double* p = out.px(x, y);
                const int uncovered = kSuper * kSuper - covered;
                for (int c = 0; c < 3; ++c)
                    p[c] = (acc[c] + uncovered * p[c]) / (kSuper * kSuper);
            }
        homs.push_back(h);
        scene.truth.checkers.push_back(std::move(gt));
    }

    // Truncation: outside the image or under a chart drawn later.
    const Box frame{-0.5, -0.5, cam.width - 0.5, cam.height - 0.5};
    auto& checkers = scene.truth.checkers;
    for (std::size_t i = 0; i < checkers.size(); ++i)
        for (int k = 0; k < ColorCheckerModel::kPatches; ++k) {
            const Quadrilateral& q = checkers[i].patches[k];
            bool t = false;
            for (const auto& p : q.corners)
                if (p.x < frame.x0 || p.y < frame.y0 || p.x > frame.x1 || p.y > frame.y1)
                    t = true;
            for (std::size_t j = i + 1; j < checkers.size() && !t; ++j) {
                const auto poly = clip_convex(q.corners, checkers[j].outline.corners);
                if (poly.size() >= 3 && std::abs(signed_area(poly)) > 0.0)
                    t = true;
            }
            checkers[i].truncated[k] = t;
        }

    std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> noise(0.0, noise_sigma > 0 ? noise_sigma : 1.0);
    scene.image = ImageBuffer(cam.width, cam.height, 3);
    auto dst = scene.image.data();
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        double v = out.v[i];
        if (noise_sigma > 0)
            v += noise(rng);
        dst[i] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    }
    return scene;
}

RenderedScene render_scene(const SceneSpec& spec, const ColorCheckerModel& model, const Camera& cam,
                           double noise_sigma, bool luminance_adjustment)
{
    return render_scene(spec, std::span<const ColorCheckerModel>(&model, 1), cam, noise_sigma,
                        luminance_adjustment);
}

}  // namespace mcc::render
