#pragma once

#include "mcc/geometry.hpp"
#include "mcc/image.hpp"
#include "mcc/model.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

// Stochastic chart renderer: random rigid poses of planar chart models
// projected through a pinhole camera onto background images, with exact
// ground truth.
namespace mcc::render {

struct Camera {
    double focal = 1000.0;
    double cx = 511.5;
    double cy = 319.5;
    int width = 1024;
    int height = 640;

    void validate() const;
};

// Rotation R = Rz * Ry * Rx (radians), then translation, in camera
// coordinates: x right, y up, the camera looks down -z.
struct RigidTransform {
    double rx = 0.0, ry = 0.0, rz = 0.0;
    double tx = 0.0, ty = 0.0, tz = -20.0;
};

struct CheckerPlacement {
    RigidTransform pose;
    int identity = 0;
};

struct SceneSpec {
    std::vector<CheckerPlacement> checkers;
    std::string background;  // image path, "@procedural" or "@gray:<v>"
    std::uint64_t seed = 0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct RenderConfig {
    Camera camera;
    int min_checkers = 1;
    int max_checkers = 1;
    Interval rx{-std::numbers::pi / 2, std::numbers::pi / 2};
    Interval ry{-std::numbers::pi / 2, std::numbers::pi / 2};
    Interval rz{-std::numbers::pi / 2, std::numbers::pi / 2};
    Interval tx{-8.0, 8.0};
    Interval ty{-5.0, 5.0};
    Interval tz{-30.0, -10.0};
    int identities = 1;
    std::vector<std::string> backgrounds{"@procedural"};
    double noise_sigma = 2.0 / 255.0;
    bool luminance_adjustment = true;
    // Rejection-sampling constraints on the projected charts.
    bool require_visible = true;
    bool non_overlapping = false;
    double min_bbox_fraction = 0.0;
    int max_attempts = 20000;

    void validate() const;
};

struct GroundTruthChecker {
    Quadrilateral outline;
    std::array<Quadrilateral, ColorCheckerModel::kPatches> patches{};
    std::array<Color, ColorCheckerModel::kPatches> mu{};
    std::array<bool, ColorCheckerModel::kPatches> truncated{};
    Box bbox;
    RigidTransform pose;
    int identity = 0;
};

struct GroundTruth {
    std::string image;
    int width = 0;
    int height = 0;
    std::vector<GroundTruthChecker> checkers;
};

// Model plane -> image homography K [r1 r2 t] for a chart pose.
Homography chart_homography(const RigidTransform& pose, const Camera& camera);

// Model-plane point through the full 3D transform and perspective divide.
// Throws InvalidInput when the point is not in front of the camera.
Point2 project_model_point(const Point2& model_pt, const RigidTransform& pose,
                           const Camera& camera);

SceneSpec sample_scene(const RenderConfig& cfg, std::mt19937_64& rng);

struct RenderedScene {
    ImageBuffer image;
    GroundTruth truth;
};

// Background raster for a scene (file, procedural or flat gray).
ImageBuffer make_background(const std::string& spec, const Camera& camera, std::uint64_t seed);

RenderedScene render_scene(const SceneSpec& spec, std::span<const ColorCheckerModel> models,
                           const Camera& camera, double noise_sigma = 2.0 / 255.0,
                           bool luminance_adjustment = true);

RenderedScene render_scene(const SceneSpec& spec, const ColorCheckerModel& model,
                           const Camera& camera, double noise_sigma = 2.0 / 255.0,
                           bool luminance_adjustment = true);

// Per-image seed derived from the master seed; independent of thread count.
std::uint64_t image_seed(std::uint64_t master, std::uint64_t index);

struct ManifestEntry {
    std::string image;
    std::string gt;
    std::uint64_t seed = 0;
    int checkers = 0;
};

struct Manifest {
    std::uint64_t seed = 0;
    int count = 0;
    std::vector<ManifestEntry> entries;
};

// Renders count scenes in parallel, writes <id>.png, <id>.gt.json and
// manifest.json into out_dir.
Manifest generate_dataset(const RenderConfig& cfg, std::span<const ColorCheckerModel> models,
                          int count, std::uint64_t seed, const std::filesystem::path& out_dir);

// In-memory variant used by the tests and benchmarks.
std::vector<RenderedScene> render_batch(const RenderConfig& cfg,
                                        std::span<const ColorCheckerModel> models, int count,
                                        std::uint64_t seed);

}  // namespace mcc::render
