#include "mcc/error.hpp"
#include "mcc/io.hpp"
#include "mcc/render.hpp"

#include <cstdio>
#include <exception>
#include <mutex>

namespace mcc::render {

namespace {

std::string image_id(int index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "img_%05d", index);
    return buf;
}

// Runs body(i) for i in [0, count) on the OpenMP team; the first exception
// is rethrown once every iteration has finished.
template <typename F>
void parallel_indices(int count, F body)
{
    std::exception_ptr error;
    std::mutex m;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
            std::lock_guard lock(m);
            if (!error)
                error = std::current_exception();
        }
    }
    if (error)
        std::rethrow_exception(error);
}

RenderedScene render_one(const RenderConfig& cfg, std::span<const ColorCheckerModel> models,
                         std::uint64_t master, int index)
{
    std::mt19937_64 rng(image_seed(master, static_cast<std::uint64_t>(index)));
    const SceneSpec spec = sample_scene(cfg, rng);
    RenderedScene scene = render_scene(spec, models, cfg.camera, cfg.noise_sigma, cfg.luminance_adjustment);
    scene.truth.image = image_id(index);
    return scene;
}

}  // namespace

std::vector<RenderedScene> render_batch(const RenderConfig& cfg, std::span<const ColorCheckerModel> models,
                                        int count, std::uint64_t seed)
{
    cfg.validate();
    if (static_cast<int>(models.size()) < cfg.identities)
        throw ConfigError("identities exceeds the number of chart models");
    std::vector<RenderedScene> out(static_cast<std::size_t>(std::max(0, count)));
    parallel_indices(count, [&](int i) { out[static_cast<std::size_t>(i)] = render_one(cfg, models, seed, i); });
    return out;
}

Manifest generate_dataset(const RenderConfig& cfg, std::span<const ColorCheckerModel> models, int count,
                          std::uint64_t seed, const std::filesystem::path& out_dir)
{
    cfg.validate();
    if (static_cast<int>(models.size()) < cfg.identities)
        throw ConfigError("identities exceeds the number of chart models");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    Manifest m;
    m.seed = seed;
    m.count = count;
    m.entries.resize(static_cast<std::size_t>(std::max(0, count)));
    parallel_indices(count, [&](int i) {
        const RenderedScene scene = render_one(cfg, models, seed, i);
        const std::string id = scene.truth.image;
        io::write_png_atomic(out_dir / (id + ".png"), scene.image);
        io::write_json_atomic(out_dir / (id + ".gt.json"), io::to_json(scene.truth));
        m.entries[static_cast<std::size_t>(i)] = {id + ".png", id + ".gt.json",
                                                  image_seed(seed, static_cast<std::uint64_t>(i)),
                                                  static_cast<int>(scene.truth.checkers.size())};
    });
    io::write_json_atomic(out_dir / "manifest.json", io::to_json(m));
    return m;
}

}  // namespace mcc::render
