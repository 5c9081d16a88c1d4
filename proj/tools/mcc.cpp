#include "mcc/error.hpp"
#include "mcc/io.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

namespace fs = std::filesystem;
using mcc::io::json;

namespace {

constexpr int kIoError = 1;
constexpr int kInternalError = 2;

mcc::io::Config resolve_config(const std::string& flag)
{
    std::string path = flag;
    if (path.empty())
        if (const char* env = std::getenv("MCC_CONFIG"))
            path = env;
    return path.empty() ? mcc::io::Config{} : mcc::io::load_config(path);
}

bool is_image(const fs::path& p)
{
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

std::vector<fs::path> list_files(const fs::path& dir, auto pred)
{
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && pred(e.path()))
            out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

// Runs task(i) for i in [0, n) on `jobs` threads.
void run_pool(int n, int jobs, const std::function<void(int)>& task)
{
    jobs = std::max(1, std::min(jobs, n));
    std::atomic<int> next{0};
    auto worker = [&] {
        if (jobs > 1)
            omp_set_num_threads(1);
        for (int i = next++; i < n; i = next++)
            task(i);
    };
    std::vector<std::thread> threads;
    for (int t = 1; t < jobs; ++t)
        threads.emplace_back(worker);
    worker();
    for (auto& t : threads)
        t.join();
}

void draw_line(mcc::ImageBuffer& img, mcc::Point2 a, mcc::Point2 b, std::array<std::uint8_t, 3> rgb)
{
    const double len = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
    const int steps = static_cast<int>(std::ceil(len)) + 1;
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const int x = static_cast<int>(std::lround(a.x + t * (b.x - a.x)));
        const int y = static_cast<int>(std::lround(a.y + t * (b.y - a.y)));
        if (x < 0 || y < 0 || x >= img.width() || y >= img.height())
            continue;
        for (int c = 0; c < img.channels(); ++c)
            img.at(x, y, c) = rgb[static_cast<std::size_t>(std::min(c, 2))];
    }
}

void draw_quad(mcc::ImageBuffer& img, const mcc::Quadrilateral& q, std::array<std::uint8_t, 3> rgb)
{
    for (int i = 0; i < 4; ++i)
        draw_line(img, q.corners[i], q.corners[(i + 1) % 4], rgb);
}

mcc::ImageBuffer overlay(const mcc::ImageBuffer& src, const mcc::recognition::DetectionResult& r)
{
    mcc::ImageBuffer img = src;
    for (const auto& h : r.hypotheses) {
        for (const auto& q : h.patch_quads)
            draw_quad(img, q, {255, 255, 0});
        draw_quad(img, h.corners, {0, 255, 0});
        // Mark the corner next to the first patch.
        const auto c = h.corners.corners[0];
        for (int d = -3; d <= 3; ++d) {
            draw_line(img, {c.x - 3, c.y + d}, {c.x + 3, c.y + d}, {255, 0, 0});
        }
    }
    return img;
}

int cmd_detect(const std::string& input, const std::string& model_path, const std::string& rois_path,
               std::optional<int> n, std::optional<double> cost_threshold, const std::string& config_path,
               const std::string& out, const std::string& overlay_path, int jobs)
{
    mcc::io::Config cfg = resolve_config(config_path);
    if (cost_threshold)
        cfg.recognition.cost_threshold = *cost_threshold;
    const mcc::ColorCheckerModel model = mcc::ColorCheckerModel::from_csv(model_path);
    std::optional<std::map<std::string, std::vector<mcc::Box>>> rois;
    if (!rois_path.empty())
        rois = mcc::io::read_rois(rois_path);

    const bool dir_mode = fs::is_directory(input);
    if (!dir_mode && !fs::exists(input))
        throw mcc::IoError("input not found: " + input);
    const std::vector<fs::path> images = dir_mode ? list_files(input, is_image) : std::vector<fs::path>{input};
    if (dir_mode) {
        fs::create_directories(out);
        if (!overlay_path.empty())
            fs::create_directories(overlay_path);
    }

    std::vector<double> seconds(images.size(), -1.0);
    std::mutex log;
    int failures = 0;
    run_pool(static_cast<int>(images.size()), jobs, [&](int i) {
        const fs::path& path = images[static_cast<std::size_t>(i)];
        const std::string id = path.stem().string();
        try {
            const mcc::ImageBuffer img = mcc::read_image(path);
            std::optional<std::vector<mcc::Box>> boxes;
            if (rois) {
                const auto it = rois->find(id);
                if (it == rois->end()) {
                    std::lock_guard lock(log);
                    std::cerr << "warning: no ROIs listed for " << id << "\n";
                }
                boxes = it == rois->end() ? std::vector<mcc::Box>{} : it->second;
            }
            mcc::recognition::DetectionResult r;
            try {
                r = mcc::recognition::detect(img, model, boxes, n, cfg.recognition);
            } catch (const mcc::InvalidInput& e) {
                std::lock_guard lock(log);
                std::cerr << path.string() << ": " << e.what() << "\n";
            }
            const fs::path dst = dir_mode ? fs::path(out) / (id + ".json") : fs::path(out);
            mcc::io::write_json_atomic(dst, mcc::io::to_json(r, id, img.width(), img.height()));
            if (!overlay_path.empty()) {
                const fs::path op = dir_mode ? fs::path(overlay_path) / (id + ".png") : fs::path(overlay_path);
                mcc::io::write_png_atomic(op, overlay(img, r));
            }
            seconds[static_cast<std::size_t>(i)] = r.seconds;
        } catch (const mcc::IoError& e) {
            std::lock_guard lock(log);
            std::cerr << path.string() << ": " << e.what() << "\n";
            ++failures;
        }
    });

    std::vector<double> t;
    for (double s : seconds)
        if (s >= 0)
            t.push_back(s);
    double mean = 0, var = 0;
    for (double s : t)
        mean += s;
    if (!t.empty())
        mean /= static_cast<double>(t.size());
    for (double s : t)
        var += (s - mean) * (s - mean);
    if (t.size() > 1)
        var /= static_cast<double>(t.size() - 1);
    std::printf("detect: %zu images, %.3f +- %.3f seconds per image\n", t.size(), mean, std::sqrt(var));
    return failures > 0 ? kIoError : 0;
}

int cmd_render(const std::string& config_path, int count, std::uint64_t seed, const std::string& out,
               const std::vector<std::string>& model_paths, int jobs)
{
    const mcc::io::Config cfg = resolve_config(config_path);
    std::vector<mcc::ColorCheckerModel> models;
    for (const auto& p : model_paths)
        models.push_back(mcc::ColorCheckerModel::from_csv(p));
    if (models.empty())
        models.push_back(mcc::ColorCheckerModel::synthetic());
    if (jobs > 0)
        omp_set_num_threads(jobs);
    const auto manifest = mcc::render::generate_dataset(cfg.render, models, count, seed, out);
    std::cout << mcc::io::to_json(manifest).dump(2) << "\n";
    return 0;
}

json quality_json(const mcc::eval::Quality& q) { return {{"a0", q.a0}, {"a1", q.a1}, {"a2", q.a2}}; }

int cmd_eval(const std::string& pred_dir, const std::string& gt_dir, std::optional<double> tp_flag,
             const std::string& config_path, const std::string& out, const std::string& curves_dir)
{
    const mcc::io::Config cfg = resolve_config(config_path);
    const double tp_threshold = tp_flag.value_or(cfg.tp_threshold);
    if (!(tp_threshold >= 0.0 && tp_threshold <= 1.0))
        throw mcc::ConfigError("--tp-threshold outside [0, 1]");
    auto ends_with = [](const std::string& s, const std::string& suffix) {
        return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (!fs::is_directory(pred_dir))
        throw mcc::IoError("prediction directory not found: " + pred_dir);
    if (!fs::is_directory(gt_dir))
        throw mcc::IoError("ground-truth directory not found: " + gt_dir);

    std::map<std::string, std::vector<mcc::eval::ChartRecord>> preds, gts;
    for (const auto& p : list_files(pred_dir, [&](const fs::path& f) {
             const std::string name = f.filename().string();
             return ends_with(name, ".json") && !ends_with(name, ".gt.json") && name != "manifest.json";
         })) {
        const json j = mcc::io::read_json(p);
        preds[j.at("image").get<std::string>()] = mcc::io::detection_records(j);
    }
    for (const auto& p : list_files(gt_dir, [&](const fs::path& f) { return ends_with(f.filename().string(), ".gt.json"); })) {
        const json j = mcc::io::read_json(p);
        gts[j.at("image").get<std::string>()] = mcc::io::ground_truth_records(j);
    }

    // An empty prediction set means nothing was detected anywhere.
    const bool nothing_detected = preds.empty();
    std::vector<mcc::eval::ImageInput> inputs;
    std::vector<std::string> mismatched;
    for (const auto& [id, g] : gts) {
        const auto it = preds.find(id);
        if (it != preds.end())
            inputs.push_back({id, it->second, g});
        else if (nothing_detected)
            inputs.push_back({id, {}, g});
        else
            mismatched.push_back(id);
    }
    for (const auto& [id, p] : preds)
        if (!gts.contains(id))
            mismatched.push_back(id);
    for (const auto& id : mismatched)
        std::cerr << "warning: image id without a counterpart, excluded: " << id << "\n";

    const auto report = mcc::eval::match_and_score(inputs, tp_threshold);
    json j;
    j["tp_threshold"] = tp_threshold;
    j["counts"] = {{"tp", report.counts.tp}, {"fp", report.counts.fp}, {"fn", report.counts.fn},
                   {"total", report.counts.total}};
    j["metrics"] = {{"accuracy", report.metrics.accuracy}, {"precision", report.metrics.precision},
                    {"recall", report.metrics.recall}, {"f_measure", report.metrics.f_measure}};
    j["excluded"] = mismatched;
    j["images"] = json::array();
    for (const auto& r : report.images) {
        json ij{{"image", r.image}, {"tp", r.tp}, {"fp", r.fp}, {"fn", r.fn}, {"missed", r.missed}};
        ij["detections"] = json::array();
        for (const auto& d : r.detections)
            ij["detections"].push_back({{"pred", d.pred}, {"gt", d.gt}, {"true_positive", d.true_positive},
                                        {"quality", quality_json(d.q)}});
        j["images"].push_back(std::move(ij));
    }
    mcc::io::write_json_atomic(out, j);

    if (!curves_dir.empty()) {
        fs::create_directories(curves_dir);
        const std::array<std::pair<mcc::eval::Metric, const char*>, 3> metrics{
            {{mcc::eval::Metric::A0, "a0"}, {mcc::eval::Metric::A1, "a1"}, {mcc::eval::Metric::A2, "a2"}}};
        for (const auto& [m, name] : metrics) {
            std::string csv = "tau,fraction\n";
            for (const auto& p : mcc::eval::accuracy_curve(report.images, m)) {
                char line[64];
                std::snprintf(line, sizeof line, "%.2f,%.6f\n", p.tau, p.fraction);
                csv += line;
            }
            mcc::io::write_text_atomic(fs::path(curves_dir) / (std::string("curve_") + name + ".csv"), csv);
        }
    }
    std::printf("eval: TP=%ld FP=%ld FN=%ld Acc=%.3f Prec=%.3f Rec=%.3f F=%.3f\n", report.counts.tp,
                report.counts.fp, report.counts.fn, report.metrics.accuracy, report.metrics.precision,
                report.metrics.recall, report.metrics.f_measure);
    const bool all_mismatched = inputs.empty() && !mismatched.empty();
    return all_mismatched ? kIoError : 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ColorChecker Classic detection, synthetic rendering and scoring"};
    app.require_subcommand(1);

    std::string input, model, rois, config, out, overlay_path;
    std::optional<int> n;
    std::optional<double> cost_threshold;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    auto* detect = app.add_subcommand("detect", "Detect charts in an image or a directory of images");
    detect->add_option("--input", input, "Image file or directory")->required();
    detect->add_option("--model", model, "Chart model CSV (name,R,G,B)")->required();
    detect->add_option("--rois", rois, "ROI JSON: {image id: [[x0,y0,x1,y1], ...]}");
    detect->add_option("--n", n, "Expected number of charts")->check(CLI::NonNegativeNumber);
    detect->add_option("--cost-threshold", cost_threshold, "Cost threshold when --n is absent");
    detect->add_option("--config", config, "Config JSON (falls back to $MCC_CONFIG)");
    detect->add_option("--out", out, "Result JSON file, or directory for directory input")->required();
    detect->add_option("--overlay", overlay_path, "Overlay PNG file, or directory for directory input");
    detect->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    int count = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> models;
    int render_jobs = 0;
    auto* render = app.add_subcommand("render", "Render a synthetic dataset with ground truth");
    render->add_option("--config", config, "Config JSON (falls back to $MCC_CONFIG)");
    render->add_option("--count", count, "Number of images")->required()->check(CLI::NonNegativeNumber);
    render->add_option("--seed", seed, "Master seed")->required();
    render->add_option("--out", out, "Output directory")->required();
    render->add_option("--model", models, "Chart model CSV per identity (default: synthetic palette)");
    render->add_option("--jobs", render_jobs, "Worker threads")->check(CLI::PositiveNumber);

    std::string pred, gt, curves;
    std::optional<double> tp_threshold;
    auto* eval = app.add_subcommand("eval", "Score detections against ground truth");
    eval->add_option("--pred", pred, "Directory of detection JSON files")->required();
    eval->add_option("--gt", gt, "Directory of *.gt.json files")->required();
    eval->add_option("--tp-threshold", tp_threshold, "Box IOU needed for a true positive");
    eval->add_option("--config", config, "Config JSON (falls back to $MCC_CONFIG)");
    eval->add_option("--out", out, "Report JSON")->required();
    eval->add_option("--curves", curves, "Directory for a0/a1/a2 curve CSVs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kIoError;
    }

    try {
        if (*detect)
            return cmd_detect(input, model, rois, n, cost_threshold, config, out, overlay_path, jobs);
        if (*render)
            return cmd_render(config, count, seed, out, models, render_jobs);
        return cmd_eval(pred, gt, tp_threshold, config, out, curves);
    } catch (const mcc::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const mcc::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const mcc::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const mcc::ScoringError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: schema: " << e.what() << "\n";
        return kIoError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
}
