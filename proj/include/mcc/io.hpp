#pragma once

#include "mcc/eval.hpp"
#include "mcc/recognition.hpp"
#include "mcc/render.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

// On-disk schemas: detection results, ground truth, manifests, ROI files and
// the configuration file.
namespace mcc::io {

using json = nlohmann::json;

json to_json(const recognition::CheckerHypothesis& h);
json to_json(const recognition::DetectionResult& r, const std::string& image, int width, int height);
json to_json(const render::GroundTruth& gt);
json to_json(const render::Manifest& m);

render::GroundTruth ground_truth_from_json(const json& j);

// Chart records for scoring, from a detection or a ground-truth document.
std::vector<eval::ChartRecord> detection_records(const json& j);
std::vector<eval::ChartRecord> ground_truth_records(const json& j);

// {"<image id>": [[x0, y0, x1, y1], ...], ...}
std::map<std::string, std::vector<Box>> read_rois(const std::filesystem::path& path);

json read_json(const std::filesystem::path& path);

// Write to a sibling temporary file, then rename over the target.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json_atomic(const std::filesystem::path& path, const json& j);
void write_png_atomic(const std::filesystem::path& path, const ImageBuffer& img);

struct Config {
    recognition::RecognitionConfig recognition;
    render::RenderConfig render;
    double tp_threshold = 0.5;
};

// Nested sections "recognition", "render", "eval"; missing keys keep their
// defaults, unknown keys and out-of-range values throw ConfigError naming
// the key.
Config config_from_json(const json& j);
json config_to_json(const Config& c);
Config load_config(const std::filesystem::path& path);

}  // namespace mcc::io
