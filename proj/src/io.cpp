#include "mcc/io.hpp"

#include "mcc/error.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace mcc::io {

namespace {

json point(const Point2& p) { return json::array({p.x, p.y}); }

json quad(const Quadrilateral& q)
{
    json a = json::array();
    for (const auto& p : q.corners)
        a.push_back(point(p));
    return a;
}

json color(const Color& c) { return json::array({c[0], c[1], c[2]}); }

json box(const Box& b) { return json::array({b.x0, b.y0, b.x1, b.y1}); }

template <typename T, std::size_t N, typename F>
json array_of(const std::array<T, N>& a, F f)
{
    json out = json::array();
    for (const auto& v : a)
        out.push_back(f(v));
    return out;
}

[[noreturn]] void schema(const std::string& what) { throw ConfigError("schema: " + what); }

double number(const json& j, const std::string& what)
{
    if (!j.is_number())
        schema(what + " must be a number");
    return j.get<double>();
}

const json& field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        schema(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

Point2 point_from(const json& j)
{
    if (!j.is_array() || j.size() != 2)
        schema("point must be [x, y]");
    return {number(j[0], "x"), number(j[1], "y")};
}

Quadrilateral quad_from(const json& j)
{
    if (!j.is_array() || j.size() != 4)
        schema("quadrilateral must have 4 corners");
    Quadrilateral q;
    for (int i = 0; i < 4; ++i)
        q.corners[i] = point_from(j[i]);
    return q;
}

Color color_from(const json& j)
{
    if (!j.is_array() || j.size() != 3)
        schema("color must be [r, g, b]");
    return {number(j[0], "r"), number(j[1], "g"), number(j[2], "b")};
}

Box box_from(const json& j)
{
    if (!j.is_array() || j.size() != 4)
        schema("box must be [x0, y0, x1, y1]");
    return {number(j[0], "x0"), number(j[1], "y0"), number(j[2], "x1"), number(j[3], "y1")};
}

template <typename F>
auto patches_from(const json& j, F f)
{
    using T = decltype(f(j));
    if (!j.is_array() || j.size() != ColorCheckerModel::kPatches)
        schema("expected 24 per-patch entries");
    std::array<T, ColorCheckerModel::kPatches> out{};
    for (int k = 0; k < ColorCheckerModel::kPatches; ++k)
        out[k] = f(j[k]);
    return out;
}

// Typed, range-checked reads from one config section; every key consumed is
// recorded so leftovers can be reported.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(path_ + ": expected an object");
    }

    // Rejects keys no get() asked for.
    void done() const
    {
        for (const auto& [key, value] : j_.items())
            if (!seen_.contains(key))
                throw ConfigError("unknown config key: " + name(key));
    }

    template <typename T>
    void get(const char* key, T& out, double lo, double hi)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            return;
        const json& v = j_.at(key);
        if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer())
                throw ConfigError(name(key) + ": expected an integer");
        } else if (!v.is_number()) {
            throw ConfigError(name(key) + ": expected a number");
        }
        const double d = v.get<double>();
        if (!(d >= lo && d <= hi))
            throw ConfigError(name(key) + ": value " + v.dump() + " outside [" + fmt(lo) + ", " +
                              fmt(hi) + "]");
        out = v.get<T>();
    }

    void get(const char* key, bool& out)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            return;
        if (!j_.at(key).is_boolean())
            throw ConfigError(name(key) + ": expected a boolean");
        out = j_.at(key).get<bool>();
    }

    void get(const char* key, render::Interval& out, double lo, double hi)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            return;
        const json& v = j_.at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw ConfigError(name(key) + ": expected [lo, hi]");
        const render::Interval iv{v[0].get<double>(), v[1].get<double>()};
        if (!(iv.lo <= iv.hi) || iv.lo < lo || iv.hi > hi)
            throw ConfigError(name(key) + ": interval must satisfy " + fmt(lo) + " <= lo <= hi <= " + fmt(hi));
        out = iv;
    }

    void get(const char* key, std::vector<std::string>& out)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            return;
        const json& v = j_.at(key);
        if (!v.is_array() || v.empty())
            throw ConfigError(name(key) + ": expected a non-empty list of strings");
        std::vector<std::string> r;
        for (const auto& s : v) {
            if (!s.is_string())
                throw ConfigError(name(key) + ": expected a non-empty list of strings");
            r.push_back(s.get<std::string>());
        }
        out = std::move(r);
    }

    std::optional<Section> sub(const char* key)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            return std::nullopt;
        return std::optional<Section>(std::in_place, j_.at(key), name(key));
    }

private:
    std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    static std::string fmt(double v)
    {
        std::ostringstream s;
        s << v;
        return s.str();
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace

json to_json(const recognition::CheckerHypothesis& h)
{
    json j;
    j["corners"] = quad(h.corners);
    j["homography"] = h.homography.values();
    j["theta"] = h.theta;
    j["delta"] = h.delta;
    j["patches"] = array_of(h.patch_quads, quad);
    j["mu"] = array_of(h.mu, color);
    j["sigma"] = array_of(h.sigma, color);
    j["cost"] = h.cost;
    j["roi"] = h.roi ? box(*h.roi) : json(nullptr);
    return j;
}

json to_json(const recognition::DetectionResult& r, const std::string& image, int width, int height)
{
    json j;
    j["image"] = image;
    j["width"] = width;
    j["height"] = height;
    j["seconds"] = r.seconds;
    j["rois"] = json::array();
    for (const auto& b : r.rois)
        j["rois"].push_back(box(b));
    j["hypotheses"] = json::array();
    for (const auto& h : r.hypotheses)
        j["hypotheses"].push_back(to_json(h));
    return j;
}

json to_json(const render::GroundTruth& gt)
{
    json j;
    j["image"] = gt.image;
    j["width"] = gt.width;
    j["height"] = gt.height;
    j["checkers"] = json::array();
    for (const auto& c : gt.checkers) {
        json cj;
        cj["outline"] = quad(c.outline);
        cj["patches"] = array_of(c.patches, quad);
        cj["mu"] = array_of(c.mu, color);
        cj["truncated"] = c.truncated;
        cj["bbox"] = box(c.bbox);
        cj["pose"] = {{"r", {c.pose.rx, c.pose.ry, c.pose.rz}}, {"t", {c.pose.tx, c.pose.ty, c.pose.tz}}};
        cj["identity"] = c.identity;
        j["checkers"].push_back(std::move(cj));
    }
    return j;
}

json to_json(const render::Manifest& m)
{
    json j;
    j["seed"] = m.seed;
    j["count"] = m.count;
    j["images"] = json::array();
    for (const auto& e : m.entries)
        j["images"].push_back({{"image", e.image}, {"gt", e.gt}, {"seed", e.seed}, {"checkers", e.checkers}});
    return j;
}

render::GroundTruth ground_truth_from_json(const json& j)
{
    render::GroundTruth gt;
    const json& image = field(j, "image");
    if (!image.is_string())
        schema("image must be a string");
    gt.image = image.get<std::string>();
    gt.width = static_cast<int>(number(field(j, "width"), "width"));
    gt.height = static_cast<int>(number(field(j, "height"), "height"));
    const json& checkers = field(j, "checkers");
    if (!checkers.is_array())
        schema("checkers must be a list");
    for (const auto& cj : checkers) {
        render::GroundTruthChecker c;
        c.outline = quad_from(field(cj, "outline"));
        c.patches = patches_from(field(cj, "patches"), quad_from);
        c.mu = patches_from(field(cj, "mu"), color_from);
        if (cj.contains("truncated"))
            c.truncated = patches_from(cj.at("truncated"), [](const json& v) {
                if (!v.is_boolean())
                    schema("truncated entries must be booleans");
                return v.get<bool>();
            });
        c.bbox = cj.contains("bbox") ? box_from(cj.at("bbox")) : c.outline.bbox();
        if (cj.contains("pose")) {
            const json& p = cj.at("pose");
            const Color r = color_from(field(p, "r"));
            const Color t = color_from(field(p, "t"));
            c.pose = {r[0], r[1], r[2], t[0], t[1], t[2]};
        }
        if (cj.contains("identity"))
            c.identity = static_cast<int>(number(cj.at("identity"), "identity"));
        gt.checkers.push_back(c);
    }
    return gt;
}

std::vector<eval::ChartRecord> detection_records(const json& j)
{
    const json& hyps = field(j, "hypotheses");
    if (!hyps.is_array())
        schema("hypotheses must be a list");
    std::vector<eval::ChartRecord> out;
    for (const auto& h : hyps) {
        eval::ChartRecord r;
        r.outline = quad_from(field(h, "corners"));
        r.patches = patches_from(field(h, "patches"), quad_from);
        r.mu = patches_from(field(h, "mu"), color_from);
        out.push_back(r);
    }
    return out;
}

std::vector<eval::ChartRecord> ground_truth_records(const json& j)
{
    std::vector<eval::ChartRecord> out;
    for (const auto& c : ground_truth_from_json(j).checkers)
        out.push_back({c.outline, c.patches, c.mu});
    return out;
}

std::map<std::string, std::vector<Box>> read_rois(const std::filesystem::path& path)
{
    const json j = read_json(path);
    if (!j.is_object())
        throw ConfigError("schema: ROI file must map image ids to box lists: " + path.string());
    std::map<std::string, std::vector<Box>> out;
    for (const auto& [id, boxes] : j.items()) {
        if (!boxes.is_array())
            throw ConfigError("schema: ROI entry for " + id + " must be a list of boxes");
        auto& dst = out[id];
        for (const auto& b : boxes)
            dst.push_back(box_from(b));
    }
    return out;
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("schema: invalid JSON in " + path.string() + ": " + e.what());
    }
}

namespace {

std::filesystem::path temp_sibling(const std::filesystem::path& path)
{
    std::ostringstream s;
    s << path.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id());
    return path.parent_path() / s.str();
}

void commit(const std::filesystem::path& tmp, const std::filesystem::path& path)
{
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot write " + path.string());
    }
}

}  // namespace

void write_text_atomic(const std::filesystem::path& path, const std::string& text)
{
    const auto tmp = temp_sibling(path);
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw IoError("cannot write " + path.string());
        out << text;
        if (!out)
            throw IoError("cannot write " + path.string());
    }
    commit(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path, const json& j)
{
    write_text_atomic(path, j.dump(2) + "\n");
}

void write_png_atomic(const std::filesystem::path& path, const ImageBuffer& img)
{
    const auto tmp = temp_sibling(path);
    write_png(tmp, img);
    commit(tmp, path);
}

Config config_from_json(const json& j)
{
    Config c;
    constexpr double big = 1e9;
    Section root(j, "");
    if (auto s = root.sub("recognition")) {
        auto& r = c.recognition;
        s->get("canonical_min_dim", r.canonical_min_dim, 24, 10000);
        s->get("wiener_window", r.wiener_window, 1, 99);
        s->get("threshold_window", r.threshold_window, 3, 999);
        s->get("threshold_offset", r.threshold_offset, 0, 255);
        s->get("rdp_epsilon_factor", r.rdp_epsilon_factor, 0, 1);
        s->get("convexity_min", r.convexity_min, 0, 1);
        s->get("axes_ratio_min", r.axes_ratio_min, 0, 1);
        s->get("circularity_min", r.circularity_min, 0, 1);
        s->get("circularity_max", r.circularity_max, 0, 1);
        s->get("entropy_max", r.entropy_max, 0, 8);
        s->get("min_region_area", r.min_region_area, 0, big);
        s->get("b0_factor", r.b0_factor, 0, 100);
        s->get("min_group_size", r.min_group_size, 4, 24);
        s->get("sample_shrink", r.sample_shrink, 0.05, 1);
        s->get("orientation_candidates", r.orientation_candidates, 1, 96);
        s->get("nms_iou", r.nms_iou, 0, 1);
        s->get("cost_threshold", r.cost_threshold, 0, 1000);
        s->get("roi_margin", r.roi_margin, 0, 10);
        s->done();
        if (r.wiener_window % 2 == 0)
            throw ConfigError("recognition.wiener_window: must be odd");
        if (r.threshold_window % 2 == 0)
            throw ConfigError("recognition.threshold_window: must be odd");
        if (r.circularity_min >= r.circularity_max)
            throw ConfigError("recognition.circularity_min: must be below circularity_max");
    }
    if (auto s = root.sub("render")) {
        auto& r = c.render;
        if (auto cam = s->sub("camera")) {
            cam->get("focal", r.camera.focal, 1e-6, big);
            cam->get("width", r.camera.width, 1, 100000);
            cam->get("height", r.camera.height, 1, 100000);
            // The principal point defaults to the image center.
            r.camera.cx = (r.camera.width - 1) / 2.0;
            r.camera.cy = (r.camera.height - 1) / 2.0;
            cam->get("cx", r.camera.cx, 0, 100000);
            cam->get("cy", r.camera.cy, 0, 100000);
            cam->done();
        }
        s->get("min_checkers", r.min_checkers, 1, 5);
        s->get("max_checkers", r.max_checkers, 1, 5);
        const double half_pi = std::numbers::pi / 2;
        s->get("rx", r.rx, -half_pi, half_pi);
        s->get("ry", r.ry, -half_pi, half_pi);
        s->get("rz", r.rz, -half_pi, half_pi);
        s->get("tx", r.tx, -big, big);
        s->get("ty", r.ty, -big, big);
        s->get("tz", r.tz, -30, -10);
        s->get("identities", r.identities, 1, 1000);
        s->get("backgrounds", r.backgrounds);
        s->get("noise_sigma", r.noise_sigma, 0, 0.5);
        s->get("luminance_adjustment", r.luminance_adjustment);
        s->get("require_visible", r.require_visible);
        s->get("non_overlapping", r.non_overlapping);
        s->get("min_bbox_fraction", r.min_bbox_fraction, 0, 1);
        s->get("max_attempts", r.max_attempts, 1, 1e8);
        s->done();
        if (r.min_checkers > r.max_checkers)
            throw ConfigError("render.min_checkers: exceeds max_checkers");
        try {
            r.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("render.") + e.what());
        }
    }
    if (auto s = root.sub("eval")) {
        s->get("tp_threshold", c.tp_threshold, 0, 1);
        s->done();
    }
    root.done();
    return c;
}

json config_to_json(const Config& c)
{
    const auto& r = c.recognition;
    const auto& d = c.render;
    auto iv = [](const render::Interval& i) { return json::array({i.lo, i.hi}); };
    return {
        {"recognition",
         {{"canonical_min_dim", r.canonical_min_dim},
          {"wiener_window", r.wiener_window},
          {"threshold_window", r.threshold_window},
          {"threshold_offset", r.threshold_offset},
          {"rdp_epsilon_factor", r.rdp_epsilon_factor},
          {"convexity_min", r.convexity_min},
          {"axes_ratio_min", r.axes_ratio_min},
          {"circularity_min", r.circularity_min},
          {"circularity_max", r.circularity_max},
          {"entropy_max", r.entropy_max},
          {"min_region_area", r.min_region_area},
          {"b0_factor", r.b0_factor},
          {"min_group_size", r.min_group_size},
          {"sample_shrink", r.sample_shrink},
          {"orientation_candidates", r.orientation_candidates},
          {"nms_iou", r.nms_iou},
          {"cost_threshold", r.cost_threshold},
          {"roi_margin", r.roi_margin}}},
        {"render",
         {{"camera",
           {{"focal", d.camera.focal},
            {"width", d.camera.width},
            {"height", d.camera.height},
            {"cx", d.camera.cx},
            {"cy", d.camera.cy}}},
          {"min_checkers", d.min_checkers},
          {"max_checkers", d.max_checkers},
          {"rx", iv(d.rx)},
          {"ry", iv(d.ry)},
          {"rz", iv(d.rz)},
          {"tx", iv(d.tx)},
          {"ty", iv(d.ty)},
          {"tz", iv(d.tz)},
          {"identities", d.identities},
          {"backgrounds", d.backgrounds},
          {"noise_sigma", d.noise_sigma},
          {"luminance_adjustment", d.luminance_adjustment},
          {"require_visible", d.require_visible},
          {"non_overlapping", d.non_overlapping},
          {"min_bbox_fraction", d.min_bbox_fraction},
          {"max_attempts", d.max_attempts}}},
        {"eval", {{"tp_threshold", c.tp_threshold}}},
    };
}

Config load_config(const std::filesystem::path& path) { return config_from_json(read_json(path)); }

}  // namespace mcc::io
