#include "mcc/model.hpp"

#include "mcc/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mcc {

double luma(const Color& c) { return 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]; }

double cosine_similarity(const Color& a, const Color& b)
{
    const double na = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    const double nb = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    return std::clamp((a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb), -1.0, 1.0);
}

ColorCheckerModel::ColorCheckerModel(std::array<Color, kPatches> colors,
                                     std::array<std::string, kPatches> names, Color frame)
    : colors_(colors), names_(std::move(names)), frame_(frame)
{
    auto in_unit = [](const Color& c) {
        return std::all_of(c.begin(), c.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
    };
    for (int i = 0; i < kPatches; ++i) {
        if (!in_unit(colors_[i]))
            throw InvalidInput("patch color outside [0,1]: " + names_[i]);
        for (int j = 0; j < i; ++j)
            if (colors_[i] == colors_[j])
                throw InvalidInput("duplicate patch colors: " + names_[j] + ", " + names_[i]);
    }
    if (!in_unit(frame_))
        throw InvalidInput("frame color outside [0,1]");
}

ColorCheckerModel ColorCheckerModel::synthetic()
{
    // Candidates on a 5-level lattice, away from the gray axis and from the
    // extremes of brightness.
    std::vector<Color> candidates;
    constexpr std::array<double, 5> levels = {0.15, 0.325, 0.5, 0.675, 0.85};
    for (double r : levels)
        for (double g : levels)
            for (double b : levels) {
                const Color c{r, g, b};
                const double chroma = std::max({r, g, b}) - std::min({r, g, b});
                if (chroma >= 0.3 && luma(c) >= 0.25 && luma(c) <= 0.75)
                    candidates.push_back(c);
            }

    // Farthest-point sampling under the angular distance the recognizer's
    // color cost uses; seeded with the candidate farthest from neutral.
    auto angle = [](const Color& a, const Color& b) { return std::acos(cosine_similarity(a, b)); };
    const Color neutral{1.0, 1.0, 1.0};
    std::vector<Color> chosen;
    std::size_t seed = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (angle(candidates[i], neutral) > angle(candidates[seed], neutral))
            seed = i;
    chosen.push_back(candidates[seed]);
    while (chosen.size() < 18) {
        std::size_t best = 0;
        double best_d = -1.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            double d = 1e9;
            for (const auto& c : chosen)
                d = std::min(d, angle(candidates[i], c));
            if (d > best_d + 1e-12) {
                best_d = d;
                best = i;
            }
        }
        chosen.push_back(candidates[best]);
    }

    std::array<Color, kPatches> colors{};
    std::array<std::string, kPatches> names{};
    for (int k = 0; k < 18; ++k) {
        colors[k] = chosen[k];
        names[k] = "chroma_" + std::to_string(k + 1);
    }
    constexpr std::array<double, 6> grays = {0.95, 0.78, 0.62, 0.47, 0.33, 0.20};
    for (int k = 0; k < 6; ++k) {
        colors[18 + k] = {grays[k], grays[k], grays[k]};
        names[18 + k] = "gray_" + std::to_string(k + 1);
    }
    return ColorCheckerModel(colors, names);
}

ColorCheckerModel ColorCheckerModel::from_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError(path.string() + ": cannot open color model");
    std::array<Color, kPatches> colors{};
    std::array<std::string, kPatches> names{};
    Color frame{0.05, 0.05, 0.05};
    std::string line;
    int count = 0;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (!header_seen) {
            header_seen = true;
            if (cells.size() == 4 && cells[0] == "name")
                continue;
        }
        if (cells.size() != 4)
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected name,R,G,B");
        Color c{};
        try {
            for (int i = 0; i < 3; ++i) {
                const double v = std::stod(cells[i + 1]);
                if (v < 0 || v > 255)
                    throw IoError(path.string() + ":" + std::to_string(line_no) +
                                  ": channel outside 0-255");
                c[i] = v / 255.0;
            }
        } catch (const std::invalid_argument&) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": non-numeric channel");
        }
        if (cells[0] == "frame") {
            frame = c;
            continue;
        }
        if (count >= kPatches)
            throw IoError(path.string() + ": more than 24 patch rows");
        names[count] = cells[0];
        colors[count] = c;
        ++count;
    }
    if (count != kPatches)
        throw IoError(path.string() + ": expected 24 patch rows, found " + std::to_string(count));
    return ColorCheckerModel(colors, names, frame);
}

void ColorCheckerModel::write_csv(const std::filesystem::path& path) const
{
    std::ofstream out(path);
    if (!out)
        throw IoError(path.string() + ": cannot open for writing");
    auto emit = [&](const std::string& name, const Color& c) {
        out << name;
        for (double v : c)
            out << ',' << std::lround(v * 255.0);
        out << '\n';
    };
    out << "name,R,G,B\n";
    for (int k = 0; k < kPatches; ++k)
        emit(names_[k], colors_[k]);
    emit("frame", frame_);
}

Quadrilateral ColorCheckerModel::chart_quad()
{
    return {{Point2{0, 0}, Point2{kWidth, 0}, Point2{kWidth, kHeight}, Point2{0, kHeight}}};
}

Point2 ColorCheckerModel::cell_center(int row, int col)
{
    return {kMargin + col * kPitch + kPatchSize / 2, kMargin + row * kPitch + kPatchSize / 2};
}

Point2 ColorCheckerModel::patch_center(int k) { return cell_center(k / kCols, k % kCols); }

Quadrilateral ColorCheckerModel::patch_quad(int k)
{
    const double x0 = kMargin + (k % kCols) * kPitch;
    const double y0 = kMargin + (k / kCols) * kPitch;
    return {{Point2{x0, y0}, Point2{x0 + kPatchSize, y0}, Point2{x0 + kPatchSize, y0 + kPatchSize},
             Point2{x0, y0 + kPatchSize}}};
}

}  // namespace mcc
