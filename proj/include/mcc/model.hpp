#pragma once

#include "mcc/geometry.hpp"

#include <array>
#include <filesystem>
#include <string>

namespace mcc {

using Color = std::array<double, 3>;  // RGB in [0,1]

// 4x6 ColorChecker Classic layout in a planar model frame: origin at the
// chart's top-left corner, x to the right, y down, units of inches.
// Patch k (0-based, row-major) sits at row k / 6, column k % 6; patch 0 is
// the top-left patch of the chart.
class ColorCheckerModel {
public:
    static constexpr int kRows = 4;
    static constexpr int kCols = 6;
    static constexpr int kPatches = kRows * kCols;

    static constexpr double kWidth = 11.0;
    static constexpr double kHeight = 8.25;
    static constexpr double kMargin = 1.5;
    static constexpr double kPatchSize = 1.125;
    static constexpr double kGap = 0.25;
    static constexpr double kPitch = kPatchSize + kGap;

    ColorCheckerModel(std::array<Color, kPatches> colors, std::array<std::string, kPatches> names,
                      Color frame = {0.05, 0.05, 0.05});

    // 18 chromatic colors from farthest-point sampling over the RGB cube
    // plus a six-step gray row; stands in for measured chart data.
    static ColorCheckerModel synthetic();

    // CSV with header and rows name,R,G,B (0-255); 24 patch rows in
    // row-major order, optionally followed by a row named "frame".
    static ColorCheckerModel from_csv(const std::filesystem::path& path);
    void write_csv(const std::filesystem::path& path) const;

    const std::array<Color, kPatches>& colors() const { return colors_; }
    const Color& color(int k) const { return colors_[k]; }
    const std::string& name(int k) const { return names_[k]; }
    const Color& frame_color() const { return frame_; }

    static Quadrilateral chart_quad();
    static Quadrilateral patch_quad(int k);
    static Point2 patch_center(int k);
    static Point2 cell_center(int row, int col);

private:
    std::array<Color, kPatches> colors_;
    std::array<std::string, kPatches> names_;
    Color frame_;
};

double luma(const Color& c);
double cosine_similarity(const Color& a, const Color& b);

}  // namespace mcc
