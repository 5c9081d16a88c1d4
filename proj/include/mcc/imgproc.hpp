#pragma once

#include "mcc/geometry.hpp"
#include "mcc/image.hpp"

#include <cstdint>
#include <vector>

// Pixel-level stages of the recognizer: canonical rescaling and denoising,
// binarization, morphology and region labeling.
//
// Every data-parallel kernel exists twice: the default entry points run
// OpenMP-parallel loops, the ones in mcc::imgproc::serial are the plain
// reference loops the tests compare against. Both produce identical output.
namespace mcc::imgproc {

struct Region {
    int label = 0;
    long pixel_count = 0;
    double perimeter = 0.0;
    double convex_area = 0.0;
    double axis_major = 0.0;
    double axis_minor = 0.0;
    Point2 centroid;
    // Outer boundary pixel centers, clockwise, starting at the top-left pixel.
    std::vector<Point2> contour;
    double entropy = 0.0;
    Box bbox;  // pixel extents, inclusive corners
};

struct CanonizeOptions {
    int target_min_dim = 400;
    int wiener_window = 5;
};

// Integer fixed-point luma, 1000 * (0.299 R + 0.587 G + 0.114 B).
// Single-channel images give 1000 * value.
std::vector<std::int32_t> luma_milli(const ImageBuffer& img);

// Output size for canonization of a width x height image.
std::pair<int, int> canonical_size(int width, int height, int target_min_dim = 400);

ImageBuffer resize_bilinear(const ImageBuffer& img, int width, int height);
ImageBuffer wiener_filter(const ImageBuffer& img, int window = 5);
// Each channel scaled by 255 / max(channel).
ImageBuffer normalize_channels(const ImageBuffer& img);

// Rescale (min dimension -> target), denoise, normalize.
ImageBuffer canonize(const ImageBuffer& img, const CanonizeOptions& opts = {});

// Foreground where luma < local mean - offset (offset in 8-bit levels).
BinaryMask adaptive_threshold(const ImageBuffer& img, int window = 31, double offset = 5.0);

BinaryMask erode3x3(const BinaryMask& mask);
BinaryMask dilate3x3(const BinaryMask& mask);
// Removes every 8-connected component that touches the image border.
BinaryMask clear_border(const BinaryMask& mask);
// 3x3 opening followed by border clearing.
BinaryMask morph_cleanup(const BinaryMask& mask);

struct LabelImage {
    int width = 0;
    int height = 0;
    int count = 0;            // labels are 1..count, 0 is background
    std::vector<int> labels;  // raster order of first pixel
};

LabelImage label_components(const BinaryMask& mask);

// 8-connected regions with shape and intensity features.
std::vector<Region> connected_components(const BinaryMask& mask, const ImageBuffer& img);

// Features of one labeled region; exposed for the tests.
double chain_code_length(const std::vector<Point2>& closed_contour);
double shannon_entropy(const std::vector<long>& histogram);

namespace serial {

ImageBuffer resize_bilinear(const ImageBuffer& img, int width, int height);
ImageBuffer wiener_filter(const ImageBuffer& img, int window = 5);
BinaryMask adaptive_threshold(const ImageBuffer& img, int window = 31, double offset = 5.0);
BinaryMask erode3x3(const BinaryMask& mask);
BinaryMask dilate3x3(const BinaryMask& mask);
LabelImage label_components(const BinaryMask& mask);

}  // namespace serial

}  // namespace mcc::imgproc
