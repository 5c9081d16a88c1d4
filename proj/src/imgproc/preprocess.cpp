#include "mcc/error.hpp"
#include "mcc/imgproc.hpp"
#include "kernels_common.hpp"

#include <algorithm>
#include <cmath>

namespace mcc::imgproc {

std::vector<std::int32_t> luma_milli(const ImageBuffer& img)
{
    const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
    std::vector<std::int32_t> out(n);
    const auto data = img.data();
    if (img.channels() == 1) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = 1000 * data[i];
    } else {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = 299 * data[3 * i] + 587 * data[3 * i + 1] + 114 * data[3 * i + 2];
    }
    return out;
}

std::pair<int, int> canonical_size(int width, int height, int target_min_dim)
{
    const double scale = static_cast<double>(target_min_dim) / std::min(width, height);
    int w = static_cast<int>(std::lround(width * scale));
    int h = static_cast<int>(std::lround(height * scale));
    if (width <= height)
        w = target_min_dim;
    else
        h = target_min_dim;
    return {std::max(1, w), std::max(1, h)};
}

ImageBuffer normalize_channels(const ImageBuffer& img)
{
    ImageBuffer out = img;
    const int nc = img.channels();
    const auto src = img.data();
    auto dst = out.data();
    for (int c = 0; c < nc; ++c) {
        std::uint8_t mx = 0;
        for (std::size_t i = c; i < src.size(); i += nc)
            mx = std::max(mx, src[i]);
        if (mx == 0 || mx == 255)
            continue;
        const double gain = 255.0 / mx;
        for (std::size_t i = c; i < src.size(); i += nc)
            dst[i] = detail::clamp_u8(src[i] * gain);
    }
    return out;
}

ImageBuffer canonize(const ImageBuffer& img, const CanonizeOptions& opts)
{
    if (img.channels() != 3)
        throw InvalidInput("canonize expects a 3-channel image");
    if (img.width() < 24 || img.height() < 24)
        throw InvalidInput("image smaller than 24 px on a side");
    const auto [w, h] = canonical_size(img.width(), img.height(), opts.target_min_dim);
    ImageBuffer resized = (w == img.width() && h == img.height()) ? img : resize_bilinear(img, w, h);
    return normalize_channels(wiener_filter(resized, opts.wiener_window));
}

BinaryMask clear_border(const BinaryMask& mask)
{
    const LabelImage lab = label_components(mask);
    std::vector<char> touches(static_cast<std::size_t>(lab.count) + 1, 0);
    const int w = lab.width, h = lab.height;
    for (int x = 0; x < w; ++x) {
        touches[lab.labels[x]] = 1;
        touches[lab.labels[static_cast<std::size_t>(h - 1) * w + x]] = 1;
    }
    for (int y = 0; y < h; ++y) {
        touches[lab.labels[static_cast<std::size_t>(y) * w]] = 1;
        touches[lab.labels[static_cast<std::size_t>(y) * w + w - 1]] = 1;
    }
    BinaryMask out(w, h);
    auto bits = out.bits();
    for (std::size_t i = 0; i < lab.labels.size(); ++i)
        bits[i] = (lab.labels[i] != 0 && !touches[lab.labels[i]]) ? 1 : 0;
    return out;
}

BinaryMask morph_cleanup(const BinaryMask& mask)
{
    return clear_border(dilate3x3(erode3x3(mask)));
}

}  // namespace mcc::imgproc
