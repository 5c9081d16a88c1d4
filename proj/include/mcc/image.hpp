#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mcc {

// Row-major 8-bit raster with 1 or 3 interleaved channels.
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height, int channels, std::uint8_t fill = 0);
    ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    std::uint8_t& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
    std::uint8_t at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

    std::span<std::uint8_t> row(int y)
    {
        return {data_.data() + static_cast<std::size_t>(y) * width_ * channels_,
                static_cast<std::size_t>(width_) * channels_};
    }
    std::span<const std::uint8_t> row(int y) const
    {
        return {data_.data() + static_cast<std::size_t>(y) * width_ * channels_,
                static_cast<std::size_t>(width_) * channels_};
    }

    std::span<std::uint8_t> data() { return data_; }
    std::span<const std::uint8_t> data() const { return data_; }

    bool operator==(const ImageBuffer&) const = default;

private:
    std::size_t index(int x, int y, int c) const
    {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

// One boolean per pixel, stored as 0/1 bytes.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false)
        : width_(width), height_(height),
          bits_(static_cast<std::size_t>(width) * height, fill ? 1 : 0)
    {
    }

    int width() const { return width_; }
    int height() const { return height_; }

    bool get(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }

    // Out-of-range reads are background.
    bool get_or_false(int x, int y) const
    {
        return x >= 0 && y >= 0 && x < width_ && y < height_ && get(x, y);
    }

    std::span<std::uint8_t> bits() { return bits_; }
    std::span<const std::uint8_t> bits() const { return bits_; }

    std::size_t count() const;

    bool operator==(const BinaryMask&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

BinaryMask invert(const BinaryMask& mask);

// PNG (8-bit gray/RGB/RGBA, alpha dropped) and binary PPM/PGM.
ImageBuffer read_image(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageBuffer& img);
void write_ppm(const std::filesystem::path& path, const ImageBuffer& img);

}  // namespace mcc
