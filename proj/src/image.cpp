#include "mcc/image.hpp"

#include "mcc/error.hpp"

#include <png.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace mcc {

ImageBuffer::ImageBuffer(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels)
{
    if (width < 1 || height < 1 || (channels != 1 && channels != 3))
        throw InvalidInput("image dimensions must be positive with 1 or 3 channels");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data))
{
    if (width < 1 || height < 1 || (channels != 1 && channels != 3))
        throw InvalidInput("image dimensions must be positive with 1 or 3 channels");
    if (data_.size() != static_cast<std::size_t>(width) * height * channels)
        throw InvalidInput("image data length does not match width * height * channels");
}

std::size_t BinaryMask::count() const
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask invert(const BinaryMask& mask)
{
    BinaryMask out(mask.width(), mask.height());
    auto src = mask.bits();
    auto dst = out.bits();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = src[i] ? 0 : 1;
    return out;
}

namespace {

ImageBuffer read_png(const std::filesystem::path& path)
{
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw IoError(path.string() + ": " + image.message);

    const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
    image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    const int channels = gray ? 1 : 3;
    std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
    // Transparent pixels are composited over black.
    png_color black{0, 0, 0};
    if (!png_image_finish_read(&image, &black, data.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw IoError(path.string() + ": " + msg);
    }
    return ImageBuffer(static_cast<int>(image.width), static_cast<int>(image.height), channels,
                       std::move(data));
}

std::string next_token(std::istream& in)
{
    std::string tok;
    char c;
    while (in.get(c)) {
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty())
                break;
            continue;
        }
        tok.push_back(c);
    }
    return tok;
}

ImageBuffer read_pnm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(path.string() + ": cannot open");
    const std::string magic = next_token(in);
    if (magic != "P5" && magic != "P6")
        throw IoError(path.string() + ": unsupported PNM variant '" + magic + "'");
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(next_token(in));
        h = std::stoi(next_token(in));
        maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        throw IoError(path.string() + ": malformed PNM header");
    }
    if (w < 1 || h < 1 || maxval != 255)
        throw IoError(path.string() + ": only 8-bit PNM is supported");
    const int channels = magic == "P6" ? 3 : 1;
    std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h * channels);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (in.gcount() != static_cast<std::streamsize>(data.size()))
        throw IoError(path.string() + ": truncated pixel data");
    return ImageBuffer(w, h, channels, std::move(data));
}

bool has_png_signature(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    unsigned char sig[8] = {};
    in.read(reinterpret_cast<char*>(sig), 8);
    return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

}  // namespace

ImageBuffer read_image(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path))
        throw IoError(path.string() + ": no such file");
    if (has_png_signature(path))
        return read_png(path);
    return read_pnm(path);
}

void write_png(const std::filesystem::path& path, const ImageBuffer& img)
{
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = img.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, img.data().data(), 0, nullptr))
        throw IoError(path.string() + ": " + image.message);
}

void write_ppm(const std::filesystem::path& path, const ImageBuffer& img)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError(path.string() + ": cannot open for writing");
    out << (img.channels() == 3 ? "P6" : "P5") << "\n"
        << img.width() << " " << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data().data()),
              static_cast<std::streamsize>(img.size()));
    if (!out)
        throw IoError(path.string() + ": write failed");
}

}  // namespace mcc
