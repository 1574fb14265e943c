#include "convtrace/image_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>

#include <png.h>

#include "convtrace/error.hpp"
#include "convtrace/log.hpp"

namespace convtrace {
namespace {

constexpr std::array<std::uint8_t, 8> kPngMagic{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

bool is_png(const std::vector<std::uint8_t>& bytes)
{
    return bytes.size() >= kPngMagic.size() &&
           std::equal(kPngMagic.begin(), kPngMagic.end(), bytes.begin());
}

bool is_jpeg(const std::vector<std::uint8_t>& bytes)
{
    return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

// IHDR is always the first chunk: 8 signature + 4 length + 4 type + 4 w + 4 h.
int png_header_bit_depth(const std::vector<std::uint8_t>& bytes)
{
    if (bytes.size() < 33 || std::memcmp(bytes.data() + 12, "IHDR", 4) != 0) {
        throw IoError("PNG stream has no IHDR chunk");
    }
    return bytes[24];
}

int png_header_color_type(const std::vector<std::uint8_t>& bytes) { return bytes[25]; }

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for " + path.string());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

RgbImage decode_png(const std::vector<std::uint8_t>& bytes, std::vector<std::string>* warnings)
{
    if (!is_png(bytes)) throw FormatError("not a PNG stream");
    const int depth = png_header_bit_depth(bytes);
    const int color_type = png_header_color_type(bytes);
    // Palette images store 8-bit samples in the palette regardless of index width.
    if (depth != 8 && color_type != PNG_COLOR_TYPE_PALETTE) {
        throw FormatError("unsupported PNG bit depth " + std::to_string(depth));
    }

    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw IoError("PNG header: " + msg);
    }
    const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
    const bool alpha = (img.format & PNG_FORMAT_FLAG_ALPHA) != 0;
    img.format = (color ? PNG_FORMAT_FLAG_COLOR : 0) | (alpha ? PNG_FORMAT_FLAG_ALPHA : 0);
    const std::size_t channels = PNG_IMAGE_SAMPLE_CHANNELS(img.format);
    const std::size_t width = img.width;
    const std::size_t height = img.height;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw IoError("PNG decode: " + msg);
    }

    RgbImage out(width, height);
    for (std::size_t i = 0; i < width * height; ++i) {
        const std::uint8_t* px = buffer.data() + i * channels;
        if (color) {
            out.r.data()[i] = px[0] / 255.0;
            out.g.data()[i] = px[1] / 255.0;
            out.b.data()[i] = px[2] / 255.0;
        } else {
            const double v = px[0] / 255.0;
            out.r.data()[i] = out.g.data()[i] = out.b.data()[i] = v;
        }
    }
    if (!color) {
        const std::string msg = "grayscale PNG replicated into RGB";
        log::warn(msg);
        if (warnings) warnings->push_back(msg);
    }
    return out;
}

std::vector<std::uint8_t> encode_png(const RgbImage& image)
{
    if (image.empty()) throw ValidationError("cannot encode an empty image");
    const std::size_t n = image.width() * image.height();
    std::vector<std::uint8_t> pixels(n * 3);
    for (std::size_t i = 0; i < n; ++i) {
        pixels[3 * i + 0] = to_byte(image.r.data()[i]);
        pixels[3 * i + 1] = to_byte(image.g.data()[i]);
        pixels[3 * i + 2] = to_byte(image.b.data()[i]);
    }

    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width());
    img.height = static_cast<png_uint_32>(image.height());
    img.format = PNG_FORMAT_RGB;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&img, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
        throw IoError(std::string("PNG encode: ") + img.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&img, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
        throw IoError(std::string("PNG encode: ") + img.message);
    }
    out.resize(size);
    return out;
}

void save_png(const RgbImage& image, const std::filesystem::path& path)
{
    write_file_bytes(path, encode_png(image));
}

RgbImage load_image(const std::filesystem::path& path, std::vector<std::string>* warnings)
{
    const auto bytes = read_file_bytes(path);
    if (bytes.empty()) throw IoError(path.string() + ": empty file");
    try {
        if (is_png(bytes)) return decode_png(bytes, warnings);
        if (is_jpeg(bytes)) return decode_jpeg(bytes, warnings);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    throw FormatError(path.string() + ": neither PNG nor JPEG");
}

}  // namespace convtrace
