#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include <jpeglib.h>

#include "convtrace/error.hpp"
#include "convtrace/image_io.hpp"
#include "convtrace/log.hpp"

namespace convtrace {
namespace {

// libjpeg reports fatal errors through error_exit; we longjmp back into the
// calling frame, which holds no objects with non-trivial destructors.
struct JpegErrorManager {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
    unsigned char* owned = nullptr;  // freed on the error path
};

extern "C" void jpeg_error_exit(j_common_ptr cinfo)
{
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

extern "C" void jpeg_silent_output(j_common_ptr) {}

struct CompressResult {
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    bool ok = false;
    char message[JMSG_LENGTH_MAX] = {};
};

CompressResult compress_rgb(const unsigned char* pixels, int width, int height, int quality)
{
    CompressResult result;
    jpeg_compress_struct cinfo;
    JpegErrorManager jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    jerr.pub.output_message = jpeg_silent_output;
    if (setjmp(jerr.jump)) {
        std::memcpy(result.message, jerr.message, sizeof result.message);
        jpeg_destroy_compress(&cinfo);
        std::free(result.buffer);
        result.buffer = nullptr;
        return result;
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &result.buffer, &result.size);
    cinfo.image_width = static_cast<JDIMENSION>(width);
    cinfo.image_height = static_cast<JDIMENSION>(height);
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    cinfo.dct_method = JDCT_ISLOW;
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<unsigned char*>(pixels) + static_cast<std::size_t>(cinfo.next_scanline) * width * 3;
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    result.ok = true;
    return result;
}

struct DecompressResult {
    unsigned char* pixels = nullptr;  // malloc'd, width*height*components
    int width = 0;
    int height = 0;
    int components = 0;
    bool ok = false;
    char message[JMSG_LENGTH_MAX] = {};
};

DecompressResult decompress(const unsigned char* data, std::size_t size)
{
    DecompressResult result;
    jpeg_decompress_struct cinfo;
    JpegErrorManager jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    jerr.pub.output_message = jpeg_silent_output;
    if (setjmp(jerr.jump)) {
        std::memcpy(result.message, jerr.message, sizeof result.message);
        jpeg_destroy_decompress(&cinfo);
        std::free(jerr.owned);
        result.pixels = nullptr;
        return result;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, data, static_cast<unsigned long>(size));
    jpeg_read_header(&cinfo, TRUE);
    if (cinfo.jpeg_color_space != JCS_GRAYSCALE) cinfo.out_color_space = JCS_RGB;
    cinfo.dct_method = JDCT_ISLOW;
    jpeg_start_decompress(&cinfo);
    result.width = static_cast<int>(cinfo.output_width);
    result.height = static_cast<int>(cinfo.output_height);
    result.components = cinfo.output_components;
    const std::size_t stride = static_cast<std::size_t>(result.width) * result.components;
    result.pixels = static_cast<unsigned char*>(std::malloc(stride * result.height));
    jerr.owned = result.pixels;
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = result.pixels + static_cast<std::size_t>(cinfo.output_scanline) * stride;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    // Truncated streams are padded by libjpeg with a warning; treat that as an error.
    const bool truncated = jerr.pub.num_warnings > 0;
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    if (truncated) {
        std::snprintf(result.message, sizeof result.message, "corrupt or truncated JPEG data");
        std::free(result.pixels);
        result.pixels = nullptr;
        return result;
    }
    result.ok = true;
    return result;
}

}  // namespace

std::vector<std::uint8_t> encode_jpeg(const RgbImage& image, int quality)
{
    if (image.empty()) throw ValidationError("cannot encode an empty image");
    if (quality < 1 || quality > 100) throw ValidationError("JPEG quality must be in [1,100]");
    const std::size_t n = image.width() * image.height();
    std::vector<unsigned char> pixels(n * 3);
    for (std::size_t i = 0; i < n; ++i) {
        pixels[3 * i + 0] = to_byte(image.r.data()[i]);
        pixels[3 * i + 1] = to_byte(image.g.data()[i]);
        pixels[3 * i + 2] = to_byte(image.b.data()[i]);
    }
    CompressResult res = compress_rgb(pixels.data(), static_cast<int>(image.width()),
                                      static_cast<int>(image.height()), quality);
    if (!res.ok) throw IoError(std::string("JPEG encode: ") + res.message);
    std::vector<std::uint8_t> out(res.buffer, res.buffer + res.size);
    std::free(res.buffer);
    return out;
}

RgbImage decode_jpeg(const std::vector<std::uint8_t>& bytes, std::vector<std::string>* warnings)
{
    DecompressResult res = decompress(bytes.data(), bytes.size());
    if (!res.ok) throw IoError(std::string("JPEG decode: ") + res.message);
    if (res.components != 1 && res.components != 3) {
        std::free(res.pixels);
        throw FormatError("unsupported JPEG component count " + std::to_string(res.components));
    }
    const std::size_t width = static_cast<std::size_t>(res.width);
    const std::size_t height = static_cast<std::size_t>(res.height);
    RgbImage out(width, height);
    for (std::size_t i = 0; i < width * height; ++i) {
        if (res.components == 3) {
            out.r.data()[i] = res.pixels[3 * i + 0] / 255.0;
            out.g.data()[i] = res.pixels[3 * i + 1] / 255.0;
            out.b.data()[i] = res.pixels[3 * i + 2] / 255.0;
        } else {
            const double v = res.pixels[i] / 255.0;
            out.r.data()[i] = out.g.data()[i] = out.b.data()[i] = v;
        }
    }
    std::free(res.pixels);
    if (res.components == 1) {
        const std::string msg = "grayscale JPEG replicated into RGB";
        log::warn(msg);
        if (warnings) warnings->push_back(msg);
    }
    return out;
}

}  // namespace convtrace
