#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "convtrace/image.hpp"

namespace convtrace {

/// Decodes an 8-bit PNG or JPEG (detected by magic bytes) and scales every
/// channel value c to c/255. Grayscale inputs are replicated into r, g and b;
/// a message is appended to `warnings` (when given) and logged.
///
/// Throws IoError for unreadable/truncated files and FormatError for bit
/// depths other than 8 or unknown containers.
RgbImage load_image(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Writes an 8-bit RGB PNG. Output bytes are a pure function of the pixels.
void save_png(const RgbImage& image, const std::filesystem::path& path);

/// In-memory PNG codec, used by save_png/load_image and by tests.
std::vector<std::uint8_t> encode_png(const RgbImage& image);
RgbImage decode_png(const std::vector<std::uint8_t>& bytes, std::vector<std::string>* warnings = nullptr);

/// In-memory baseline JPEG codec (libjpeg): standard tables scaled by the
/// usual quality mapping, 4:2:0 chroma subsampling.
std::vector<std::uint8_t> encode_jpeg(const RgbImage& image, int quality);
RgbImage decode_jpeg(const std::vector<std::uint8_t>& bytes, std::vector<std::string>* warnings = nullptr);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace convtrace
