#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "afp/raster.hpp"

namespace afp {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

using RgbImage = Raster<Rgb>;

/// Single-channel image as stored on disk, before normalization.
struct GrayImage {
    Raster<std::uint16_t> samples;
    std::uint32_t max_value = 255;  // 255 for 8-bit, 65535 for 16-bit, PGM maxval otherwise
};

/// Decodes a grayscale PNG or binary PGM (P5), detected by magic bytes.
GrayImage decode_gray(std::span<const std::uint8_t> bytes);
GrayImage read_gray(const std::filesystem::path& path);

/// Loads a scan and normalizes every sample by the format's maximum value.
DepthMap load_depth_map(const std::filesystem::path& path);

/// Loads a label PNG holding raw class codes {0,1,2}.
DefectMask load_label_mask(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_gray_png(const Raster<std::uint16_t>& samples, int bit_depth);
std::vector<std::uint8_t> encode_rgb_png(const RgbImage& image);
std::vector<std::uint8_t> encode_pgm(const Raster<std::uint16_t>& samples, std::uint32_t max_value);

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

void save_mask_png(const DefectMask& mask, const std::filesystem::path& path);
void save_overlay_png(const DepthMap& base, const DefectMask& mask, const std::filesystem::path& path);
void save_rgb_png(const RgbImage& image, const std::filesystem::path& path);
void save_binary_png(const BinaryMask& mask, const std::filesystem::path& path);

/// Quantizes to 8 or 16 bits (round to nearest).
void save_depth_png(const DepthMap& image, const std::filesystem::path& path, int bit_depth = 16);
void save_depth_pgm(const DepthMap& image, const std::filesystem::path& path,
                    std::uint32_t max_value = 65535);

Raster<std::uint16_t> quantize(const DepthMap& image, std::uint32_t max_value);

/// Base rendered as gray, gap pixels blended toward red and overlap pixels toward green.
RgbImage render_overlay(const DepthMap& base, const DefectMask& mask);
RgbImage to_rgb(const DepthMap& image);

}  // namespace afp
