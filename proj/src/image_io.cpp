#include "afp/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <system_error>

namespace afp {
namespace {

constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read error on '" + path.string() + "'");
    }
    return bytes;
}

// libpng reports errors through longjmp; the message is captured here and
// rethrown as IoError once control is back in C++ frames.
struct PngErrorState {
    std::jmp_buf jump;
    char message[256] = {};
};

void png_error_handler(png_structp png, png_const_charp msg) {
    auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
    std::snprintf(state->message, sizeof(state->message), "%s", msg);
    std::longjmp(state->jump, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

struct MemoryReader {
    std::span<const std::uint8_t> bytes;
    std::size_t offset = 0;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t count) {
    auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
    if (reader->offset + count > reader->bytes.size()) {
        png_error(png, "truncated PNG stream");
    }
    std::memcpy(out, reader->bytes.data() + reader->offset, count);
    reader->offset += count;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t count) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + count);
}

void png_flush_noop(png_structp) {}

struct DecodedPng {
    int width = 0;
    int height = 0;
    int bit_depth = 0;
    std::vector<std::uint16_t> samples;
};

// Kept free of C++ objects with non-trivial destructors between setjmp and
// any longjmp so the jump cannot skip destructors.
bool decode_png_raw(std::span<const std::uint8_t> bytes, DecodedPng& out, PngErrorState& err,
                    std::string& failure) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler,
                                             png_warning_handler);
    if (png == nullptr) {
        failure = "png_create_read_struct failed";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        failure = "png_create_info_struct failed";
        return false;
    }
    MemoryReader reader{bytes, 0};
    std::vector<png_bytep>* rows = nullptr;
    std::vector<std::uint8_t>* buffer = nullptr;

    if (setjmp(err.jump)) {
        delete rows;
        delete buffer;
        png_destroy_read_struct(&png, &info, nullptr);
        failure = err.message;
        return false;
    }

    png_set_read_fn(png, &reader, png_read_from_memory);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);

    if (color_type != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        failure = "multi-channel or palette PNG is not supported (need single-channel grayscale)";
        return false;
    }
    if (width == 0 || height == 0) {
        png_destroy_read_struct(&png, &info, nullptr);
        failure = "zero-sized image";
        return false;
    }
    if (bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
        bit_depth = 8;
    }
    png_read_update_info(png, info);

    const std::size_t row_bytes = png_get_rowbytes(png, info);
    buffer = new std::vector<std::uint8_t>(row_bytes * height);
    rows = new std::vector<png_bytep>(height);
    for (png_uint_32 r = 0; r < height; ++r) {
        (*rows)[r] = buffer->data() + r * row_bytes;
    }
    png_read_image(png, rows->data());
    png_read_end(png, nullptr);

    out.width = static_cast<int>(width);
    out.height = static_cast<int>(height);
    out.bit_depth = bit_depth;
    out.samples.resize(static_cast<std::size_t>(width) * height);
    for (png_uint_32 r = 0; r < height; ++r) {
        const std::uint8_t* src = (*rows)[r];
        for (png_uint_32 c = 0; c < width; ++c) {
            out.samples[r * width + c] =
                bit_depth == 16 ? static_cast<std::uint16_t>((src[2 * c] << 8) | src[2 * c + 1])
                                : src[c];
        }
    }
    delete rows;
    delete buffer;
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
    DecodedPng decoded;
    PngErrorState err;
    std::string failure;
    if (!decode_png_raw(bytes, decoded, err, failure)) {
        throw IoError("PNG decode failed: " + failure);
    }
    return GrayImage{Raster<std::uint16_t>(decoded.width, decoded.height, std::move(decoded.samples)),
                     decoded.bit_depth == 16 ? 65535u : 255u};
}

bool encode_png_raw(int width, int height, int bit_depth, int color_type,
                    const std::vector<png_bytep>& rows, std::vector<std::uint8_t>& out,
                    PngErrorState& err, std::string& failure) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler,
                                              png_warning_handler);
    if (png == nullptr) {
        failure = "png_create_write_struct failed";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        failure = "png_create_info_struct failed";
        return false;
    }
    if (setjmp(err.jump)) {
        png_destroy_write_struct(&png, &info);
        failure = err.message;
        return false;
    }
    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

std::vector<std::uint8_t> encode_png(int width, int height, int bit_depth, int color_type,
                                     std::vector<std::uint8_t>& pixels, std::size_t row_bytes) {
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int r = 0; r < height; ++r) {
        rows[static_cast<std::size_t>(r)] = pixels.data() + static_cast<std::size_t>(r) * row_bytes;
    }
    std::vector<std::uint8_t> out;
    PngErrorState err;
    std::string failure;
    if (!encode_png_raw(width, height, bit_depth, color_type, rows, out, err, failure)) {
        throw IoError("PNG encode failed: " + failure);
    }
    return out;
}

// --- PGM -------------------------------------------------------------------

class PgmHeaderParser {
public:
    explicit PgmHeaderParser(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint32_t next_number() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw IoError("malformed PGM header");
        }
        std::uint64_t value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 0xffffffffu) throw IoError("PGM header value overflow");
            ++pos_;
        }
        return static_cast<std::uint32_t>(value);
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_offset() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw IoError("malformed PGM header");
        }
        return pos_ + 1;
    }

    void skip(std::size_t n) { pos_ += n; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
    PgmHeaderParser parser(bytes);
    parser.skip(2);
    const std::uint32_t width = parser.next_number();
    const std::uint32_t height = parser.next_number();
    const std::uint32_t maxval = parser.next_number();
    if (width == 0 || height == 0) throw IoError("zero-sized image");
    if (maxval == 0 || maxval > 65535) throw IoError("PGM maxval out of range");
    const std::size_t offset = parser.raster_offset();
    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    const std::size_t count = static_cast<std::size_t>(width) * height;
    if (bytes.size() < offset + count * bytes_per_sample) {
        throw IoError("truncated PGM raster");
    }
    std::vector<std::uint16_t> samples(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint8_t* p = bytes.data() + offset + i * bytes_per_sample;
        const std::uint16_t v =
            bytes_per_sample == 2 ? static_cast<std::uint16_t>((p[0] << 8) | p[1]) : p[0];
        if (v > maxval) throw IoError("PGM sample exceeds maxval");
        samples[i] = v;
    }
    return GrayImage{Raster<std::uint16_t>(static_cast<int>(width), static_cast<int>(height),
                                           std::move(samples)),
                     maxval};
}

}  // namespace

GrayImage decode_gray(std::span<const std::uint8_t> bytes) {
    if (bytes.size() >= 8 && std::equal(std::begin(kPngMagic), std::end(kPngMagic), bytes.begin())) {
        return decode_png(bytes);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P') {
        if (bytes[1] == '5') return decode_pgm(bytes);
        if (bytes[1] == '6' || bytes[1] == '3') {
            throw IoError("multi-channel PNM image is not supported");
        }
    }
    throw IoError("unrecognized image format (expected PNG or binary PGM)");
}

GrayImage read_gray(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    try {
        return decode_gray(bytes);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

DepthMap load_depth_map(const std::filesystem::path& path) {
    const GrayImage img = read_gray(path);
    const double scale = static_cast<double>(img.max_value);
    std::vector<double> values(img.samples.size());
    const auto src = img.samples.values();
    std::transform(src.begin(), src.end(), values.begin(),
                   [scale](std::uint16_t v) { return static_cast<double>(v) / scale; });
    return DepthMap(img.samples.width(), img.samples.height(), std::move(values));
}

DefectMask load_label_mask(const std::filesystem::path& path) {
    const GrayImage img = read_gray(path);
    DefectMask mask(img.samples.width(), img.samples.height());
    const auto src = img.samples.values();
    auto dst = mask.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] > 2) {
            throw IoError(path.string() + ": label code " + std::to_string(src[i]) +
                          " outside {0,1,2}");
        }
        dst[i] = static_cast<DefectClass>(src[i]);
    }
    return mask;
}

std::vector<std::uint8_t> encode_gray_png(const Raster<std::uint16_t>& samples, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw std::invalid_argument("PNG bit depth must be 8 or 16");
    }
    const int w = samples.width();
    const int h = samples.height();
    const std::size_t bps = bit_depth == 16 ? 2 : 1;
    const std::size_t row_bytes = static_cast<std::size_t>(w) * bps;
    std::vector<std::uint8_t> pixels(row_bytes * static_cast<std::size_t>(h));
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::uint16_t v = samples.at(c, r);
            std::uint8_t* p = pixels.data() + static_cast<std::size_t>(r) * row_bytes + c * bps;
            if (bps == 2) {
                p[0] = static_cast<std::uint8_t>(v >> 8);
                p[1] = static_cast<std::uint8_t>(v & 0xff);
            } else {
                if (v > 255) throw std::invalid_argument("sample exceeds 8-bit range");
                p[0] = static_cast<std::uint8_t>(v);
            }
        }
    }
    return encode_png(w, h, bit_depth, PNG_COLOR_TYPE_GRAY, pixels, row_bytes);
}

std::vector<std::uint8_t> encode_rgb_png(const RgbImage& image) {
    const int w = image.width();
    const int h = image.height();
    const std::size_t row_bytes = static_cast<std::size_t>(w) * 3;
    std::vector<std::uint8_t> pixels(row_bytes * static_cast<std::size_t>(h));
    std::size_t i = 0;
    for (const Rgb& px : image.values()) {
        pixels[i++] = px.r;
        pixels[i++] = px.g;
        pixels[i++] = px.b;
    }
    return encode_png(w, h, 8, PNG_COLOR_TYPE_RGB, pixels, row_bytes);
}

std::vector<std::uint8_t> encode_pgm(const Raster<std::uint16_t>& samples, std::uint32_t max_value) {
    if (max_value == 0 || max_value > 65535) {
        throw std::invalid_argument("PGM maxval must be in [1, 65535]");
    }
    const std::string header = "P5\n" + std::to_string(samples.width()) + " " +
                               std::to_string(samples.height()) + "\n" +
                               std::to_string(max_value) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    for (std::uint16_t v : samples.values()) {
        if (v > max_value) throw std::invalid_argument("sample exceeds PGM maxval");
        if (max_value > 255) out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw IoError("write error on '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename onto '" + path.string() + "'");
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, std::span<const std::uint8_t>(
                                reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Raster<std::uint16_t> quantize(const DepthMap& image, std::uint32_t max_value) {
    Raster<std::uint16_t> out(image.width(), image.height());
    const auto src = image.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<std::uint16_t>(std::lround(src[i] * max_value));
    }
    return out;
}

void save_mask_png(const DefectMask& mask, const std::filesystem::path& path) {
    Raster<std::uint16_t> codes(mask.width(), mask.height());
    const auto src = mask.values();
    auto dst = codes.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<std::uint16_t>(src[i]);
    }
    write_file_atomic(path, encode_gray_png(codes, 8));
}

RgbImage to_rgb(const DepthMap& image) {
    RgbImage out(image.width(), image.height());
    const auto src = image.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const auto g = static_cast<std::uint8_t>(std::lround(src[i] * 255.0));
        dst[i] = Rgb{g, g, g};
    }
    return out;
}

RgbImage render_overlay(const DepthMap& base, const DefectMask& mask) {
    require_same_shape(base.raster(), mask, "overlay");
    RgbImage out = to_rgb(base);
    const auto classes = mask.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const std::uint8_t half = static_cast<std::uint8_t>(dst[i].r / 2);
        if (classes[i] == DefectClass::gap) {
            dst[i] = Rgb{static_cast<std::uint8_t>(half + 128), half, half};
        } else if (classes[i] == DefectClass::overlap) {
            dst[i] = Rgb{half, static_cast<std::uint8_t>(half + 128), half};
        }
    }
    return out;
}

void save_overlay_png(const DepthMap& base, const DefectMask& mask,
                      const std::filesystem::path& path) {
    save_rgb_png(render_overlay(base, mask), path);
}

void save_rgb_png(const RgbImage& image, const std::filesystem::path& path) {
    write_file_atomic(path, encode_rgb_png(image));
}

void save_binary_png(const BinaryMask& mask, const std::filesystem::path& path) {
    Raster<std::uint16_t> gray(mask.width(), mask.height());
    const auto src = mask.values();
    auto dst = gray.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = src[i] ? 255 : 0;
    }
    write_file_atomic(path, encode_gray_png(gray, 8));
}

void save_depth_png(const DepthMap& image, const std::filesystem::path& path, int bit_depth) {
    const std::uint32_t max_value = bit_depth == 16 ? 65535u : 255u;
    write_file_atomic(path, encode_gray_png(quantize(image, max_value), bit_depth));
}

void save_depth_pgm(const DepthMap& image, const std::filesystem::path& path,
                    std::uint32_t max_value) {
    write_file_atomic(path, encode_pgm(quantize(image, max_value), max_value));
}

}  // namespace afp
