// Copyright 2026 The HESIM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hesim/io/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <png.h>

#include "hesim/errors.hpp"
#include "hesim/io/hraw.hpp"

namespace hesim::io {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) throw IoError("cannot open " + path.string());
    return f;
}

RgbImage read_png(const std::filesystem::path& path) {
    FilePtr file = open_file(path, "rb");
    png_byte signature[8];
    if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
        throw FormatError(path.string() + ": not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialization failed");
    }
    RgbImage image;
    std::vector<png_byte> buffer;
    std::vector<png_bytep> rows;
    int bit_depth = 8;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string() + ": corrupt PNG data");
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    bit_depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
    if (bit_depth == 16) png_set_swap(png);
    png_read_update_info(png, info);
    bit_depth = png_get_bit_depth(png, info);
    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    buffer.resize(stride * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = buffer.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    image = RgbImage(w, h);
    const bool wide = bit_depth == 16;
    const double scale = wide ? 65535.0 : 255.0;
    for (png_uint_32 y = 0; y < h; ++y) {
        for (png_uint_32 x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                const std::size_t i = static_cast<std::size_t>(x) * 3 + c;
                const double v = wide ? static_cast<double>(rows[y][2 * i] | (rows[y][2 * i + 1] << 8))
                                      : static_cast<double>(rows[y][i]);
                image.at(x, y)[c] = v / scale;
            }
        }
    }
    return image;
}

void write_png(const std::filesystem::path& path, const RgbImage& image, int bit_depth) {
    FilePtr file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialization failed");
    }
    const std::size_t bytes = bit_depth == 16 ? 2 : 1;
    const double scale = bit_depth == 16 ? 65535.0 : 255.0;
    std::vector<png_byte> buffer(image.width * image.height * 3 * bytes);
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            const auto v = static_cast<unsigned>(std::lround(std::clamp(image.pixels[i][c], 0.0, 1.0) * scale));
            const std::size_t o = (i * 3 + c) * bytes;
            if (bytes == 2) {
                buffer[o] = static_cast<png_byte>(v >> 8);  // PNG samples are big-endian.
                buffer[o + 1] = static_cast<png_byte>(v & 0xff);
            } else {
                buffer[o] = static_cast<png_byte>(v);
            }
        }
    }
    std::vector<png_bytep> rows(image.height);
    for (std::size_t y = 0; y < image.height; ++y) rows[y] = buffer.data() + y * image.width * 3 * bytes;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed: " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), bit_depth,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

/// Next whitespace-delimited PPM header token, skipping '#' comments.
std::size_t next_token(const std::vector<std::uint8_t>& bytes, std::size_t& pos, const std::filesystem::path& path) {
    while (pos < bytes.size()) {
        if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(bytes[pos])) {
            ++pos;
        } else {
            break;
        }
    }
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
        value = value * 10 + (bytes[pos] - '0');
        ++pos;
        if (++digits > 9) throw FormatError(path.string() + ": PPM header value too large");
    }
    if (digits == 0) throw FormatError(path.string() + ": malformed PPM header");
    return value;
}

RgbImage read_ppm(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
        throw FormatError(path.string() + ": only binary PPM (P6) is supported");
    }
    std::size_t pos = 2;
    const std::size_t w = next_token(bytes, pos, path);
    const std::size_t h = next_token(bytes, pos, path);
    const std::size_t maxval = next_token(bytes, pos, path);
    if (maxval == 0 || maxval > 65535) throw FormatError(path.string() + ": PPM maxval out of range");
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw FormatError(path.string() + ": malformed PPM header");
    ++pos;
    const std::size_t sample = maxval > 255 ? 2 : 1;
    if (bytes.size() - pos < w * h * 3 * sample) throw FormatError(path.string() + ": truncated PPM payload");
    RgbImage image(w, h);
    const auto scale = static_cast<double>(maxval);
    for (std::size_t i = 0; i < w * h; ++i) {
        for (int c = 0; c < 3; ++c) {
            const std::size_t o = pos + (i * 3 + c) * sample;
            const unsigned v = sample == 2 ? (bytes[o] << 8) | bytes[o + 1] : bytes[o];
            image.pixels[i][c] = static_cast<double>(v) / scale;
        }
    }
    return image;
}

void write_ppm(const std::filesystem::path& path, const RgbImage& image, int bit_depth) {
    const unsigned maxval = bit_depth == 16 ? 65535 : 255;
    const std::string header =
        "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n" + std::to_string(maxval) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + image.pixels.size() * 3 * (bit_depth == 16 ? 2 : 1));
    for (const auto& px : image.pixels) {
        for (int c = 0; c < 3; ++c) {
            const auto v = static_cast<unsigned>(std::lround(std::clamp(px[c], 0.0, 1.0) * maxval));
            if (bit_depth == 16) out.push_back(static_cast<std::uint8_t>(v >> 8));
            out.push_back(static_cast<std::uint8_t>(v & 0xff));
        }
    }
    write_file(path, out);
}

}  // namespace

RgbImage read_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingFileError(path);
    const std::string ext = lower_extension(path);
    if (ext == ".png") return read_png(path);
    if (ext == ".ppm") return read_ppm(path);
    throw FormatError(path.string() + ": unsupported image type (expected .png or .ppm)");
}

void write_image(const std::filesystem::path& path, const RgbImage& image, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) throw ParameterError("write_image: bit depth must be 8 or 16");
    if (image.pixels.size() != image.width * image.height) throw LayoutError("write_image: inconsistent image");
    const std::string ext = lower_extension(path);
    if (ext == ".png") return write_png(path, image, bit_depth);
    if (ext == ".ppm") return write_ppm(path, image, bit_depth);
    throw FormatError(path.string() + ": unsupported image type (expected .png or .ppm)");
}

}  // namespace hesim::io
