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

#include "hesim/io/hraw.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "hesim/errors.hpp"

namespace hesim::io {

namespace {

constexpr std::uint16_t kFormatU16 = 0;
constexpr std::uint16_t kFormatF64 = 1;

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xff));
}

template <typename T>
T get(std::span<const std::uint8_t> in, std::size_t offset) {
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(static_cast<T>(in[offset + i]) << (8 * i));
    return value;
}

struct Header {
    std::uint16_t bit_depth = 0;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint64_t exposure_us = 0;
    std::uint16_t format = 0;
};

std::vector<std::uint8_t> encode_header(const Header& h) {
    std::vector<std::uint8_t> out{'H', 'R', 'A', 'W'};
    put<std::uint16_t>(out, kHrawVersion);
    put<std::uint16_t>(out, h.bit_depth);
    put<std::uint32_t>(out, h.width);
    put<std::uint32_t>(out, h.height);
    put<std::uint64_t>(out, h.exposure_us);
    put<std::uint16_t>(out, h.format);
    out.resize(kHrawHeaderSize, 0);
    return out;
}

Header decode_header(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHrawHeaderSize) throw FormatError("HRAW: truncated header");
    if (std::memcmp(bytes.data(), "HRAW", 4) != 0) throw FormatError("HRAW: bad magic");
    const auto version = get<std::uint16_t>(bytes, 4);
    if (version > kHrawVersion) {
        throw VersionError("HRAW: unsupported version " + std::to_string(version));
    }
    Header h;
    h.bit_depth = get<std::uint16_t>(bytes, 6);
    h.width = get<std::uint32_t>(bytes, 8);
    h.height = get<std::uint32_t>(bytes, 12);
    h.exposure_us = get<std::uint64_t>(bytes, 16);
    h.format = get<std::uint16_t>(bytes, 24);
    if (h.format != kFormatU16 && h.format != kFormatF64) {
        throw FormatError("HRAW: unknown sample format " + std::to_string(h.format));
    }
    const std::size_t sample = h.format == kFormatU16 ? 2 : 8;
    const std::size_t expected = kHrawHeaderSize + static_cast<std::size_t>(h.width) * h.height * sample;
    if (bytes.size() != expected) {
        throw FormatError("HRAW: payload is " + std::to_string(bytes.size() - kHrawHeaderSize) + " bytes, expected " +
                          std::to_string(expected - kHrawHeaderSize));
    }
    return h;
}

}  // namespace

std::vector<std::uint8_t> encode_hraw(const RawFrame& frame) {
    frame.validate();
    auto out = encode_header({frame.bit_depth, static_cast<std::uint32_t>(frame.width),
                              static_cast<std::uint32_t>(frame.height), frame.exposure_us, kFormatU16});
    out.reserve(out.size() + frame.data.size() * 2);
    for (std::uint16_t v : frame.data) put<std::uint16_t>(out, v);
    return out;
}

RawFrame decode_hraw(std::span<const std::uint8_t> bytes) {
    const Header h = decode_header(bytes);
    if (h.format != kFormatU16) throw FormatError("HRAW: expected 16-bit samples, found a real-valued plane");
    RawFrame frame;
    frame.width = h.width;
    frame.height = h.height;
    frame.bit_depth = h.bit_depth;
    frame.exposure_us = h.exposure_us;
    frame.data.resize(frame.width * frame.height);
    for (std::size_t i = 0; i < frame.data.size(); ++i) {
        frame.data[i] = get<std::uint16_t>(bytes, kHrawHeaderSize + 2 * i);
    }
    try {
        frame.validate();
    } catch (const Error& e) {
        throw FormatError(std::string("HRAW: ") + e.what());
    }
    return frame;
}

std::vector<std::uint8_t> encode_hraw_plane(const ImagePlane& plane) {
    auto out = encode_header({0, static_cast<std::uint32_t>(plane.width()), static_cast<std::uint32_t>(plane.height()),
                              0, kFormatF64});
    out.reserve(out.size() + plane.size() * 8);
    for (double v : plane.data()) put<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    return out;
}

ImagePlane decode_hraw_plane(std::span<const std::uint8_t> bytes) {
    const Header h = decode_header(bytes);
    ImagePlane plane(h.width, h.height);
    for (std::size_t i = 0; i < plane.size(); ++i) {
        plane[i] = h.format == kFormatF64
                       ? std::bit_cast<double>(get<std::uint64_t>(bytes, kHrawHeaderSize + 8 * i))
                       : static_cast<double>(get<std::uint16_t>(bytes, kHrawHeaderSize + 2 * i));
    }
    return plane;
}

void write_hraw(const std::filesystem::path& path, const RawFrame& frame) { write_file(path, encode_hraw(frame)); }

RawFrame read_hraw(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_hraw(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_hraw_plane(const std::filesystem::path& path, const ImagePlane& plane) {
    write_file(path, encode_hraw_plane(plane));
}

ImagePlane read_hraw_plane(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_hraw_plane(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingFileError(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace hesim::io
