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

#include "hesim/io/hevt.hpp"

#include <cstring>
#include <fstream>
#include <string>

#include "hesim/errors.hpp"
#include "hesim/io/hraw.hpp"

namespace hesim::io {

namespace {

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

}  // namespace

std::vector<std::uint8_t> encode_hevt(const EventStream& stream) {
    validate_stream(stream.events, stream.width, stream.height);
    std::vector<std::uint8_t> out{'H', 'E', 'V', 'T'};
    out.reserve(kHevtHeaderSize + stream.events.size() * kHevtRecordSize);
    put<std::uint16_t>(out, kHevtVersion);
    put<std::uint16_t>(out, 0);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(stream.width));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(stream.height));
    put<std::uint64_t>(out, stream.events.size());
    for (const auto& e : stream.events) {
        put<std::uint64_t>(out, e.t);
        put<std::uint16_t>(out, e.x);
        put<std::uint16_t>(out, e.y);
        out.push_back(e.polarity > 0 ? 1 : 0);
        out.push_back(0);
    }
    return out;
}

EventStream decode_hevt(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHevtHeaderSize) throw FormatError("HEVT: truncated header");
    if (std::memcmp(bytes.data(), "HEVT", 4) != 0) throw FormatError("HEVT: bad magic");
    const auto version = get<std::uint16_t>(bytes, 4);
    if (version > kHevtVersion) throw VersionError("HEVT: unsupported version " + std::to_string(version));
    EventStream stream;
    stream.width = get<std::uint32_t>(bytes, 8);
    stream.height = get<std::uint32_t>(bytes, 12);
    const auto count = get<std::uint64_t>(bytes, 16);
    if ((bytes.size() - kHevtHeaderSize) % kHevtRecordSize != 0 ||
        (bytes.size() - kHevtHeaderSize) / kHevtRecordSize != count) {
        throw FormatError("HEVT: header announces " + std::to_string(count) + " events, payload holds " +
                          std::to_string((bytes.size() - kHevtHeaderSize) / kHevtRecordSize));
    }
    stream.events.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t off = kHevtHeaderSize + i * kHevtRecordSize;
        auto& e = stream.events[i];
        e.t = get<std::uint64_t>(bytes, off);
        e.x = get<std::uint16_t>(bytes, off + 8);
        e.y = get<std::uint16_t>(bytes, off + 10);
        const std::uint8_t pol = bytes[off + 12];
        if (pol > 1) throw FormatError("HEVT: invalid polarity byte in record " + std::to_string(i));
        e.polarity = pol == 1 ? 1 : -1;
    }
    validate_stream(stream.events, stream.width, stream.height);
    return stream;
}

void write_hevt(const std::filesystem::path& path, const EventStream& stream) {
    write_file(path, encode_hevt(stream));
}

EventStream read_hevt(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_hevt(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_events_csv(const std::filesystem::path& path, std::span<const EventRecord> events) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out << "t_us,x,y,polarity\n";
    for (const auto& e : events) {
        out << e.t << ',' << e.x << ',' << e.y << ',' << (e.polarity > 0 ? 1 : 0) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace hesim::io
