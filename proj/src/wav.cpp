#include "eardyn/wav.hpp"
#include "eardyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace eardyn {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& b, std::uint32_t v) {
    b.push_back(static_cast<unsigned char>(v & 0xff));
    b.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    b.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    b.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void put_u16(std::vector<unsigned char>& b, std::uint16_t v) {
    b.push_back(static_cast<unsigned char>(v & 0xff));
    b.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

void put_tag(std::vector<unsigned char>& b, const char* tag) {
    b.insert(b.end(), tag, tag + 4);
}

} // namespace

Recording read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("wav: cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw DataError("wav: not a RIFF/WAVE file: " + path.string());

    Recording rec;
    rec.role = ChannelRole::Mixed;
    bool have_fmt = false, have_data = false;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t chunk_size = read_u32(bytes.data() + pos + 4);
        const unsigned char* body = bytes.data() + pos + 8;
        if (pos + 8 + chunk_size > bytes.size())
            throw DataError("wav: truncated chunk in " + path.string());
        if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw DataError("wav: short fmt chunk");
            const std::uint16_t format = read_u16(body);
            const std::uint16_t channels = read_u16(body + 2);
            const std::uint32_t rate = read_u32(body + 4);
            const std::uint16_t bits = read_u16(body + 14);
            if (format != 1 || channels != 1 || bits != 16)
                throw DataError("wav: expected mono PCM16 in " + path.string());
            rec.sample_rate_hz = static_cast<double>(rate);
            have_fmt = true;
        } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
            const std::size_t n = chunk_size / 2;
            rec.samples.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const std::int16_t v =
                    static_cast<std::int16_t>(read_u16(body + 2 * i));
                rec.samples[i] = v / 32768.0;
            }
            have_data = true;
        }
        pos += 8 + chunk_size + (chunk_size & 1);
    }
    if (!have_fmt || !have_data)
        throw DataError("wav: missing fmt or data chunk in " + path.string());
    return rec;
}

void write_wav(const std::filesystem::path& path, const Recording& rec) {
    if (!(rec.sample_rate_hz > 0.0)) throw ConfigError("wav: sample rate must be > 0");
    const std::uint32_t n = static_cast<std::uint32_t>(rec.samples.size());
    const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(rec.sample_rate_hz));

    std::vector<unsigned char> b;
    b.reserve(44 + 2 * n);
    put_tag(b, "RIFF");
    put_u32(b, 36 + 2 * n);
    put_tag(b, "WAVE");
    put_tag(b, "fmt ");
    put_u32(b, 16);
    put_u16(b, 1); // PCM
    put_u16(b, 1); // mono
    put_u32(b, rate);
    put_u32(b, rate * 2); // byte rate
    put_u16(b, 2);        // block align
    put_u16(b, 16);       // bits
    put_tag(b, "data");
    put_u32(b, 2 * n);
    for (double s : rec.samples) {
        long v = std::lround(s * 32768.0);
        v = std::clamp(v, -32768L, 32767L);
        put_u16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("wav: cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
    if (!out) throw DataError("wav: write failed for " + path.string());
}

} // namespace eardyn
