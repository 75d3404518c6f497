#include "capforge/features.hpp"

#include <cstring>
#include <fstream>
#include <random>

namespace capforge {
namespace {

constexpr char kMagic[4] = {'C', 'A', 'P', 'F'};
constexpr uint16_t kVersion = 1;

void put_u16(std::ostream& out, uint16_t v) {
    const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                                static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

bool get_u16(std::istream& in, uint16_t& v) {
    unsigned char b[2];
    if (!in.read(reinterpret_cast<char*>(b), 2)) return false;
    v = static_cast<uint16_t>(b[0] | (b[1] << 8));
    return true;
}

void put_f32(std::ostream& out, float v) {
    static_assert(sizeof(float) == 4);
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    const unsigned char b[4] = {
        static_cast<unsigned char>(bits & 0xff), static_cast<unsigned char>((bits >> 8) & 0xff),
        static_cast<unsigned char>((bits >> 16) & 0xff),
        static_cast<unsigned char>((bits >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

bool get_f32(std::istream& in, float& v) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
    uint32_t bits = static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
                    (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    std::memcpy(&v, &bits, 4);
    return true;
}

} // namespace

void write_features(const std::vector<FeatureGrid>& grids, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FeatureFormatError("cannot open feature file for writing: " + path);
    out.write(kMagic, 4);
    put_u16(out, kVersion);
    for (const auto& g : grids) {
        if (g.filename.size() > 0xffff) {
            throw FeatureFormatError("filename too long: " + g.filename);
        }
        put_u16(out, static_cast<uint16_t>(g.filename.size()));
        out.write(g.filename.data(), static_cast<std::streamsize>(g.filename.size()));
        put_u16(out, static_cast<uint16_t>(g.locations()));
        put_u16(out, static_cast<uint16_t>(g.channels()));
        for (int i = 0; i < g.locations(); ++i) {
            for (int j = 0; j < g.channels(); ++j) {
                put_f32(out, static_cast<float>(g.values(i, j)));
            }
        }
    }
    if (!out) throw FeatureFormatError("write failed: " + path);
}

std::vector<FeatureGrid> load_features(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FeatureFormatError("cannot open feature file: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw FeatureFormatError("bad magic bytes in " + path);
    }
    uint16_t version;
    if (!get_u16(in, version) || version != kVersion) {
        throw FeatureFormatError("unsupported feature file version in " + path);
    }

    std::vector<FeatureGrid> grids;
    uint16_t name_len;
    while (get_u16(in, name_len)) {
        FeatureGrid g;
        g.filename.resize(name_len);
        if (!in.read(g.filename.data(), name_len)) {
            throw FeatureFormatError("truncated record header in " + path);
        }
        uint16_t rows, cols;
        if (!get_u16(in, rows) || !get_u16(in, cols) || rows == 0 || cols == 0) {
            throw FeatureFormatError("shape mismatch in record '" + g.filename + "' of " + path);
        }
        g.values.resize(rows, cols);
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                float v;
                if (!get_f32(in, v)) {
                    throw FeatureFormatError("shape mismatch: truncated values in record '" +
                                             g.filename + "' of " + path);
                }
                g.values(i, j) = v;
            }
        }
        grids.push_back(std::move(g));
    }
    return grids;
}

FeatureGrid synthetic_grid(const std::string& filename, int locations, int channels,
                           uint64_t seed) {
    uint64_t h = seed ^ 1469598103934665603ULL;
    for (unsigned char c : filename) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::mt19937_64 rng(h);
    std::normal_distribution<double> dist(0.0, 1.0);
    FeatureGrid g;
    g.filename = filename;
    g.values.resize(locations, channels);
    for (int i = 0; i < locations; ++i) {
        for (int j = 0; j < channels; ++j) {
            // float32 round-trip keeps synthetic grids identical through the file format
            g.values(i, j) = static_cast<float>(dist(rng));
        }
    }
    return g;
}

} // namespace capforge
