#pragma once

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "phasemotion/errors.hpp"
#include "phasemotion/image.hpp"

namespace phasemotion {

namespace detail {

inline std::vector<uint8_t> quantize8(const GrayImage& img) {
    std::vector<uint8_t> bytes(img.size());
    for (size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(img.data[i], 0.0, 1.0);
        bytes[i] = static_cast<uint8_t>(std::lround(v * 255.0));
    }
    return bytes;
}

inline std::vector<uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) throw io_error("read failure: " + path);
    return bytes;
}

inline void write_file_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out.good()) throw io_error("write failure: " + path);
}

inline void put_u32be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline uint32_t get_u32be(const uint8_t* p) {
    return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

inline uint8_t paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return static_cast<uint8_t>(a);
    if (pb <= pc) return static_cast<uint8_t>(b);
    return static_cast<uint8_t>(c);
}

}  // namespace detail

// ---- PGM (binary P5, maxval 255) ----

inline void write_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    const auto bytes = detail::quantize8(img);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out.good()) throw io_error("write failure: " + path);
}

inline GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path);
    auto next_token = [&]() -> std::string {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {
                while ((c = in.get()) != EOF && c != '\n') {}
            } else if (!std::isspace(c)) {
                tok.push_back(static_cast<char>(c));
                while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') tok.push_back(static_cast<char>(in.get()));
                return tok;
            }
        }
        throw io_error("truncated PGM header: " + path);
    };
    if (next_token() != "P5") throw io_error("not a binary PGM (P5): " + path);
    const int w = std::stoi(next_token());
    const int h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (w < 1 || h < 1) throw io_error("bad PGM dimensions: " + path);
    if (maxval != 255) throw io_error("unsupported PGM maxval (want 255): " + path);
    in.get();  // single whitespace after maxval
    std::vector<uint8_t> bytes(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw io_error("truncated PGM data: " + path);
    GrayImage img(w, h);
    for (size_t i = 0; i < bytes.size(); ++i) img.data[i] = bytes[i] / 255.0;
    return img;
}

// ---- PNG, 8-bit grayscale only ----

inline void write_png(const GrayImage& img, const std::string& path) {
    const auto pixels = detail::quantize8(img);
    const size_t stride = static_cast<size_t>(img.width) + 1;
    std::vector<uint8_t> raw(stride * img.height);
    for (int y = 0; y < img.height; ++y) {
        raw[y * stride] = 0;  // filter: None
        std::memcpy(&raw[y * stride + 1], &pixels[static_cast<size_t>(y) * img.width],
                    static_cast<size_t>(img.width));
    }
    uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
    std::vector<uint8_t> comp(comp_len);
    if (compress2(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw io_error("PNG compression failed: " + path);
    comp.resize(comp_len);

    std::vector<uint8_t> out = {137, 80, 78, 71, 13, 10, 26, 10};
    auto chunk = [&out](const char type[4], const std::vector<uint8_t>& data) {
        detail::put_u32be(out, static_cast<uint32_t>(data.size()));
        std::vector<uint8_t> body(type, type + 4);
        body.insert(body.end(), data.begin(), data.end());
        out.insert(out.end(), body.begin(), body.end());
        detail::put_u32be(out, static_cast<uint32_t>(crc32(0, body.data(), static_cast<uInt>(body.size()))));
    };
    std::vector<uint8_t> ihdr;
    detail::put_u32be(ihdr, static_cast<uint32_t>(img.width));
    detail::put_u32be(ihdr, static_cast<uint32_t>(img.height));
    ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // depth 8, grayscale, deflate, adaptive, no interlace
    chunk("IHDR", ihdr);
    chunk("IDAT", comp);
    chunk("IEND", {});
    detail::write_file_bytes(path, out);
}

inline GrayImage read_png(const std::string& path) {
    const auto bytes = detail::read_file_bytes(path);
    static const uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    if (bytes.size() < 8 || std::memcmp(bytes.data(), sig, 8) != 0)
        throw io_error("not a PNG file: " + path);

    int w = 0, h = 0;
    bool have_ihdr = false;
    std::vector<uint8_t> idat;
    size_t pos = 8;
    while (pos + 8 <= bytes.size()) {
        const uint32_t len = detail::get_u32be(&bytes[pos]);
        if (pos + 12 + len > bytes.size()) throw io_error("truncated PNG chunk: " + path);
        const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
        const uint8_t* data = &bytes[pos + 8];
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw io_error("bad IHDR: " + path);
            w = static_cast<int>(detail::get_u32be(data));
            h = static_cast<int>(detail::get_u32be(data + 4));
            const int depth = data[8], color = data[9], interlace = data[12];
            if (depth != 8 || color != 0 || interlace != 0)
                throw io_error("unsupported PNG (need 8-bit grayscale, no interlace): " + path);
            have_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), data, data + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + len;  // ancillary chunks are skipped
    }
    if (!have_ihdr || w < 1 || h < 1) throw io_error("missing or bad IHDR: " + path);
    if (idat.empty()) throw io_error("PNG has no image data: " + path);

    const size_t stride = static_cast<size_t>(w) + 1;
    std::vector<uint8_t> raw(stride * h);
    uLongf raw_len = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
        raw_len != raw.size())
        throw io_error("PNG inflate failed: " + path);

    GrayImage img(w, h);
    std::vector<uint8_t> prev(static_cast<size_t>(w), 0);
    std::vector<uint8_t> cur(static_cast<size_t>(w), 0);
    for (int y = 0; y < h; ++y) {
        const uint8_t filter = raw[y * stride];
        const uint8_t* line = &raw[y * stride + 1];
        for (int x = 0; x < w; ++x) {
            const int a = x > 0 ? cur[x - 1] : 0;
            const int b = prev[x];
            const int c = x > 0 ? prev[x - 1] : 0;
            int v = line[x];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += detail::paeth(a, b, c); break;
                default: throw io_error("bad PNG filter type: " + path);
            }
            cur[x] = static_cast<uint8_t>(v & 0xff);
            img.at(x, y) = cur[x] / 255.0;
        }
        std::swap(prev, cur);
    }
    return img;
}

// ---- format dispatch and sequences ----

inline std::string lower_ext(const std::filesystem::path& p) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e;
}

inline GrayImage read_image(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".pgm") return read_pgm(path);
    if (ext == ".png") return read_png(path);
    throw io_error("unsupported image extension (want .pgm or .png): " + path);
}

inline void write_image(const GrayImage& img, const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".pgm") return write_pgm(img, path);
    if (ext == ".png") return write_png(img, path);
    throw io_error("unsupported image extension (want .pgm or .png): " + path);
}

// Writes a signed field (e.g. a phase difference) as an 8-bit image with 0
// mapped to mid-gray 128 and the mapping recorded in "<path>.txt".
inline void write_signed_image(const GrayImage& field, const std::string& path) {
    double peak = 0.0;
    for (double v : field.data) peak = std::max(peak, std::abs(v));
    const double scale = peak > 0.0 ? 127.0 / peak : 0.0;
    GrayImage mapped(field.width, field.height);
    for (size_t i = 0; i < field.size(); ++i)
        mapped.data[i] = std::clamp(128.0 + field.data[i] * scale, 0.0, 255.0) / 255.0;
    write_image(mapped, path);

    double lo = field.data.empty() ? 0.0 : field.data[0];
    double hi = lo;
    for (double v : field.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::ofstream side(path + ".txt", std::ios::trunc);
    if (!side) throw io_error("cannot open for writing: " + path + ".txt");
    side << "mapping pixel = round(128 + value * scale)\n"
         << "zero_pixel 128\nscale " << scale << "\nmin " << lo << "\nmax " << hi << "\n";
    if (!side.good()) throw io_error("write failure: " + path + ".txt");
}

// Frames from a directory of .pgm/.png files (lexicographic order) or from a
// list file with one path per line ('#' comments, paths relative to the list).
inline FrameSequence read_frames(const std::string& path) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (!entry.is_regular_file()) continue;
            const std::string ext = lower_ext(entry.path());
            if (ext == ".pgm" || ext == ".png") files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end(),
                  [](const std::string& a, const std::string& b) {
                      return fs::path(a).filename().string() < fs::path(b).filename().string();
                  });
    } else if (fs::is_regular_file(path)) {
        std::ifstream in(path);
        if (!in) throw io_error("cannot open for reading: " + path);
        const fs::path base = fs::path(path).parent_path();
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == '\n' || line.back() == ' '))
                line.pop_back();
            size_t start = line.find_first_not_of(" \t");
            if (start == std::string::npos) continue;
            line = line.substr(start);
            if (line.empty() || line[0] == '#') continue;
            fs::path p(line);
            files.push_back(p.is_absolute() ? p.string() : (base / p).string());
        }
    } else {
        throw io_error("no such file or directory: " + path);
    }
    if (files.empty()) throw io_error("no frames found at: " + path);

    FrameSequence seq;
    seq.frames.reserve(files.size());
    for (const std::string& f : files) {
        GrayImage img = read_image(f);
        if (!seq.frames.empty() && !img.same_shape(seq.frames[0]))
            throw sequence_error("frame dimensions differ from first frame: " + f);
        seq.frames.push_back(std::move(img));
    }
    return seq;
}

inline std::vector<std::string> write_frames(const FrameSequence& seq, const std::string& dir,
                                             const std::string& ext = ".png") {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> paths;
    for (size_t i = 0; i < seq.frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%05zu%s", i, ext.c_str());
        const std::string p = (fs::path(dir) / name).string();
        write_image(seq.frames[i], p);
        paths.push_back(p);
    }
    return paths;
}

}  // namespace phasemotion
