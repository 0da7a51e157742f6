#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "phasemotion/errors.hpp"
#include "phasemotion/flow.hpp"
#include "phasemotion/phase_motion.hpp"
#include "phasemotion/pyramid.hpp"

namespace phasemotion {

namespace detail {

// Little-endian scalar I/O, independent of host byte order.

inline void put_u32le(std::ostream& out, uint32_t v) {
    const uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                          static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_f32le(std::ostream& out, float v) { put_u32le(out, std::bit_cast<uint32_t>(v)); }

inline uint32_t get_u32le(std::istream& in, const std::string& path) {
    uint8_t b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4) throw io_error("truncated file: " + path);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline float get_f32le(std::istream& in, const std::string& path) {
    return std::bit_cast<float>(get_u32le(in, path));
}

inline void put_plane_f32(std::ostream& out, const GrayImage& plane) {
    for (double v : plane.data) put_f32le(out, static_cast<float>(v));
}

inline GrayImage get_plane_f32(std::istream& in, int w, int h, const std::string& path) {
    GrayImage plane(w, h);
    for (double& v : plane.data) v = get_f32le(in, path);
    return plane;
}

inline void expect_magic(std::istream& in, const char* magic, const std::string& path) {
    char buf[8] = {};
    const size_t n = std::strlen(magic);
    in.read(buf, static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n) || std::memcmp(buf, magic, n) != 0)
        throw io_error(std::string("bad magic (want ") + magic + "): " + path);
}

}  // namespace detail

// ---- CSPB1: filter bank sidecar ----
// "CSPB1" | u32 W, H, n_scales, n_orientations | f32 angles | f32 omegas |
// per scale: f32 low-pass plane, then one f32 band-pass plane per orientation.
// All planes row-major on the scale's own grid.

inline void save_filter_bank(const FilterBank& bank, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out.write("CSPB1", 5);
    detail::put_u32le(out, static_cast<uint32_t>(bank.width));
    detail::put_u32le(out, static_cast<uint32_t>(bank.height));
    detail::put_u32le(out, static_cast<uint32_t>(bank.spec.n_scales));
    detail::put_u32le(out, static_cast<uint32_t>(bank.spec.n_orientations));
    for (double a : bank.spec.orientation_angles) detail::put_f32le(out, static_cast<float>(a));
    for (double w : bank.omega) detail::put_f32le(out, static_cast<float>(w));
    for (int s = 0; s < bank.spec.n_scales; ++s) {
        detail::put_plane_f32(out, bank.lowpass[s]);
        for (const GrayImage& b : bank.bandpass[s]) detail::put_plane_f32(out, b);
    }
    if (!out.good()) throw io_error("write failure: " + path);
}

inline FilterBank load_filter_bank(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path);
    detail::expect_magic(in, "CSPB1", path);
    FilterBank bank;
    bank.width = static_cast<int>(detail::get_u32le(in, path));
    bank.height = static_cast<int>(detail::get_u32le(in, path));
    bank.spec.n_scales = static_cast<int>(detail::get_u32le(in, path));
    bank.spec.n_orientations = static_cast<int>(detail::get_u32le(in, path));
    if (bank.width < 1 || bank.height < 1 || bank.spec.n_scales < 1 || bank.spec.n_orientations < 1)
        throw io_error("bad filter bank header: " + path);
    bank.spec.orientation_angles.resize(bank.spec.n_orientations);
    for (double& a : bank.spec.orientation_angles) a = detail::get_f32le(in, path);
    bank.omega.resize(bank.spec.n_scales);
    for (double& w : bank.omega) w = detail::get_f32le(in, path);
    bank.bandpass.resize(bank.spec.n_scales);
    for (int s = 0; s < bank.spec.n_scales; ++s) {
        const int gw = bank.grid_width(s);
        const int gh = bank.grid_height(s);
        bank.lowpass.push_back(detail::get_plane_f32(in, gw, gh, path));
        for (int o = 0; o < bank.spec.n_orientations; ++o)
            bank.bandpass[s].push_back(detail::get_plane_f32(in, gw, gh, path));
    }
    return bank;
}

// ---- SNIP1: packed snippet tensors ----
// "SNIP1" | u32 n_scales | per scale: u32 C, H, W | u32 T_pairs, n_orientations |
// f32 omegas | per scale: f32 data, channel-major.

inline void save_snippet(const std::vector<SnippetTensor>& tensors, const std::string& path) {
    if (tensors.empty()) throw validation_error("save_snippet: no tensors");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out.write("SNIP1", 5);
    detail::put_u32le(out, static_cast<uint32_t>(tensors.size()));
    for (const SnippetTensor& t : tensors) {
        detail::put_u32le(out, static_cast<uint32_t>(t.channels));
        detail::put_u32le(out, static_cast<uint32_t>(t.height));
        detail::put_u32le(out, static_cast<uint32_t>(t.width));
    }
    detail::put_u32le(out, static_cast<uint32_t>(tensors[0].t_pairs));
    detail::put_u32le(out, static_cast<uint32_t>(tensors[0].n_orientations));
    for (const SnippetTensor& t : tensors) detail::put_f32le(out, static_cast<float>(t.omega));
    for (const SnippetTensor& t : tensors)
        for (double v : t.data) detail::put_f32le(out, static_cast<float>(v));
    if (!out.good()) throw io_error("write failure: " + path);
}

inline std::vector<SnippetTensor> load_snippet(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path);
    detail::expect_magic(in, "SNIP1", path);
    const uint32_t n_scales = detail::get_u32le(in, path);
    if (n_scales == 0 || n_scales > 64) throw io_error("bad snippet header: " + path);
    std::vector<SnippetTensor> tensors(n_scales);
    for (SnippetTensor& t : tensors) {
        t.channels = static_cast<int>(detail::get_u32le(in, path));
        t.height = static_cast<int>(detail::get_u32le(in, path));
        t.width = static_cast<int>(detail::get_u32le(in, path));
    }
    const uint32_t t_pairs = detail::get_u32le(in, path);
    const uint32_t n_orient = detail::get_u32le(in, path);
    for (SnippetTensor& t : tensors) {
        t.t_pairs = static_cast<int>(t_pairs);
        t.n_orientations = static_cast<int>(n_orient);
        t.omega = detail::get_f32le(in, path);
    }
    for (SnippetTensor& t : tensors) {
        t.data.resize(static_cast<size_t>(t.channels) * t.height * t.width);
        for (double& v : t.data) v = detail::get_f32le(in, path);
    }
    return tensors;
}

// ---- Middlebury .flo ----
// magic float 202021.25 | i32 width, height | interleaved f32 u,v row-major.

inline void save_flo(const FlowField& flow, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    detail::put_f32le(out, 202021.25f);
    detail::put_u32le(out, static_cast<uint32_t>(flow.width));
    detail::put_u32le(out, static_cast<uint32_t>(flow.height));
    for (size_t i = 0; i < flow.u.size(); ++i) {
        detail::put_f32le(out, static_cast<float>(flow.u[i]));
        detail::put_f32le(out, static_cast<float>(flow.v[i]));
    }
    if (!out.good()) throw io_error("write failure: " + path);
}

inline FlowField load_flo(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path);
    if (detail::get_f32le(in, path) != 202021.25f)
        throw io_error("bad .flo magic (endianness?): " + path);
    const int w = static_cast<int>(detail::get_u32le(in, path));
    const int h = static_cast<int>(detail::get_u32le(in, path));
    if (w < 1 || h < 1 || w > 99999 || h > 99999) throw io_error("bad .flo dimensions: " + path);
    FlowField flow(w, h);
    for (size_t i = 0; i < flow.u.size(); ++i) {
        flow.u[i] = detail::get_f32le(in, path);
        flow.v[i] = detail::get_f32le(in, path);
    }
    return flow;
}

}  // namespace phasemotion
