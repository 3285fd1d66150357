// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The phit Authors

// File formats. Each file is one line of JSON header followed by a
// little-endian float64 payload of interleaved (re, im) pairs:
//   grid function:      {"format": "phit-grid", n, ell, g, count}
//   coefficient field:  {"format": "phit-coefficients", grid, nu_min, nu_max, extents}
//                       with one block per level, k_1 fastest.
// Writes go through a temporary file and a rename.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

#include "json.hpp"

#include "phit/grid.hpp"

namespace phit::io {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_f64(std::string& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

inline double get_f64(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
    return std::bit_cast<double>(bits);
}

inline void put_values(std::string& out, std::span<const cplx> vs) {
    for (const auto& v : vs) {
        put_f64(out, v.real());
        put_f64(out, v.imag());
    }
}

struct Parsed {
    nlohmann::json header;
    std::string payload;
};

inline Parsed split(const std::string& bytes, const std::string& format) {
    const auto nl = bytes.find('\n');
    if (nl == std::string::npos) throw FormatError("missing header line");
    Parsed p;
    try {
        p.header = nlohmann::json::parse(bytes.substr(0, nl));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed header: ") + e.what());
    }
    if (!p.header.is_object() || p.header.value("format", std::string{}) != format)
        throw FormatError("expected format '" + format + "'");
    p.payload = bytes.substr(nl + 1);
    return p;
}

inline std::vector<cplx> take_values(const std::string& payload, std::size_t& pos, std::size_t count) {
    if (payload.size() < pos + 16 * count) throw FormatError("payload truncated");
    std::vector<cplx> vs(count);
    const auto* p = reinterpret_cast<const unsigned char*>(payload.data()) + pos;
    for (std::size_t i = 0; i < count; ++i) vs[i] = {get_f64(p + 16 * i), get_f64(p + 16 * i + 8)};
    pos += 16 * count;
    return vs;
}

inline GridSpec spec_from(const nlohmann::json& j) {
    GridSpec s{j.at("n").get<int>(), j.at("ell").get<int>(), j.at("g").get<int>()};
    s.validate();
    return s;
}

}  // namespace detail

// ------------------------------------------------------------- byte files ----

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes via path.tmp.<pid> then rename, so readers never see partial files.
inline void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw FormatError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------- grid functions ----

inline nlohmann::json grid_json(const GridSpec& s) { return {{"n", s.n}, {"ell", s.ell}, {"g", s.g}}; }

inline std::string encode(const GridFunction& f) {
    nlohmann::json h = grid_json(f.spec());
    h["format"] = "phit-grid";
    h["count"] = f.size();
    std::string out = h.dump() + "\n";
    detail::put_values(out, f.samples());
    return out;
}

inline GridFunction decode_grid_function(const std::string& bytes) {
    auto p = detail::split(bytes, "phit-grid");
    try {
        const auto spec = detail::spec_from(p.header);
        if (p.header.at("count").get<std::size_t>() != spec.size()) throw FormatError("count does not match grid");
        std::size_t pos = 0;
        auto vs = detail::take_values(p.payload, pos, spec.size());
        if (pos != p.payload.size()) throw FormatError("trailing bytes after payload");
        return GridFunction(spec, std::move(vs));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("grid header: ") + e.what());
    }
}

inline void save(const std::filesystem::path& path, const GridFunction& f) { atomic_write(path, encode(f)); }
inline GridFunction load_grid_function(const std::filesystem::path& path) {
    return decode_grid_function(read_file(path));
}

// ------------------------------------------------------- coefficient fields ----

inline nlohmann::json window_json(const CoefficientWindow& w) {
    nlohmann::json ext = nlohmann::json::array();
    for (const auto& e : w.extents) ext.push_back({{e[0][0], e[0][1]}, {e[1][0], e[1][1]}});
    return {{"nu_min", w.nu_min}, {"nu_max", w.nu_max}, {"extents", ext}};
}

inline CoefficientWindow window_from(const nlohmann::json& j) {
    CoefficientWindow w{j.at("nu_min").get<int>(), j.at("nu_max").get<int>(), {}};
    for (const auto& e : j.at("extents"))
        w.extents.push_back({{{e.at(0).at(0).get<std::int64_t>(), e.at(0).at(1).get<std::int64_t>()},
                              {e.at(1).at(0).get<std::int64_t>(), e.at(1).at(1).get<std::int64_t>()}}});
    return w;
}

inline std::string encode(const CoefficientField& a) {
    nlohmann::json h = window_json(a.window());
    h["format"] = "phit-coefficients";
    h["grid"] = grid_json(a.spec());
    std::string out = h.dump() + "\n";
    for (int nu = a.window().nu_min; nu <= a.window().nu_max; ++nu) detail::put_values(out, a.level(nu));
    return out;
}

inline CoefficientField decode_coefficient_field(const std::string& bytes) {
    auto p = detail::split(bytes, "phit-coefficients");
    try {
        const auto spec = detail::spec_from(p.header.at("grid"));
        CoefficientField a(spec, window_from(p.header));
        std::size_t pos = 0;
        for (int nu = a.window().nu_min; nu <= a.window().nu_max; ++nu)
            a.level(nu) = detail::take_values(p.payload, pos, a.level(nu).size());
        if (pos != p.payload.size()) throw FormatError("trailing bytes after payload");
        return a;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("coefficient header: ") + e.what());
    }
}

inline void save(const std::filesystem::path& path, const CoefficientField& a) { atomic_write(path, encode(a)); }
inline CoefficientField load_coefficient_field(const std::filesystem::path& path) {
    return decode_coefficient_field(read_file(path));
}

// ----------------------------------------------------------------- tables ----

/// 16 hex digits of FNV-1a over the canonical (key-sorted) JSON dump.
inline std::string config_hash(const nlohmann::json& config) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

/// Round-trippable, locale-independent number formatting.
inline std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    CsvTable& row(const std::vector<std::string>& cells) {
        require(cells.size() == columns_.size(), "csv: row width does not match the header");
        rows_.push_back(cells);
        return *this;
    }

    [[nodiscard]] std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cs) {
            for (std::size_t i = 0; i < cs.size(); ++i) {
                if (i) out += ',';
                out += cs[i];
            }
            out += '\n';
        };
        line(columns_);
        for (const auto& r : rows_) line(r);
        return out;
    }
    [[nodiscard]] std::size_t size() const { return rows_.size(); }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace phit::io
