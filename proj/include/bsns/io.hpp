#pragma once

#include <bsns/errors.hpp>
#include <bsns/grid.hpp>

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace bsns::io {

inline constexpr uint32_t snapshot_version = 1;

// Snapshot layout, all little-endian:
//   "BSNS" | u32 version | u32 d, Nx, Nz, Nt | f64 a, Xmax, Zmax, T | (re, im) f64 ...
// Nx is per axis, Nt counts stored time slices, Nz = 0 marks a boundary (x, t) array.
// Values run x fastest, then z, then t.
struct SnapshotHeader {
    uint32_t version = snapshot_version, d = 1, Nx = 0, Nz = 0, Nt = 0;
    double a = 0, Xmax = 0, Zmax = 0, T = 0;
    size_t values() const
    {
        size_t n = Nt * (size_t)std::max<uint32_t>(Nz, 1);
        for (uint32_t i = 0; i < d; ++i)
            n *= Nx;
        return n;
    }
};

struct Snapshot {
    SnapshotHeader h;
    std::vector<cplx> v;
};

namespace detail {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::string& s, T x)
{
    auto b = std::bit_cast<std::array<unsigned char, sizeof(T)>>(x);
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b.begin(), b.end());
    s.append(reinterpret_cast<const char*>(b.data()), b.size());
}

template <class T>
T get(const std::string& s, size_t& pos)
{
    if (pos + sizeof(T) > s.size())
        throw config_error("snapshot: truncated file");
    std::array<unsigned char, sizeof(T)> b;
    std::copy(s.begin() + pos, s.begin() + pos + sizeof(T), b.begin());
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b.begin(), b.end());
    pos += sizeof(T);
    return std::bit_cast<T>(b);
}

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f)
        throw config_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& s)
{
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f)
        throw config_error("cannot write " + p.string());
    f.write(s.data(), (std::streamsize)s.size());
    if (!f)
        throw config_error("write failed: " + p.string());
}

} // namespace detail

inline std::string encode(const Snapshot& s)
{
    if (s.v.size() != s.h.values())
        throw config_error("snapshot: value count does not match header");
    std::string out = "BSNS";
    for (uint32_t u : {s.h.version, s.h.d, s.h.Nx, s.h.Nz, s.h.Nt})
        detail::put(out, u);
    for (double x : {s.h.a, s.h.Xmax, s.h.Zmax, s.h.T})
        detail::put(out, x);
    out.reserve(out.size() + 16 * s.v.size());
    for (cplx c : s.v) {
        detail::put(out, c.real());
        detail::put(out, c.imag());
    }
    return out;
}

inline Snapshot decode(const std::string& b)
{
    if (b.size() < 4 || b.compare(0, 4, "BSNS") != 0)
        throw config_error("snapshot: bad magic");
    size_t pos = 4;
    Snapshot s;
    s.h.version = detail::get<uint32_t>(b, pos);
    if (s.h.version != snapshot_version)
        throw config_error("snapshot: unsupported version");
    s.h.d = detail::get<uint32_t>(b, pos);
    s.h.Nx = detail::get<uint32_t>(b, pos);
    s.h.Nz = detail::get<uint32_t>(b, pos);
    s.h.Nt = detail::get<uint32_t>(b, pos);
    s.h.a = detail::get<double>(b, pos);
    s.h.Xmax = detail::get<double>(b, pos);
    s.h.Zmax = detail::get<double>(b, pos);
    s.h.T = detail::get<double>(b, pos);
    if (s.h.d < 1 || s.h.d > 3)
        throw config_error("snapshot: bad dimension");
    const size_t n = s.h.values();
    if (b.size() != pos + 16 * n)
        throw config_error("snapshot: size does not match header");
    s.v.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double re = detail::get<double>(b, pos);
        s.v[i] = cplx(re, detail::get<double>(b, pos));
    }
    return s;
}

inline Snapshot snapshot_of(const SpaceTimeField& U)
{
    Snapshot s;
    s.h = {snapshot_version, (uint32_t)U.xg.d, (uint32_t)U.xg.Nx, (uint32_t)U.nz(), (uint32_t)U.nt(),
           U.a, U.xg.Xmax, U.zg.Zmax, U.tg.T};
    s.v = U.v;
    return s;
}

inline Snapshot snapshot_of(const HalfSpaceField& u)
{
    Snapshot s;
    s.h = {snapshot_version, (uint32_t)u.xg.d, (uint32_t)u.xg.Nx, (uint32_t)u.nz(), 1u, u.a, u.xg.Xmax, u.zg.Zmax, 0.0};
    s.v = u.v;
    return s;
}

inline Snapshot snapshot_of(const BoundaryTrace& f, double a)
{
    Snapshot s;
    s.h = {snapshot_version, (uint32_t)f.xg.d, (uint32_t)f.xg.Nx, 0u, (uint32_t)f.nt(), a, f.xg.Xmax, 0.0, f.tg.T};
    s.v = f.v;
    return s;
}

inline void write_snapshot(const std::filesystem::path& p, const Snapshot& s) { detail::write_file(p, encode(s)); }
inline Snapshot read_snapshot(const std::filesystem::path& p) { return decode(detail::read_file(p)); }

inline std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw numerical_failure("sha256 failed");
    static const char* hx = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hx[md[i] >> 4];
        out += hx[md[i] & 15];
    }
    return out;
}

inline std::string sha256_file(const std::filesystem::path& p) { return sha256_hex(detail::read_file(p)); }

// header row, then rows; numbers printed with %.17g so they round-trip
class Csv {
public:
    explicit Csv(std::vector<std::string> header) : cols_(header.size())
    {
        for (size_t i = 0; i < header.size(); ++i)
            text_ += (i ? "," : "") + header[i];
        text_ += "\n";
    }
    Csv& row(const std::vector<double>& v)
    {
        if (v.size() != cols_)
            throw std::logic_error("csv: wrong column count");
        char buf[40];
        for (size_t i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", v[i]);
            text_ += (i ? "," : "") + std::string(buf);
        }
        text_ += "\n";
        return *this;
    }
    const std::string& text() const { return text_; }

private:
    size_t cols_;
    std::string text_;
};

} // namespace bsns::io
