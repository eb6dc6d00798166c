#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace teefabric {

using Bytes = std::vector<uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(std::span<const uint8_t> b) {
    return std::string(b.begin(), b.end());
}

inline Bytes concat(std::span<const uint8_t> a, std::span<const uint8_t> b) {
    Bytes out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline void append(Bytes& dst, std::span<const uint8_t> src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

inline void put_u32_be(Bytes& dst, uint32_t v) {
    dst.push_back(static_cast<uint8_t>(v >> 24));
    dst.push_back(static_cast<uint8_t>(v >> 16));
    dst.push_back(static_cast<uint8_t>(v >> 8));
    dst.push_back(static_cast<uint8_t>(v));
}

inline void put_u64_be(Bytes& dst, uint64_t v) {
    for (int i = 7; i >= 0; --i) dst.push_back(static_cast<uint8_t>(v >> (i * 8)));
}

inline uint32_t get_u32_be(std::span<const uint8_t> b) {
    return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) | (uint32_t(b[2]) << 8) | uint32_t(b[3]);
}

inline uint64_t get_u64_be(std::span<const uint8_t> b) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | b[i];
    return v;
}

inline std::string hex_encode(std::span<const uint8_t> b) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (uint8_t c : b) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

inline std::optional<Bytes> hex_decode(std::string_view s) {
    if (s.size() % 2 != 0) return std::nullopt;
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    Bytes out;
    out.reserve(s.size() / 2);
    for (size_t i = 0; i < s.size(); i += 2) {
        int hi = nib(s[i]), lo = nib(s[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

// Volatile-qualified wipe so the compiler cannot elide it.
inline void secure_wipe(uint8_t* p, size_t n) {
    volatile uint8_t* vp = p;
    for (size_t i = 0; i < n; ++i) vp[i] = 0;
}

inline void secure_wipe(Bytes& b) {
    if (!b.empty()) secure_wipe(b.data(), b.size());
    b.clear();
}

}  // namespace teefabric
