#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>

#include "teefabric/bytes.hpp"

namespace teefabric {

// Self-contained SHA3-256 (FIPS 202). Keeping the digest pipeline inside the
// library means measurements, manifest ids, and PCR chains are identical under
// every crypto backend. Cross-checked in tests against OpenSSL and NIST
// known-answer values.
namespace detail {

inline uint64_t rotl64(uint64_t x, int s) { return (x << s) | (x >> (64 - s)); }

inline void keccak_f1600(std::array<uint64_t, 25>& st) {
    static constexpr uint64_t RC[24] = {
        0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
        0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
        0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
        0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
        0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
        0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
        0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
        0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};
    static constexpr int ROT[24] = {1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                                    27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};
    static constexpr int PIL[24] = {10, 7,  11, 17, 18, 3,  5,  16, 8,  21, 24, 4,
                                    15, 23, 19, 13, 12, 2,  20, 14, 22, 9,  6,  1};
    for (int round = 0; round < 24; ++round) {
        uint64_t bc[5];
        for (int i = 0; i < 5; ++i)
            bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20];
        for (int i = 0; i < 5; ++i) {
            uint64_t t = bc[(i + 4) % 5] ^ rotl64(bc[(i + 1) % 5], 1);
            for (int j = 0; j < 25; j += 5) st[j + i] ^= t;
        }
        uint64_t t = st[1];
        for (int i = 0; i < 24; ++i) {
            int j = PIL[i];
            uint64_t tmp = st[j];
            st[j] = rotl64(t, ROT[i]);
            t = tmp;
        }
        for (int j = 0; j < 25; j += 5) {
            for (int i = 0; i < 5; ++i) bc[i] = st[j + i];
            for (int i = 0; i < 5; ++i) st[j + i] ^= (~bc[(i + 1) % 5]) & bc[(i + 2) % 5];
        }
        st[0] ^= RC[round];
    }
}

}  // namespace detail

class Sha3_256 {
public:
    static constexpr size_t kDigestSize = 32;
    static constexpr size_t kRate = 136;  // 1088-bit rate

    void update(std::span<const uint8_t> data) {
        for (uint8_t b : data) {
            buf_[pos_++] ^= b;
            if (pos_ == kRate) {
                absorb();
                pos_ = 0;
            }
        }
    }

    std::array<uint8_t, kDigestSize> finish() {
        buf_[pos_] ^= 0x06;
        buf_[kRate - 1] ^= 0x80;
        absorb();
        std::array<uint8_t, kDigestSize> out{};
        for (size_t i = 0; i < kDigestSize; ++i)
            out[i] = static_cast<uint8_t>(state_[i / 8] >> (8 * (i % 8)));
        return out;
    }

private:
    void absorb() {
        for (size_t i = 0; i < kRate / 8; ++i) {
            uint64_t lane = 0;
            for (int j = 7; j >= 0; --j) lane = (lane << 8) | buf_[i * 8 + j];
            state_[i] ^= lane;
        }
        detail::keccak_f1600(state_);
        buf_.fill(0);
    }

    std::array<uint64_t, 25> state_{};
    std::array<uint8_t, kRate> buf_{};
    size_t pos_ = 0;
};

inline std::array<uint8_t, 32> sha3_256(std::span<const uint8_t> data) {
    Sha3_256 h;
    h.update(data);
    return h.finish();
}

inline std::array<uint8_t, 32> sha3_256(std::string_view s) {
    return sha3_256(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
}

}  // namespace teefabric
