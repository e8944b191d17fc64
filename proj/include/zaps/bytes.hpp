#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zaps {

using Bytes = std::vector<uint8_t>;
using Digest32 = std::array<uint8_t, 32>;
using Id16 = std::array<uint8_t, 16>;

inline void append(Bytes& out, const uint8_t* p, size_t n) {
    out.insert(out.end(), p, p + n);
}

inline void append(Bytes& out, const Bytes& b) { append(out, b.data(), b.size()); }

template <size_t N>
inline void append(Bytes& out, const std::array<uint8_t, N>& a) {
    append(out, a.data(), N);
}

inline void append(Bytes& out, std::string_view s) {
    append(out, reinterpret_cast<const uint8_t*>(s.data()), s.size());
}

inline void append_u16be(Bytes& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline void append_u32be(Bytes& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline void append_u64be(Bytes& out, uint64_t v) {
    append_u32be(out, static_cast<uint32_t>(v >> 32));
    append_u32be(out, static_cast<uint32_t>(v));
}

inline uint16_t read_u16be(const uint8_t* p) {
    return static_cast<uint16_t>((uint16_t(p[0]) << 8) | uint16_t(p[1]));
}

inline uint32_t read_u32be(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) |
           uint32_t(p[3]);
}

inline uint64_t read_u64be(const uint8_t* p) {
    return (uint64_t(read_u32be(p)) << 32) | read_u32be(p + 4);
}

std::string to_hex(const uint8_t* p, size_t n);

inline std::string to_hex(const Bytes& b) { return to_hex(b.data(), b.size()); }

template <size_t N>
inline std::string to_hex(const std::array<uint8_t, N>& a) {
    return to_hex(a.data(), N);
}

// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

// Constant-shape comparison: runtime independent of where the mismatch is.
bool ct_equal(const uint8_t* a, const uint8_t* b, size_t n);

template <size_t N>
inline bool ct_equal(const std::array<uint8_t, N>& a, const std::array<uint8_t, N>& b) {
    return ct_equal(a.data(), b.data(), N);
}

}  // namespace zaps
