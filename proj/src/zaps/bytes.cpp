#include "zaps/bytes.hpp"

namespace zaps {

static const char* kHexDigits = "0123456789abcdef";

std::string to_hex(const uint8_t* p, size_t n) {
    std::string s;
    s.reserve(2 * n);
    for (size_t i = 0; i < n; ++i) {
        s.push_back(kHexDigits[p[i] >> 4]);
        s.push_back(kHexDigits[p[i] & 0x0f]);
    }
    return s;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("from_hex: odd length");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("from_hex: bad digit");
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

bool ct_equal(const uint8_t* a, const uint8_t* b, size_t n) {
    uint8_t acc = 0;
    for (size_t i = 0; i < n; ++i) acc |= static_cast<uint8_t>(a[i] ^ b[i]);
    return acc == 0;
}

}  // namespace zaps
