#include "zaps/rng.hpp"

#include <cmath>

#include "zaps/hash.hpp"

namespace zaps {

uint64_t Rng::below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
        v = eng_();
    } while (v >= limit);
    return v % bound;
}

double Rng::uniform01() {
    // 53 random bits, same construction as std::generate_canonical but fixed.
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::gauss() {
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

void Rng::fill(uint8_t* p, size_t n) {
    size_t i = 0;
    while (i < n) {
        uint64_t v = eng_();
        for (int k = 0; k < 8 && i < n; ++k, ++i) {
            p[i] = static_cast<uint8_t>(v >> (8 * k));
        }
    }
}

Bytes Rng::bytes(size_t n) {
    Bytes out(n);
    fill(out.data(), n);
    return out;
}

Digest32 Rng::digest32() {
    Digest32 out;
    fill(out.data(), 32);
    return out;
}

Id16 Rng::id16() {
    Id16 out;
    fill(out.data(), 16);
    return out;
}

uint64_t Rng::derive_seed(uint64_t root, std::string_view path) {
    Bytes buf;
    append_u64be(buf, root);
    append(buf, path);
    Digest32 d = sha256(buf);
    return read_u64be(d.data());
}

}  // namespace zaps
