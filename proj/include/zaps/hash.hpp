#pragma once

#include "zaps/bytes.hpp"

namespace zaps {

// SHA-256 over an arbitrary byte string.
Digest32 sha256(const uint8_t* data, size_t len);

inline Digest32 sha256(const Bytes& data) { return sha256(data.data(), data.size()); }

inline Digest32 sha256(std::string_view s) {
    return sha256(reinterpret_cast<const uint8_t*>(s.data()), s.size());
}

// Keyed digest used for auth-token MACs and key-confirmation values:
// SHA-256(domain || key || data). The domain string separates the two halves
// of a token and every other keyed use in the protocol.
Digest32 keyed_digest(std::string_view domain, const Digest32& key, const Bytes& data);

// Convenience builder for hash inputs assembled from several parts.
class HashWriter {
public:
    HashWriter& operator<<(const Bytes& b) {
        append(buf_, b);
        return *this;
    }
    HashWriter& operator<<(std::string_view s) {
        append(buf_, s);
        return *this;
    }
    template <size_t N>
    HashWriter& operator<<(const std::array<uint8_t, N>& a) {
        append(buf_, a);
        return *this;
    }
    HashWriter& u32(uint32_t v) {
        append_u32be(buf_, v);
        return *this;
    }
    Digest32 digest() const { return sha256(buf_); }
    const Bytes& bytes() const { return buf_; }

private:
    Bytes buf_;
};

}  // namespace zaps
