#include "zaps/hash.hpp"

#include <openssl/sha.h>

namespace zaps {

Digest32 sha256(const uint8_t* data, size_t len) {
    Digest32 out;
    SHA256(data, len, out.data());
    return out;
}

Digest32 keyed_digest(std::string_view domain, const Digest32& key, const Bytes& data) {
    Bytes buf;
    buf.reserve(domain.size() + 32 + data.size());
    append(buf, domain);
    append(buf, key);
    append(buf, data);
    return sha256(buf);
}

}  // namespace zaps
