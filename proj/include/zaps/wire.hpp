#pragma once

#include <optional>
#include <variant>

#include "zaps/bytes.hpp"

namespace zaps::wire {

// Fixed on-wire unit sizes. Every message is a concatenation of these, in a
// fixed order per variant, big-endian, no padding between fields.
//   curve point (x-only)  32
//   identifier / alias    16
//   digest / nonce blob   32
//   auth token            64  (32 MAC + 32 key confirmation)
//   proof envelope       128
//   timestamp             4
using X32 = std::array<uint8_t, 32>;
using Proof128 = std::array<uint8_t, 128>;

struct AuthToken {
    Digest32 mac{};
    Digest32 kc{};
    bool operator==(const AuthToken&) const = default;
};

enum class MsgType : uint8_t {
    M1 = 1,  // user hello
    M2 = 2,  // drone hello
    M3 = 3,  // server -> user
    M4 = 4,  // server -> drone
    M5 = 5,  // user route proof
    M6 = 6,  // server countersign + own proof
    M7 = 7,  // drone route proof
    M8 = 8,  // user final ack
};

// Payload size by variant, indexed by tag - 1.
inline constexpr std::array<size_t, 8> kMsgSize = {80, 144, 128, 128, 276, 256, 272, 112};

inline constexpr size_t kInitBytes = 80 + 144 + 128 + 128;    // 480
inline constexpr size_t kProofBytes = 276 + 256 + 272 + 112;  // 916
inline constexpr size_t kSessionBytes = kInitBytes + kProofBytes;

// true for M1..M4 (initialization phase), false for M5..M8 (proof phase).
bool init_phase(MsgType t);

struct Msg1 {
    X32 e_u{};       // ephemeral r1*G
    Id16 rid{};      // user alias
    Digest32 i_u{};  // identity binder
    bool operator==(const Msg1&) const = default;
};

struct Msg2 {
    X32 e_d{};
    Id16 did{};
    Digest32 i_d{};
    AuthToken auth;
    bool operator==(const Msg2&) const = default;
};

struct Msg3 {
    Id16 sid{};
    Id16 uid{};
    X32 e_d{};  // drone ephemeral, relayed
    AuthToken auth;
    bool operator==(const Msg3&) const = default;
};

struct Msg4 {
    Id16 sid{};
    Id16 did{};
    X32 e_u{};  // user ephemeral, relayed
    AuthToken auth;
    bool operator==(const Msg4&) const = default;
};

struct Msg5 {
    X32 p_u{};  // route commitment point
    Id16 rid{};
    Digest32 i_u{};
    Proof128 proof{};
    AuthToken auth;
    uint32_t t1 = 0;
    bool operator==(const Msg5&) const = default;
};

struct Msg6 {
    AuthToken auth;
    X32 p_s{};
    Digest32 i_s{};
    Proof128 proof{};
    bool operator==(const Msg6&) const = default;
};

struct Msg7 {
    X32 p_d{};
    Id16 did{};
    Digest32 i_d{};
    Proof128 proof{};
    AuthToken auth;
    bool operator==(const Msg7&) const = default;
};

struct Msg8 {
    Id16 uid{};
    AuthToken auth;
    Digest32 i_us{};
    bool operator==(const Msg8&) const = default;
};

using WireMessage = std::variant<Msg1, Msg2, Msg3, Msg4, Msg5, Msg6, Msg7, Msg8>;

MsgType message_tag(const WireMessage& m);

// Canonical fixed-length encodings.
Bytes encode(const Msg1&);
Bytes encode(const Msg2&);
Bytes encode(const Msg3&);
Bytes encode(const Msg4&);
Bytes encode(const Msg5&);
Bytes encode(const Msg6&);
Bytes encode(const Msg7&);
Bytes encode(const Msg8&);
Bytes encode_payload(const WireMessage& m);

// Strict decoders: exact length or nullopt. decode_payload dispatches on the
// expected variant; an unknown tag yields nullopt.
std::optional<Msg1> decode_msg1(const Bytes& b);
std::optional<Msg2> decode_msg2(const Bytes& b);
std::optional<Msg3> decode_msg3(const Bytes& b);
std::optional<Msg4> decode_msg4(const Bytes& b);
std::optional<Msg5> decode_msg5(const Bytes& b);
std::optional<Msg6> decode_msg6(const Bytes& b);
std::optional<Msg7> decode_msg7(const Bytes& b);
std::optional<Msg8> decode_msg8(const Bytes& b);
std::optional<WireMessage> decode_payload(MsgType expected, const Bytes& b);

// ---- simulator framing ----------------------------------------------------

// Transport envelope used by the channel simulator:
//   tag(1) || payload_len(2) || sender_ts(4, ms) || aux_len(2) || aux || payload
// The frame carries routing and the sender's clock reading; aux holds
// phase-local side data (relayed timestamps, the forwarded server proof).
// Framing bytes are transport cost, not protocol cost, and are excluded from
// overhead accounting unless explicitly itemized as extras.
inline constexpr size_t kFrameHeader = 1 + 2 + 4 + 2;

struct Frame {
    uint8_t tag = 0;
    uint32_t sender_ts = 0;
    Bytes aux;
    Bytes payload;
    bool operator==(const Frame&) const = default;
};

// Throws std::length_error when payload or aux exceed the 16-bit length field.
Bytes encode_frame(const Frame& f);
// Strict: header sane, both length fields consistent, no trailing bytes.
std::optional<Frame> decode_frame(const Bytes& b);

// ---- overhead accounting --------------------------------------------------

struct OverheadItem {
    std::string name;
    size_t bytes = 0;
};

// Per-session byte ledger. For an honest full session the fixed per-variant
// sizes give 480 (initialization) + 916 (proof phase) = 1396; extras itemize
// anything beyond the base protocol (e.g. transport framing) and move the
// total to 1396 + extras.
class OverheadReport {
public:
    void add_message(MsgType t, size_t bytes);
    void add_extra(std::string name, size_t bytes);

    // All eight variants seen at least once.
    bool complete() const;
    size_t message_bytes(MsgType t) const;
    size_t init_subtotal() const;
    size_t proof_subtotal() const;
    size_t extras_total() const;
    size_t total() const;
    const std::vector<OverheadItem>& extras() const { return extras_; }

    std::string to_csv() const;
    std::string to_json() const;

private:
    std::array<size_t, 8> bytes_{};
    std::array<uint32_t, 8> count_{};
    std::vector<OverheadItem> extras_;
};

// The report an honest session produces, straight from the size table.
OverheadReport nominal_overhead();

}  // namespace zaps::wire
