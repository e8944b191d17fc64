#include "zaps/wire.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace zaps::wire {

bool init_phase(MsgType t) { return static_cast<uint8_t>(t) <= 4; }

MsgType message_tag(const WireMessage& m) {
    return static_cast<MsgType>(static_cast<uint8_t>(m.index() + 1));
}

namespace {

// Sequential field reader with an exact-consumption contract.
class Cursor {
public:
    explicit Cursor(const Bytes& b) : b_(b) {}

    template <size_t N>
    bool take(std::array<uint8_t, N>& out) {
        if (pos_ + N > b_.size()) return false;
        std::memcpy(out.data(), b_.data() + pos_, N);
        pos_ += N;
        return true;
    }
    bool take(AuthToken& out) { return take(out.mac) && take(out.kc); }
    bool take_u32(uint32_t& out) {
        if (pos_ + 4 > b_.size()) return false;
        out = read_u32be(b_.data() + pos_);
        pos_ += 4;
        return true;
    }
    bool done() const { return pos_ == b_.size(); }

private:
    const Bytes& b_;
    size_t pos_ = 0;
};

void put(Bytes& out, const AuthToken& t) {
    append(out, t.mac);
    append(out, t.kc);
}

}  // namespace

Bytes encode(const Msg1& m) {
    Bytes out;
    out.reserve(kMsgSize[0]);
    append(out, m.e_u);
    append(out, m.rid);
    append(out, m.i_u);
    return out;
}

Bytes encode(const Msg2& m) {
    Bytes out;
    out.reserve(kMsgSize[1]);
    append(out, m.e_d);
    append(out, m.did);
    append(out, m.i_d);
    put(out, m.auth);
    return out;
}

Bytes encode(const Msg3& m) {
    Bytes out;
    out.reserve(kMsgSize[2]);
    append(out, m.sid);
    append(out, m.uid);
    append(out, m.e_d);
    put(out, m.auth);
    return out;
}

Bytes encode(const Msg4& m) {
    Bytes out;
    out.reserve(kMsgSize[3]);
    append(out, m.sid);
    append(out, m.did);
    append(out, m.e_u);
    put(out, m.auth);
    return out;
}

Bytes encode(const Msg5& m) {
    Bytes out;
    out.reserve(kMsgSize[4]);
    append(out, m.p_u);
    append(out, m.rid);
    append(out, m.i_u);
    append(out, m.proof);
    put(out, m.auth);
    append_u32be(out, m.t1);
    return out;
}

Bytes encode(const Msg6& m) {
    Bytes out;
    out.reserve(kMsgSize[5]);
    put(out, m.auth);
    append(out, m.p_s);
    append(out, m.i_s);
    append(out, m.proof);
    return out;
}

Bytes encode(const Msg7& m) {
    Bytes out;
    out.reserve(kMsgSize[6]);
    append(out, m.p_d);
    append(out, m.did);
    append(out, m.i_d);
    append(out, m.proof);
    put(out, m.auth);
    return out;
}

Bytes encode(const Msg8& m) {
    Bytes out;
    out.reserve(kMsgSize[7]);
    append(out, m.uid);
    put(out, m.auth);
    append(out, m.i_us);
    return out;
}

Bytes encode_payload(const WireMessage& m) {
    return std::visit([](const auto& v) { return encode(v); }, m);
}

std::optional<Msg1> decode_msg1(const Bytes& b) {
    if (b.size() != kMsgSize[0]) return std::nullopt;
    Msg1 m;
    Cursor c(b);
    if (!(c.take(m.e_u) && c.take(m.rid) && c.take(m.i_u) && c.done())) return std::nullopt;
    return m;
}

std::optional<Msg2> decode_msg2(const Bytes& b) {
    if (b.size() != kMsgSize[1]) return std::nullopt;
    Msg2 m;
    Cursor c(b);
    if (!(c.take(m.e_d) && c.take(m.did) && c.take(m.i_d) && c.take(m.auth) && c.done())) {
        return std::nullopt;
    }
    return m;
}

std::optional<Msg3> decode_msg3(const Bytes& b) {
    if (b.size() != kMsgSize[2]) return std::nullopt;
    Msg3 m;
    Cursor c(b);
    if (!(c.take(m.sid) && c.take(m.uid) && c.take(m.e_d) && c.take(m.auth) && c.done())) {
        return std::nullopt;
    }
    return m;
}

std::optional<Msg4> decode_msg4(const Bytes& b) {
    if (b.size() != kMsgSize[3]) return std::nullopt;
    Msg4 m;
    Cursor c(b);
    if (!(c.take(m.sid) && c.take(m.did) && c.take(m.e_u) && c.take(m.auth) && c.done())) {
        return std::nullopt;
    }
    return m;
}

std::optional<Msg5> decode_msg5(const Bytes& b) {
    if (b.size() != kMsgSize[4]) return std::nullopt;
    Msg5 m;
    Cursor c(b);
    if (!(c.take(m.p_u) && c.take(m.rid) && c.take(m.i_u) && c.take(m.proof) &&
          c.take(m.auth) && c.take_u32(m.t1) && c.done())) {
        return std::nullopt;
    }
    return m;
}

std::optional<Msg6> decode_msg6(const Bytes& b) {
    if (b.size() != kMsgSize[5]) return std::nullopt;
    Msg6 m;
    Cursor c(b);
    if (!(c.take(m.auth) && c.take(m.p_s) && c.take(m.i_s) && c.take(m.proof) && c.done())) {
        return std::nullopt;
    }
    return m;
}

std::optional<Msg7> decode_msg7(const Bytes& b) {
    if (b.size() != kMsgSize[6]) return std::nullopt;
    Msg7 m;
    Cursor c(b);
    if (!(c.take(m.p_d) && c.take(m.did) && c.take(m.i_d) && c.take(m.proof) &&
          c.take(m.auth) && c.done())) {
        return std::nullopt;
    }
    return m;
}

std::optional<Msg8> decode_msg8(const Bytes& b) {
    if (b.size() != kMsgSize[7]) return std::nullopt;
    Msg8 m;
    Cursor c(b);
    if (!(c.take(m.uid) && c.take(m.auth) && c.take(m.i_us) && c.done())) return std::nullopt;
    return m;
}

std::optional<WireMessage> decode_payload(MsgType expected, const Bytes& b) {
    auto lift = [](auto opt) -> std::optional<WireMessage> {
        if (!opt) return std::nullopt;
        return WireMessage(*opt);
    };
    switch (expected) {
        case MsgType::M1: return lift(decode_msg1(b));
        case MsgType::M2: return lift(decode_msg2(b));
        case MsgType::M3: return lift(decode_msg3(b));
        case MsgType::M4: return lift(decode_msg4(b));
        case MsgType::M5: return lift(decode_msg5(b));
        case MsgType::M6: return lift(decode_msg6(b));
        case MsgType::M7: return lift(decode_msg7(b));
        case MsgType::M8: return lift(decode_msg8(b));
    }
    return std::nullopt;
}

Bytes encode_frame(const Frame& f) {
    if (f.payload.size() > 0xffff) throw std::length_error("encode_frame: payload too long");
    if (f.aux.size() > 0xffff) throw std::length_error("encode_frame: aux too long");
    Bytes out;
    out.reserve(kFrameHeader + f.aux.size() + f.payload.size());
    out.push_back(f.tag);
    append_u16be(out, static_cast<uint16_t>(f.payload.size()));
    append_u32be(out, f.sender_ts);
    append_u16be(out, static_cast<uint16_t>(f.aux.size()));
    append(out, f.aux);
    append(out, f.payload);
    return out;
}

std::optional<Frame> decode_frame(const Bytes& b) {
    if (b.size() < kFrameHeader) return std::nullopt;
    Frame f;
    f.tag = b[0];
    size_t payload_len = read_u16be(b.data() + 1);
    f.sender_ts = read_u32be(b.data() + 3);
    size_t aux_len = read_u16be(b.data() + 7);
    if (b.size() != kFrameHeader + aux_len + payload_len) return std::nullopt;
    f.aux.assign(b.begin() + kFrameHeader, b.begin() + kFrameHeader + aux_len);
    f.payload.assign(b.begin() + kFrameHeader + aux_len, b.end());
    return f;
}

// ---- overhead accounting --------------------------------------------------

void OverheadReport::add_message(MsgType t, size_t bytes) {
    size_t i = static_cast<uint8_t>(t) - 1;
    bytes_[i] += bytes;
    count_[i] += 1;
}

void OverheadReport::add_extra(std::string name, size_t bytes) {
    extras_.push_back(OverheadItem{std::move(name), bytes});
}

bool OverheadReport::complete() const {
    for (uint32_t c : count_) {
        if (c == 0) return false;
    }
    return true;
}

size_t OverheadReport::message_bytes(MsgType t) const {
    return bytes_[static_cast<uint8_t>(t) - 1];
}

size_t OverheadReport::init_subtotal() const {
    return bytes_[0] + bytes_[1] + bytes_[2] + bytes_[3];
}

size_t OverheadReport::proof_subtotal() const {
    return bytes_[4] + bytes_[5] + bytes_[6] + bytes_[7];
}

size_t OverheadReport::extras_total() const {
    size_t n = 0;
    for (const auto& e : extras_) n += e.bytes;
    return n;
}

size_t OverheadReport::total() const {
    return init_subtotal() + proof_subtotal() + extras_total();
}

std::string OverheadReport::to_csv() const {
    std::ostringstream os;
    os << "item,phase,bytes\r\n";
    for (size_t i = 0; i < 8; ++i) {
        os << "msg" << (i + 1) << "," << (i < 4 ? "init" : "proof") << "," << bytes_[i]
           << "\r\n";
    }
    for (const auto& e : extras_) {
        os << e.name << ",extra," << e.bytes << "\r\n";
    }
    os << "subtotal_init,init," << init_subtotal() << "\r\n";
    os << "subtotal_proof,proof," << proof_subtotal() << "\r\n";
    if (!extras_.empty()) os << "subtotal_extras,extra," << extras_total() << "\r\n";
    os << "total,," << total() << "\r\n";
    return os.str();
}

std::string OverheadReport::to_json() const {
    nlohmann::ordered_json j;
    for (size_t i = 0; i < 8; ++i) j["messages"]["msg" + std::to_string(i + 1)] = bytes_[i];
    j["subtotal_init"] = init_subtotal();
    j["subtotal_proof"] = proof_subtotal();
    if (!extras_.empty()) {
        for (const auto& e : extras_) {
            j["extras"].push_back({{"name", e.name}, {"bytes", e.bytes}});
        }
        j["subtotal_extras"] = extras_total();
    }
    j["total"] = total();
    j["complete"] = complete();
    return j.dump(2);
}

OverheadReport nominal_overhead() {
    OverheadReport r;
    for (size_t i = 0; i < 8; ++i) r.add_message(static_cast<MsgType>(i + 1), kMsgSize[i]);
    return r;
}

}  // namespace zaps::wire
