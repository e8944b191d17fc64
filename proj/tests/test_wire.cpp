#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "zaps/rng.hpp"
#include "zaps/wire.hpp"

using namespace zaps;
using namespace zaps::wire;

namespace {

// Deterministically filled messages for round-trip checks.
template <typename T>
T filled(Rng& rng);

template <size_t N>
std::array<uint8_t, N> arr(Rng& rng) {
    std::array<uint8_t, N> a;
    rng.fill(a.data(), N);
    return a;
}

AuthToken token(Rng& rng) { return AuthToken{arr<32>(rng), arr<32>(rng)}; }

template <>
Msg1 filled(Rng& rng) {
    return Msg1{arr<32>(rng), arr<16>(rng), arr<32>(rng)};
}
template <>
Msg2 filled(Rng& rng) {
    return Msg2{arr<32>(rng), arr<16>(rng), arr<32>(rng), token(rng)};
}
template <>
Msg3 filled(Rng& rng) {
    return Msg3{arr<16>(rng), arr<16>(rng), arr<32>(rng), token(rng)};
}
template <>
Msg4 filled(Rng& rng) {
    return Msg4{arr<16>(rng), arr<16>(rng), arr<32>(rng), token(rng)};
}
template <>
Msg5 filled(Rng& rng) {
    return Msg5{arr<32>(rng), arr<16>(rng), arr<32>(rng), arr<128>(rng), token(rng),
                static_cast<uint32_t>(rng.u64())};
}
template <>
Msg6 filled(Rng& rng) {
    return Msg6{token(rng), arr<32>(rng), arr<32>(rng), arr<128>(rng)};
}
template <>
Msg7 filled(Rng& rng) {
    return Msg7{arr<32>(rng), arr<16>(rng), arr<32>(rng), arr<128>(rng), token(rng)};
}
template <>
Msg8 filled(Rng& rng) {
    return Msg8{arr<16>(rng), token(rng), arr<32>(rng)};
}

template <typename T, typename Decode>
void roundtrip(size_t expected_size, Decode decode) {
    Rng rng(1234);
    for (int i = 0; i < 5; ++i) {
        T m = filled<T>(rng);
        Bytes b = encode(m);
        CHECK(b.size() == expected_size);
        auto back = decode(b);
        REQUIRE(back.has_value());
        CHECK(*back == m);
        // Strictness: shorter or longer both fail.
        Bytes shorter(b.begin(), b.end() - 1);
        CHECK_FALSE(decode(shorter).has_value());
        Bytes longer = b;
        longer.push_back(0);
        CHECK_FALSE(decode(longer).has_value());
        CHECK_FALSE(decode(Bytes{}).has_value());
    }
}

}  // namespace

TEST_CASE("size table") {
    CHECK(kMsgSize[0] == 80);
    CHECK(kMsgSize[1] == 144);
    CHECK(kMsgSize[2] == 128);
    CHECK(kMsgSize[3] == 128);
    CHECK(kMsgSize[4] == 276);
    CHECK(kMsgSize[5] == 256);
    CHECK(kMsgSize[6] == 272);
    CHECK(kMsgSize[7] == 112);
    CHECK(kInitBytes == 480);
    CHECK(kProofBytes == 916);
    CHECK(kSessionBytes == 1396);
    CHECK(init_phase(MsgType::M1));
    CHECK(init_phase(MsgType::M4));
    CHECK_FALSE(init_phase(MsgType::M5));
    CHECK_FALSE(init_phase(MsgType::M8));
}

TEST_CASE("round trips are exact and strict") {
    roundtrip<Msg1>(80, decode_msg1);
    roundtrip<Msg2>(144, decode_msg2);
    roundtrip<Msg3>(128, decode_msg3);
    roundtrip<Msg4>(128, decode_msg4);
    roundtrip<Msg5>(276, decode_msg5);
    roundtrip<Msg6>(256, decode_msg6);
    roundtrip<Msg7>(272, decode_msg7);
    roundtrip<Msg8>(112, decode_msg8);
}

TEST_CASE("variant encode and tag dispatch") {
    Rng rng(77);
    std::vector<WireMessage> all = {filled<Msg1>(rng), filled<Msg2>(rng), filled<Msg3>(rng),
                                    filled<Msg4>(rng), filled<Msg5>(rng), filled<Msg6>(rng),
                                    filled<Msg7>(rng), filled<Msg8>(rng)};
    for (size_t i = 0; i < all.size(); ++i) {
        MsgType t = message_tag(all[i]);
        CHECK(static_cast<uint8_t>(t) == i + 1);
        Bytes b = encode_payload(all[i]);
        CHECK(b.size() == kMsgSize[i]);
        auto back = decode_payload(t, b);
        REQUIRE(back.has_value());
        CHECK(*back == all[i]);
    }
    // Msg3 and Msg4 share a length; the expected-variant parameter decides.
    Bytes b3 = encode_payload(all[2]);
    auto as4 = decode_payload(MsgType::M4, b3);
    REQUIRE(as4.has_value());  // structurally identical layout
    CHECK(message_tag(*as4) == MsgType::M4);
    // Mismatched sizes fail cleanly.
    CHECK_FALSE(decode_payload(MsgType::M5, b3).has_value());
}

TEST_CASE("encoding is field-faithful") {
    // Each field lands at its documented offset; flipping any field changes
    // the encoding (injectivity over the struct fields).
    Rng rng(88);
    Msg5 m = filled<Msg5>(rng);
    Bytes b = encode(m);
    CHECK(std::equal(m.p_u.begin(), m.p_u.end(), b.begin()));
    CHECK(std::equal(m.rid.begin(), m.rid.end(), b.begin() + 32));
    CHECK(std::equal(m.i_u.begin(), m.i_u.end(), b.begin() + 48));
    CHECK(std::equal(m.proof.begin(), m.proof.end(), b.begin() + 80));
    CHECK(std::equal(m.auth.mac.begin(), m.auth.mac.end(), b.begin() + 208));
    CHECK(std::equal(m.auth.kc.begin(), m.auth.kc.end(), b.begin() + 240));
    CHECK(read_u32be(b.data() + 272) == m.t1);

    Msg5 m2 = m;
    m2.t1 ^= 1;
    CHECK(encode(m2) != b);
    Msg5 m3 = m;
    m3.proof[127] ^= 1;
    CHECK(encode(m3) != b);
}

TEST_CASE("frames round trip and reject malformed input") {
    Rng rng(99);
    Frame f;
    f.tag = 5;
    f.sender_ts = 123456;
    f.aux = Bytes{9, 9, 9};
    f.payload = encode(filled<Msg5>(rng));
    Bytes b = encode_frame(f);
    CHECK(b.size() == kFrameHeader + 3 + 276);
    auto back = decode_frame(b);
    REQUIRE(back.has_value());
    CHECK(*back == f);

    // Empty aux, empty payload is legal transport-wise.
    Frame empty;
    auto eb = encode_frame(empty);
    CHECK(eb.size() == kFrameHeader);
    CHECK(decode_frame(eb) == empty);

    // Truncations at every point in the header.
    for (size_t cut = 0; cut < kFrameHeader; ++cut) {
        Bytes t(b.begin(), b.begin() + cut);
        CHECK_FALSE(decode_frame(t).has_value());
    }
    // Inconsistent length fields.
    Bytes bad_len = b;
    bad_len[2] ^= 1;  // payload_len low byte
    CHECK_FALSE(decode_frame(bad_len).has_value());
    Bytes bad_aux = b;
    bad_aux[8] ^= 1;  // aux_len low byte
    CHECK_FALSE(decode_frame(bad_aux).has_value());
    Bytes trailing = b;
    trailing.push_back(0);
    CHECK_FALSE(decode_frame(trailing).has_value());

    Frame huge;
    huge.payload.resize(70000);
    CHECK_THROWS_AS(encode_frame(huge), std::length_error);
}

TEST_CASE("overhead accounting hits the totals") {
    OverheadReport r = nominal_overhead();
    CHECK(r.complete());
    CHECK(r.init_subtotal() == 480);
    CHECK(r.proof_subtotal() == 916);
    CHECK(r.total() == 1396);
    CHECK(r.message_bytes(MsgType::M5) == 276);

    // Init-only partial session.
    OverheadReport part;
    for (int i = 1; i <= 4; ++i) {
        part.add_message(static_cast<MsgType>(i), kMsgSize[i - 1]);
    }
    CHECK_FALSE(part.complete());
    CHECK(part.init_subtotal() == 480);
    CHECK(part.proof_subtotal() == 0);
    CHECK(part.total() == 480);

    // Extras are itemized on top of the base total.
    OverheadReport ext = nominal_overhead();
    ext.add_extra("framing", 72);
    ext.add_extra("relays", 128);
    CHECK(ext.extras_total() == 200);
    CHECK(ext.total() == 1596);
}

TEST_CASE("overhead report serializations") {
    OverheadReport r = nominal_overhead();
    std::string csv = r.to_csv();
    CHECK(csv.find("item,phase,bytes\r\n") == 0);
    CHECK(csv.find("msg1,init,80\r\n") != std::string::npos);
    CHECK(csv.find("msg5,proof,276\r\n") != std::string::npos);
    CHECK(csv.find("subtotal_init,init,480\r\n") != std::string::npos);
    CHECK(csv.find("subtotal_proof,proof,916\r\n") != std::string::npos);
    CHECK(csv.find("total,,1396\r\n") != std::string::npos);
    // No extras section when there are none.
    CHECK(csv.find("subtotal_extras") == std::string::npos);

    std::string js = r.to_json();
    CHECK(js.find("\"subtotal_init\": 480") != std::string::npos);
    CHECK(js.find("\"total\": 1396") != std::string::npos);
    CHECK(js.find("\"complete\": true") != std::string::npos);

    r.add_extra("framing", 72);
    std::string csv2 = r.to_csv();
    CHECK(csv2.find("framing,extra,72\r\n") != std::string::npos);
    CHECK(csv2.find("total,,1468\r\n") != std::string::npos);
}
