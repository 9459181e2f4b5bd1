#include <doctest.h>

#include "core/frame.hpp"
#include "core/message.hpp"
#include "helpers/message_gen.hpp"

using namespace suarp::core;

namespace {

ProtocolMessage sample_req() {
  SuarpReqBody body;
  body.ip_a = *IpAddress::parse("172.20.122.84");
  body.mac_a = *MacAddress::parse("aa:bb:cc:dd:ee:01");
  body.ip_b = *IpAddress::parse("172.20.122.57");
  return make_message(body);
}

}  // namespace

TEST_CASE("serialization is deterministic") {
  auto msg = sample_req();
  Bytes first = serialize_message(msg);
  Bytes second = serialize_message(msg);
  CHECK(first == second);
  CHECK_FALSE(first.empty());

  // Fixed prefix: version byte then the kind tag.
  CHECK(first[0] == kWireVersion);
  CHECK(first[1] == static_cast<std::uint8_t>(MsgKind::SuarpReq));
}

TEST_CASE("parse inverts serialize") {
  auto msg = sample_req();
  CHECK(parse_message(serialize_message(msg)) == msg);
}

TEST_CASE("random messages of every kind round-trip") {
  Rng rng(7);
  int seen_kinds[14] = {0};
  for (int i = 0; i < 1000; ++i) {
    ProtocolMessage msg = suarp::testing::random_message(rng);
    ++seen_kinds[static_cast<int>(msg.kind())];
    Bytes wire = serialize_message(msg);
    ProtocolMessage back = parse_message(wire);
    CHECK(back == msg);
    CHECK(serialize_message(back) == wire);
  }
  // 1000 draws across 13 kinds: every kind must have been exercised.
  for (int k = 1; k <= 13; ++k) CHECK(seen_kinds[k] > 0);
}

TEST_CASE("message equality matches canonical byte equality") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    ProtocolMessage a = suarp::testing::random_message(rng);
    ProtocolMessage b = suarp::testing::random_message(rng);
    CHECK((a == b) == (serialize_message(a) == serialize_message(b)));
  }
}

TEST_CASE("parse rejects malformed input") {
  CHECK_THROWS_AS(parse_message(Bytes{}), MalformedMessage);

  Bytes good = serialize_message(sample_req());

  SUBCASE("kind tag overwritten with an unknown value") {
    Bytes bad = good;
    bad[1] = 0xff;
    CHECK_THROWS_AS(parse_message(bad), MalformedMessage);
  }
  SUBCASE("unsupported version byte") {
    Bytes bad = good;
    bad[0] = 0x7f;
    CHECK_THROWS_AS(parse_message(bad), MalformedMessage);
  }
  SUBCASE("truncated") {
    Bytes bad(good.begin(), good.end() - 1);
    CHECK_THROWS_AS(parse_message(bad), MalformedMessage);
  }
  SUBCASE("trailing bytes") {
    Bytes bad = good;
    bad.push_back(0);
    CHECK_THROWS_AS(parse_message(bad), MalformedMessage);
  }
  SUBCASE("mic count out of range") {
    // mic count byte sits right after the 14-byte request body.
    Bytes bad = good;
    bad[2 + 14] = 9;
    CHECK_THROWS_AS(parse_message(bad), MalformedMessage);
  }
}

TEST_CASE("frame wire size is payload serialization plus link header") {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    ProtocolMessage msg = suarp::testing::random_message(rng);
    std::size_t payload_len = serialize_message(msg).size();
    Frame f = Frame::make(suarp::testing::random_mac(rng),
                          MacAddress::broadcast(), msg, SimTime::ms(5));
    CHECK(f.wire_size == payload_len + kLinkHeaderBytes);
  }
}
