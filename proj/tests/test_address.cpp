#include <doctest.h>

#include "core/address.hpp"
#include "core/sim_time.hpp"

using namespace suarp::core;

TEST_CASE("mac address text form round-trips") {
  auto mac = MacAddress::parse("aa:bb:cc:dd:ee:01");
  REQUIRE(mac.has_value());
  CHECK(mac->to_string() == "aa:bb:cc:dd:ee:01");
  CHECK(MacAddress::parse(mac->to_string()) == mac);

  // Uppercase input is accepted, output is always lowercase.
  auto upper = MacAddress::parse("AA:BB:CC:DD:EE:01");
  REQUIRE(upper.has_value());
  CHECK(*upper == *mac);
}

TEST_CASE("mac address broadcast is all-ones") {
  CHECK(MacAddress::broadcast().to_string() == "ff:ff:ff:ff:ff:ff");
  CHECK(MacAddress::broadcast().is_broadcast());
  CHECK_FALSE(MacAddress{}.is_broadcast());
}

TEST_CASE("mac address rejects malformed text") {
  CHECK_FALSE(MacAddress::parse("").has_value());
  CHECK_FALSE(MacAddress::parse("aa:bb:cc:dd:ee").has_value());
  CHECK_FALSE(MacAddress::parse("aa:bb:cc:dd:ee:0g").has_value());
  CHECK_FALSE(MacAddress::parse("aa-bb-cc-dd-ee-01").has_value());
  CHECK_FALSE(MacAddress::parse("aa:bb:cc:dd:ee:011").has_value());
}

TEST_CASE("ip address dotted quad round-trips") {
  auto ip = IpAddress::parse("172.20.122.84");
  REQUIRE(ip.has_value());
  CHECK(ip->to_string() == "172.20.122.84");
  CHECK(IpAddress::parse(ip->to_string()) == ip);
  CHECK(IpAddress::parse("0.0.0.0")->is_zero());
}

TEST_CASE("ip address rejects malformed text") {
  CHECK_FALSE(IpAddress::parse("").has_value());
  CHECK_FALSE(IpAddress::parse("1.2.3").has_value());
  CHECK_FALSE(IpAddress::parse("1.2.3.4.5").has_value());
  CHECK_FALSE(IpAddress::parse("256.1.1.1").has_value());
  CHECK_FALSE(IpAddress::parse("1..2.3").has_value());
  CHECK_FALSE(IpAddress::parse("1.2.3.x").has_value());
}

TEST_CASE("timer config validation") {
  TimerConfig ok;
  CHECK_NOTHROW(ok.validate());

  TimerConfig bad_order;
  bad_order.t2 = SimTime::ms(500);
  bad_order.t3 = SimTime::ms(500);  // t3 must be strictly greater
  CHECK_THROWS_AS(bad_order.validate(), std::invalid_argument);

  TimerConfig zero;
  zero.t1 = SimTime::ms(0);
  CHECK_THROWS_AS(zero.validate(), std::invalid_argument);
}
