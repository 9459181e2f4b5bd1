#include <doctest.h>

#include "agents/caches.hpp"

using namespace suarp::agents;
using suarp::core::SimTime;

namespace {
IpAddress ip(const std::string& s) { return *IpAddress::parse(s); }
MacAddress mac(const std::string& s) { return *MacAddress::parse(s); }
}  // namespace

TEST_CASE("resolution cache serves fresh entries only") {
  ResolutionCache cache(SimTime::ms(1000));  // t4
  cache.insert(ip("10.0.0.2"), mac("aa:00:00:00:00:02"), SimTime::ms(100));

  CHECK(cache.lookup(ip("10.0.0.2"), SimTime::ms(100)).has_value());
  // age t4 - 1: still served
  CHECK(cache.lookup(ip("10.0.0.2"), SimTime::ms(1099)).has_value());
  // age exactly t4: expired
  CHECK_FALSE(cache.lookup(ip("10.0.0.2"), SimTime::ms(1100)).has_value());
  CHECK_FALSE(cache.lookup(ip("10.0.0.2"), SimTime::ms(5000)).has_value());
  CHECK_FALSE(cache.lookup(ip("10.0.0.9"), SimTime::ms(100)).has_value());
}

TEST_CASE("resolution cache insertion overwrites") {
  ResolutionCache cache(SimTime::ms(1000));
  cache.insert(ip("10.0.0.2"), mac("aa:00:00:00:00:02"), SimTime::ms(10));
  cache.insert(ip("10.0.0.2"), mac("aa:00:00:00:00:66"), SimTime::ms(20));
  auto entry = cache.lookup(ip("10.0.0.2"), SimTime::ms(25));
  REQUIRE(entry.has_value());
  CHECK(*entry == mac("aa:00:00:00:00:66"));
}

TEST_CASE("lease pool reserves offers and binds on request") {
  LeasePool pool(ip("10.0.0.100"), ip("10.0.0.102"), SimTime::minutes(10),
                 SimTime::seconds(2));
  auto offered = pool.offer(mac("aa:00:00:00:00:01"), 1, SimTime::ms(0), {});
  REQUIRE(offered.has_value());
  CHECK((*offered)->ip == ip("10.0.0.100"));
  CHECK((*offered)->state == LeaseState::Offered);

  // Another client cannot get the reserved address.
  auto second = pool.offer(mac("aa:00:00:00:00:02"), 2, SimTime::ms(10), {});
  REQUIRE(second.has_value());
  CHECK((*second)->ip == ip("10.0.0.101"));

  Lease* bound = pool.bind(mac("aa:00:00:00:00:01"), ip("10.0.0.100"), 1,
                           SimTime::ms(20));
  REQUIRE(bound != nullptr);
  CHECK(bound->state == LeaseState::Bound);
  CHECK(pool.unique_live_ips(SimTime::ms(20)));
}

TEST_CASE("unclaimed offers lapse back to the pool") {
  LeasePool pool(ip("10.0.0.100"), ip("10.0.0.100"), SimTime::minutes(10),
                 SimTime::seconds(2));
  auto offered = pool.offer(mac("aa:00:00:00:00:01"), 1, SimTime::ms(0), {});
  REQUIRE(offered.has_value());

  // Within the hold the single address is reserved.
  CHECK_FALSE(pool.offer(mac("aa:00:00:00:00:02"), 2, SimTime::ms(1000), {}).has_value());
  // After the hold it is free again.
  auto later = pool.offer(mac("aa:00:00:00:00:02"), 3, SimTime::ms(2000), {});
  REQUIRE(later.has_value());
  CHECK((*later)->ip == ip("10.0.0.100"));
}

TEST_CASE("bound lease expires after its duration and the ip is reusable") {
  LeasePool pool(ip("10.0.0.100"), ip("10.0.0.100"), SimTime::ms(5000),
                 SimTime::seconds(2));
  pool.offer(mac("aa:00:00:00:00:01"), 1, SimTime::ms(0), {});
  REQUIRE(pool.bind(mac("aa:00:00:00:00:01"), ip("10.0.0.100"), 1, SimTime::ms(10)));

  CHECK(pool.find_bound(ip("10.0.0.100"), SimTime::ms(5009)) != nullptr);
  // granted_at + duration + 1: gone
  CHECK(pool.find_bound(ip("10.0.0.100"), SimTime::ms(5011)) == nullptr);

  // Sequential clients obtain the same address after expiry.
  auto next = pool.offer(mac("aa:00:00:00:00:02"), 2, SimTime::ms(6000), {});
  REQUIRE(next.has_value());
  CHECK((*next)->ip == ip("10.0.0.100"));
  REQUIRE(pool.bind(mac("aa:00:00:00:00:02"), ip("10.0.0.100"), 2, SimTime::ms(6010)));
  CHECK(pool.unique_live_ips(SimTime::ms(6010)));
}

TEST_CASE("renewal restarts the clock; late renewal fails") {
  LeasePool pool(ip("10.0.0.100"), ip("10.0.0.100"), SimTime::ms(10'000),
                 SimTime::seconds(2));
  pool.offer(mac("aa:00:00:00:00:01"), 1, SimTime::ms(0), {});
  pool.bind(mac("aa:00:00:00:00:01"), ip("10.0.0.100"), 1, SimTime::ms(0));

  // Renew at 0.9 x duration.
  CHECK(pool.renew(mac("aa:00:00:00:00:01"), ip("10.0.0.100"), SimTime::ms(9000)));
  CHECK(pool.find_bound(ip("10.0.0.100"), SimTime::ms(18'000)) != nullptr);

  // No renewal: expired past granted_at + duration.
  CHECK_FALSE(pool.renew(mac("aa:00:00:00:00:01"), ip("10.0.0.100"),
                         SimTime::ms(19'500)));
}

TEST_CASE("release returns an offered address after the other server wins") {
  LeasePool pool(ip("10.0.0.100"), ip("10.0.0.100"), SimTime::minutes(10),
                 SimTime::minutes(10));  // long hold: release must do the work
  pool.offer(mac("aa:00:00:00:00:01"), 7, SimTime::ms(0), {});
  pool.release(mac("aa:00:00:00:00:01"), 7);
  auto next = pool.offer(mac("aa:00:00:00:00:02"), 8, SimTime::ms(10), {});
  REQUIRE(next.has_value());
  CHECK((*next)->ip == ip("10.0.0.100"));
}
