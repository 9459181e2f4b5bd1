#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>

namespace suarp::core {

/// Simulated time, 1 tick = 1 millisecond. Also used for durations
/// (the protocol periods t1..t4 and the delay bound delta_t).
struct SimTime {
  std::uint64_t ticks{0};

  auto operator<=>(const SimTime&) const = default;

  static constexpr SimTime ms(std::uint64_t n) { return SimTime{n}; }
  static constexpr SimTime seconds(std::uint64_t n) { return SimTime{n * 1000}; }
  static constexpr SimTime minutes(std::uint64_t n) { return SimTime{n * 60'000}; }

  constexpr SimTime operator+(SimTime other) const { return SimTime{ticks + other.ticks}; }
  constexpr SimTime operator-(SimTime other) const { return SimTime{ticks - other.ticks}; }
  SimTime& operator+=(SimTime other) {
    ticks += other.ticks;
    return *this;
  }
};

/// Protocol timer periods. t1: response wait, t2: piggyback window,
/// t3: ACK deadline (t3 > t2 required), t4: cache TTL, delta_t: accepted
/// transmission delay for the freshness check.
struct TimerConfig {
  SimTime t1{500};
  SimTime t2{200};
  SimTime t3{1000};
  SimTime t4{SimTime::minutes(5)};
  SimTime delta_t{300};

  void validate() const {
    if (t1.ticks == 0 || t2.ticks == 0 || t3.ticks == 0 || t4.ticks == 0 ||
        delta_t.ticks == 0)
      throw std::invalid_argument("timer periods must be strictly positive");
    if (!(t3 > t2))
      throw std::invalid_argument("timer config requires t3 > t2");
  }
};

}  // namespace suarp::core
