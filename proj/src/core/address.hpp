#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace suarp::core {

/// 48-bit link-layer address. Text form is six lowercase colon-separated
/// hex pairs; ff:ff:ff:ff:ff:ff is the broadcast address and is never a
/// valid source.
struct MacAddress {
  std::array<std::uint8_t, 6> octets{};

  auto operator<=>(const MacAddress&) const = default;

  static MacAddress broadcast();
  static MacAddress zero() { return MacAddress{}; }
  static std::optional<MacAddress> parse(const std::string& text);

  bool is_broadcast() const;
  bool is_zero() const { return *this == MacAddress{}; }
  std::string to_string() const;
};

/// IPv4 address with dotted-quad text form.
struct IpAddress {
  std::array<std::uint8_t, 4> octets{};

  auto operator<=>(const IpAddress&) const = default;

  static std::optional<IpAddress> parse(const std::string& text);

  bool is_zero() const { return *this == IpAddress{}; }
  std::string to_string() const;
};

}  // namespace suarp::core

template <>
struct std::hash<suarp::core::MacAddress> {
  std::size_t operator()(const suarp::core::MacAddress& m) const noexcept {
    std::uint64_t v = 0;
    for (auto b : m.octets) v = (v << 8) | b;
    return std::hash<std::uint64_t>{}(v);
  }
};

template <>
struct std::hash<suarp::core::IpAddress> {
  std::size_t operator()(const suarp::core::IpAddress& ip) const noexcept {
    std::uint32_t v = 0;
    for (auto b : ip.octets) v = (v << 8) | b;
    return std::hash<std::uint32_t>{}(v);
  }
};
