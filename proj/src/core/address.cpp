#include "core/address.hpp"

#include <cstdio>

namespace suarp::core {

namespace {

int hex_val(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

MacAddress MacAddress::broadcast() {
  MacAddress m;
  m.octets.fill(0xff);
  return m;
}

bool MacAddress::is_broadcast() const { return *this == broadcast(); }

std::optional<MacAddress> MacAddress::parse(const std::string& text) {
  // Strict form: xx:xx:xx:xx:xx:xx (17 chars).
  if (text.size() != 17) return std::nullopt;
  MacAddress m;
  for (int i = 0; i < 6; ++i) {
    int hi = hex_val(text[static_cast<std::size_t>(i) * 3]);
    int lo = hex_val(text[static_cast<std::size_t>(i) * 3 + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    if (i < 5 && text[static_cast<std::size_t>(i) * 3 + 2] != ':') return std::nullopt;
    m.octets[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return m;
}

std::string MacAddress::to_string() const {
  char buf[18];
  std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", octets[0],
                octets[1], octets[2], octets[3], octets[4], octets[5]);
  return buf;
}

std::optional<IpAddress> IpAddress::parse(const std::string& text) {
  IpAddress ip;
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    if (pos >= text.size()) return std::nullopt;
    int value = 0;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      value = value * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
      if (value > 255 || digits > 3) return std::nullopt;
    }
    if (digits == 0) return std::nullopt;
    ip.octets[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value);
    if (i < 3) {
      if (pos >= text.size() || text[pos] != '.') return std::nullopt;
      ++pos;
    }
  }
  if (pos != text.size()) return std::nullopt;
  return ip;
}

std::string IpAddress::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", octets[0], octets[1],
                octets[2], octets[3]);
  return buf;
}

}  // namespace suarp::core
