#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "core/address.hpp"
#include "crypto/mic_ops.hpp"

namespace suarp::crypto {

/// (host, server) pair identifying one shared-key association.
struct AssociationId {
  core::MacAddress host;
  core::MacAddress server;
  auto operator<=>(const AssociationId&) const = default;
};

struct Association {
  SharedKey shared_key;
  Nonce current_rn;
  // One-step history: if an exchange's final ACK is lost, the two ends can
  // disagree by exactly one rollover until the next completed exchange.
  std::optional<Nonce> previous_rn;
  std::optional<SessionKey> current_session_key;
};

class UnknownAssociation : public std::runtime_error {
 public:
  UnknownAssociation() : std::runtime_error("unknown key association") {}
};

/// Per-agent key material. Each endpoint owns its own store; the protocol
/// exchanges are what keep the two sides' entries in sync.
class KeyStore {
 public:
  void provision(const AssociationId& id, SharedKey key, Nonce initial_rn) {
    entries_[id] = Association{std::move(key), std::move(initial_rn),
                               std::nullopt, std::nullopt};
  }

  bool has(const AssociationId& id) const { return entries_.count(id) != 0; }

  const Association& get(const AssociationId& id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw UnknownAssociation();
    return it->second;
  }

  void rollover(const AssociationId& id, Nonce next_rn) {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw UnknownAssociation();
    it->second.previous_rn = it->second.current_rn;
    it->second.current_rn = std::move(next_rn);
  }

  void set_session_key(const AssociationId& id, SessionKey key) {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw UnknownAssociation();
    it->second.current_session_key = std::move(key);
  }

  /// Nonces a verifier should try, newest first. The previous RN covers a
  /// peer whose last exchange committed while our side never saw its final
  /// ACK; one step of history is enough because the next completed exchange
  /// resynchronizes both ends.
  std::vector<Nonce> rn_candidates(const AssociationId& id) const {
    const auto& assoc = get(id);
    std::vector<Nonce> out{assoc.current_rn};
    if (assoc.previous_rn) out.push_back(*assoc.previous_rn);
    return out;
  }

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<AssociationId, Association> entries_;
};

}  // namespace suarp::crypto
