#include "crypto/mic_ops.hpp"

#include "crypto/sha1.hpp"

namespace suarp::crypto {

namespace {

constexpr std::size_t kBlockLen = 8;

std::uint64_t load_be64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = v << 8 | p[i];
  return v;
}

void store_be64(std::uint64_t v, std::uint8_t* p) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
}

// Zero-pad up to the next block boundary; aligned input stays unchanged.
// Not reversible, which is fine for a MIC input.
Bytes pad_for_mic(ByteView message) {
  Bytes padded(message.begin(), message.end());
  padded.resize((padded.size() + kBlockLen - 1) / kBlockLen * kBlockLen, 0);
  return padded;
}

// Reversible padding for encryption: zero fill, then one trailing byte
// holding the original length mod 8. Always grows the input by 1..8 bytes.
Bytes pad_for_encrypt(ByteView message) {
  Bytes padded(message.begin(), message.end());
  std::size_t target = (padded.size() + 1 + kBlockLen - 1) / kBlockLen * kBlockLen;
  padded.resize(target - 1, 0);
  padded.push_back(static_cast<std::uint8_t>(message.size() % kBlockLen));
  return padded;
}

Bytes unpad_after_decrypt(Bytes padded) {
  if (padded.empty()) throw DecryptFailure("empty plaintext");
  std::uint8_t mod = padded.back();
  if (mod >= kBlockLen) throw DecryptFailure("bad padding marker");
  // The original length is the unique value in (len-9, len-1] congruent
  // to the marker mod 8.
  std::size_t limit = padded.size() - 1;
  std::size_t orig = limit - ((limit - mod) % kBlockLen);
  for (std::size_t i = orig; i < limit; ++i)
    if (padded[i] != 0) throw DecryptFailure("nonzero padding");
  padded.resize(orig);
  return padded;
}

}  // namespace

Mic cbc_residue_mic(const BlockCipher64& cipher, const SharedKey& key,
                    ByteView message) {
  Bytes padded = pad_for_mic(message);
  std::uint64_t chain = 0;  // zero IV keeps the MIC deterministic
  for (std::size_t off = 0; off < padded.size(); off += kBlockLen)
    chain = cipher.encrypt_block(chain ^ load_be64(padded.data() + off),
                                 key.bytes);
  Mic mic;
  mic.scheme = core::MicScheme::CbcResidue;
  mic.bytes.resize(kBlockLen);
  store_be64(chain, mic.bytes.data());
  return mic;
}

Mic cbc_residue_mic(const SharedKey& key, ByteView message) {
  return cbc_residue_mic(default_cipher(), key, message);
}

Mic keyed_hash_mic(ByteView key, const std::optional<Nonce>& nonce,
                   const std::vector<Bytes>& parts) {
  // Length-prefix every component so distinct input splits can never
  // produce the same hash input.
  core::ByteWriter w;
  w.u32(static_cast<std::uint32_t>(key.size()));
  w.raw(key);
  if (nonce) {
    w.u32(static_cast<std::uint32_t>(nonce->bytes.size()));
    w.raw(nonce->bytes);
  } else {
    w.u32(0);
  }
  w.u32(static_cast<std::uint32_t>(parts.size()));
  for (const auto& part : parts) {
    w.u32(static_cast<std::uint32_t>(part.size()));
    w.raw(part);
  }
  Bytes input = w.take();

  auto digest = sha1(input);
  Mic mic;
  mic.scheme = core::MicScheme::KeyedHash;
  mic.bytes.assign(digest.begin(), digest.end());
  return mic;
}

Bytes xor_mask(const SessionKey& key, const Mic& mic) {
  if (key.bytes.size() != mic.bytes.size()) throw LengthMismatch();
  Bytes out(key.bytes.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = key.bytes[i] ^ mic.bytes[i];
  return out;
}

SessionKey xor_unmask(ByteView masked, const Mic& mic) {
  if (masked.size() != mic.bytes.size()) throw LengthMismatch();
  SessionKey key;
  key.bytes.resize(masked.size());
  for (std::size_t i = 0; i < masked.size(); ++i)
    key.bytes[i] = masked[i] ^ mic.bytes[i];
  return key;
}

Bytes encrypt_payload(const BlockCipher64& cipher, const SharedKey& key,
                      ByteView message, core::Rng& iv_rng) {
  Bytes padded = pad_for_encrypt(message);
  Bytes out = core::random_bytes(iv_rng, kBlockLen);  // IV travels in front
  std::uint64_t chain = load_be64(out.data());
  for (std::size_t off = 0; off < padded.size(); off += kBlockLen) {
    chain = cipher.encrypt_block(chain ^ load_be64(padded.data() + off),
                                 key.bytes);
    out.resize(out.size() + kBlockLen);
    store_be64(chain, out.data() + out.size() - kBlockLen);
  }
  return out;
}

Bytes decrypt_payload(const BlockCipher64& cipher, const SharedKey& key,
                      ByteView ciphertext) {
  if (ciphertext.size() < 2 * kBlockLen || ciphertext.size() % kBlockLen != 0)
    throw DecryptFailure("bad ciphertext length");
  std::uint64_t chain = load_be64(ciphertext.data());
  Bytes plain;
  for (std::size_t off = kBlockLen; off < ciphertext.size(); off += kBlockLen) {
    std::uint64_t block = load_be64(ciphertext.data() + off);
    std::uint64_t decrypted = cipher.decrypt_block(block, key.bytes) ^ chain;
    chain = block;
    plain.resize(plain.size() + kBlockLen);
    store_be64(decrypted, plain.data() + plain.size() - kBlockLen);
  }
  return unpad_after_decrypt(std::move(plain));
}

Bytes encrypt_payload(const SharedKey& key, ByteView message, core::Rng& iv_rng) {
  return encrypt_payload(default_cipher(), key, message, iv_rng);
}

Bytes decrypt_payload(const SharedKey& key, ByteView ciphertext) {
  return decrypt_payload(default_cipher(), key, ciphertext);
}

Nonce derive_nrn(const SharedKey& key, const Nonce& current_rn,
                 ByteView transcript) {
  Bytes t(transcript.begin(), transcript.end());
  Mic digest = keyed_hash_mic(key.bytes, current_rn, {std::move(t)});
  Nonce next;
  next.bytes.assign(digest.bytes.begin(), digest.bytes.begin() + kNonceLen);
  return next;
}

}  // namespace suarp::crypto
