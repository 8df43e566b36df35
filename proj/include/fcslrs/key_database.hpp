#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <string>
#include <vector>

#include "fcslrs/codec.hpp"
#include "fcslrs/error.hpp"
#include "fcslrs/hash.hpp"
#include "fcslrs/scheme.hpp"

namespace fcslrs {

enum class Enrollment : std::uint8_t { active = 0, revoked = 1 };

struct KeyEntry {
  mpz_class pk;
  Enrollment status = Enrollment::active;
  std::string label;
  friend bool operator==(const KeyEntry&, const KeyEntry&) = default;
};

/// Digest binding a key database to one parameter set.
inline Bytes params_digest(const SystemParams& params) { return sha3_256(codec::encode(params)); }

/// File-backed public-key database. Revocation is a flag; consumers must
/// re-accumulate after any change.
class KeyDatabase {
 public:
  KeyDatabase() = default;
  explicit KeyDatabase(const SystemParams& params) : params_digest_(params_digest(params)) {}

  void add(const mpz_class& pk, std::string label) {
    require(!find(pk), ErrorCode::duplicate_member, "public key already enrolled");
    entries_.push_back(KeyEntry{pk, Enrollment::active, std::move(label)});
  }

  void revoke(const mpz_class& pk) {
    KeyEntry* entry = find(pk);
    require(entry != nullptr, ErrorCode::unknown_key, "revoking an unknown key");
    entry->status = Enrollment::revoked;
  }

  std::vector<mpz_class> active_keys() const {
    std::vector<mpz_class> out;
    for (const auto& e : entries_)
      if (e.status == Enrollment::active) out.push_back(e.pk);
    return out;
  }

  const std::vector<KeyEntry>& entries() const noexcept { return entries_; }
  const Bytes& bound_params_digest() const noexcept { return params_digest_; }
  bool bound_to(const SystemParams& params) const { return params_digest_ == params_digest(params); }

  Bytes encode() const {
    codec::Writer w;
    w.header(codec::kKeyDatabaseMagic).bytes(params_digest_).u32(static_cast<std::uint32_t>(entries_.size()));
    for (const auto& e : entries_) w.integer(e.pk).u8(static_cast<std::uint8_t>(e.status)).text(e.label);
    return std::move(w).take();
  }

  static KeyDatabase decode(ByteView data) {
    codec::Reader r(data);
    r.header(codec::kKeyDatabaseMagic);
    KeyDatabase db;
    ByteView digest = r.bytes();
    db.params_digest_.assign(digest.begin(), digest.end());
    const std::uint32_t count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::size_t at = r.position();
      KeyEntry e;
      e.pk = r.integer();
      const std::uint8_t status = r.u8();
      if (status > 1) throw DecodeError(at, "bad enrollment flag");
      e.status = static_cast<Enrollment>(status);
      e.label = r.text();
      if (db.find(e.pk)) throw DecodeError(at, "duplicate key in database");
      db.entries_.push_back(std::move(e));
    }
    r.finish();
    return db;
  }

  void save(const std::string& path) const { codec::write_file(path, encode()); }
  static KeyDatabase load(const std::string& path) { return decode(codec::read_file(path)); }

 private:
  KeyEntry* find(const mpz_class& pk) {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const KeyEntry& e) { return e.pk == pk; });
    return it == entries_.end() ? nullptr : &*it;
  }
  const KeyEntry* find(const mpz_class& pk) const { return const_cast<KeyDatabase*>(this)->find(pk); }

  Bytes params_digest_;
  std::vector<KeyEntry> entries_;
};

}  // namespace fcslrs
