#pragma once

#include <gmpxx.h>
#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcslrs/error.hpp"

namespace fcslrs {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// Identifier recorded in SystemParams for the challenge hash.
inline constexpr std::string_view kChallengeHashId = "SHAKE128/128";
inline constexpr std::size_t kChallengeBytes = 16;

namespace detail {
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }
};
}  // namespace detail

/// Incremental SHA-3 family hasher over OpenSSL EVP.
class Sha3 {
 public:
  enum class Kind { shake128_128, sha3_256 };

  explicit Sha3(Kind kind) : kind_(kind), ctx_(EVP_MD_CTX_new()) {
    const EVP_MD* md = kind == Kind::shake128_128 ? EVP_shake128() : EVP_sha3_256();
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), md, nullptr) != 1)
      throw Error(ErrorCode::generation_failure, "digest init failed");
  }

  Sha3& update(ByteView data) {
    if (!data.empty() && EVP_DigestUpdate(ctx_.get(), data.data(), data.size()) != 1)
      throw Error(ErrorCode::generation_failure, "digest update failed");
    return *this;
  }

  Bytes finish() {
    if (kind_ == Kind::shake128_128) {
      Bytes out(kChallengeBytes);
      if (EVP_DigestFinalXOF(ctx_.get(), out.data(), out.size()) != 1)
        throw Error(ErrorCode::generation_failure, "digest final failed");
      return out;
    }
    Bytes out(32);
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), out.data(), &len) != 1 || len != out.size())
      throw Error(ErrorCode::generation_failure, "digest final failed");
    return out;
  }

 private:
  Kind kind_;
  std::unique_ptr<EVP_MD_CTX, detail::MdCtxDeleter> ctx_;
};

/// 128-bit SHA-3 class digest (SHAKE128 squeezed to 16 bytes).
inline Bytes digest128(ByteView data) { return Sha3(Sha3::Kind::shake128_128).update(data).finish(); }

inline Bytes sha3_256(ByteView data) { return Sha3(Sha3::Kind::sha3_256).update(data).finish(); }

inline mpz_class from_big_endian(ByteView bytes) {
  mpz_class v;
  if (!bytes.empty()) mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return v;
}

/// Big-endian magnitude, zero-padded on the left to `width` bytes (0 = minimal).
inline Bytes to_big_endian(const mpz_class& v, std::size_t width = 0) {
  require(v >= 0, ErrorCode::encode, "negative integer");
  const std::size_t size = v == 0 ? 0 : (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  require(width == 0 || size <= width, ErrorCode::encode, "integer exceeds field width");
  Bytes out(width == 0 ? size : width, 0);
  if (size) {
    std::size_t written = 0;
    mpz_export(out.data() + (out.size() - size), &written, 1, 1, 1, 0, v.get_mpz_t());
  }
  return out;
}

inline std::string to_hex(ByteView bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

}  // namespace fcslrs
