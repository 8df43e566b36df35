#pragma once

#include <gmpxx.h>
#include <openssl/rand.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "fcslrs/error.hpp"

namespace fcslrs {

/// Injectable randomness source.
///
/// A seeded instance is a reproducible Mersenne-Twister stream (tests,
/// benchmarks); an unseeded instance draws from the OpenSSL CSPRNG.
/// One instance must not be shared between threads; use fork().
class Rng {
 public:
  static Rng seeded(std::uint64_t seed) { return Rng(seed); }
  static Rng system() { return Rng(); }

  bool deterministic() const noexcept { return state_ != nullptr; }

  /// Uniform integer in [0, bound).
  mpz_class below(const mpz_class& bound) {
    require(bound > 0, ErrorCode::invalid_argument, "random bound must be positive");
    if (state_) return state_->get_z_range(bound);
    const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    for (;;) {
      mpz_class candidate = system_bits(bits);
      if (candidate < bound) return candidate;
    }
  }

  /// Uniform integer in [lo, hi].
  mpz_class between(const mpz_class& lo, const mpz_class& hi) {
    require(lo <= hi, ErrorCode::invalid_argument, "empty random interval");
    return lo + below(hi - lo + 1);
  }

  /// Uniform integer with at most `bits` bits.
  mpz_class bits(std::size_t bits) {
    if (bits == 0) return 0;
    if (state_) return state_->get_z_bits(static_cast<unsigned long>(bits));
    return system_bits(bits);
  }

  std::uint64_t next_u64() {
    mpz_class v = bits(64);
    std::uint64_t out = 0;
    mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
    return out;
  }

  std::vector<std::uint8_t> bytes(std::size_t count) {
    std::vector<std::uint8_t> out(count);
    for (auto& b : out) b = static_cast<std::uint8_t>(bits(8).get_ui());
    return out;
  }

  /// Independent stream for use on another thread.
  Rng fork() { return state_ ? Rng(next_u64()) : Rng(); }

 private:
  Rng() = default;
  explicit Rng(std::uint64_t seed) : state_(std::make_unique<gmp_randclass>(gmp_randinit_mt)) {
    state_->seed(mpz_class(std::to_string(seed)));
  }

  static mpz_class system_bits(std::size_t bits) {
    std::vector<unsigned char> buf((bits + 7) / 8);
    if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1)
      throw Error(ErrorCode::generation_failure, "system randomness unavailable");
    mpz_class v;
    mpz_import(v.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
    const std::size_t excess = buf.size() * 8 - bits;
    if (excess) v >>= excess;
    return v;
  }

  std::unique_ptr<gmp_randclass> state_;
};

}  // namespace fcslrs
