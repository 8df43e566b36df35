#pragma once

#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

#include "fcslrs.hpp"

namespace fcslrs::testing {

// Independent references: schoolbook arithmetic on 64-bit integers.

inline std::uint64_t naive_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t acc = 1 % mod;
  for (std::uint64_t i = 0; i < exp; ++i) acc = static_cast<std::uint64_t>((unsigned __int128)acc * base % mod);
  return acc;
}

inline bool trial_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::uint64_t brute_order(std::uint64_t x, std::uint64_t mod) {
  std::uint64_t acc = x % mod;
  for (std::uint64_t k = 1; k <= mod; ++k) {
    if (acc == 1) return k;
    acc = static_cast<std::uint64_t>((unsigned __int128)acc * x % mod);
  }
  return 0;
}

inline std::uint64_t to_u64(const mpz_class& v) { return mpz_get_ui(v.get_mpz_t()); }

// N = 23 * 47; QR(N) has order 11 * 23 = 253 and is generated by 4.
inline RigidModulus toy_modulus() {
  return RigidModulus::from_primes(SafePrime::from(23), SafePrime::from(47), ParamMode::insecure_toy);
}

inline SecurityLevel toy_level() { return SecurityLevel{12, 4, 1}; }

inline SystemParams toy_params(std::uint64_t seed = 1) {
  Rng rng = Rng::seeded(seed);
  return setup_with_modulus(toy_modulus(), toy_level(), ParamMode::insecure_toy, rng, mpz_class(4));
}

struct Fixture {
  SystemParams params;
  std::vector<EndorserKeyPair> keys;

  std::vector<mpz_class> ring(std::size_t n) const {
    std::vector<mpz_class> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(keys[i].y);
    return out;
  }
};

inline Fixture make_fixture(unsigned lambda, std::size_t keys, std::uint64_t seed) {
  Rng rng = Rng::seeded(seed);
  Fixture fx{init(default_level(lambda), rng), {}};
  for (std::size_t i = 0; i < keys; ++i) fx.keys.push_back(keygen(fx.params, rng));
  return fx;
}

// Shared toy-secure parameters (lambda = 64, l = 60, mu = 28) with 16 keys.
inline const Fixture& small_fixture() {
  static const Fixture fx = make_fixture(64, 16, 2024);
  return fx;
}

// lambda = 512 parameters with 8 keys.
inline const Fixture& medium_fixture() {
  static const Fixture fx = make_fixture(512, 8, 512);
  return fx;
}

inline Bytes text(std::string_view s) { return Bytes(s.begin(), s.end()); }

}  // namespace fcslrs::testing
