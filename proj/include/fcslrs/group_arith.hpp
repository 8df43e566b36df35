#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fcslrs/error.hpp"
#include "fcslrs/random.hpp"

namespace fcslrs {

/// `secure` enforces every size floor and sphere constraint. `insecure_toy`
/// relaxes them so tiny moduli (e.g. N = 23 * 47) can drive oracle tests.
enum class ParamMode : std::uint8_t { secure = 0, insecure_toy = 1 };

inline constexpr int kPrimalityRounds = 64;
inline constexpr std::size_t kDefaultAttemptCap = std::size_t{1} << 20;

inline bool is_probable_prime(const mpz_class& n, int rounds = kPrimalityRounds) {
  if (n < 2) return false;
  return mpz_probab_prime_p(n.get_mpz_t(), rounds) != 0;
}

inline std::size_t bit_length(const mpz_class& n) {
  return n == 0 ? 0 : mpz_sizeinbase(n.get_mpz_t(), 2);
}

/// Square-and-multiply modular exponentiation (GMP mpz_powm).
inline mpz_class mod_exp(const mpz_class& base, const mpz_class& exponent, const mpz_class& modulus) {
  require(exponent >= 0, ErrorCode::invalid_argument, "negative exponent");
  require(modulus > 0, ErrorCode::invalid_argument, "non-positive modulus");
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(), modulus.get_mpz_t());
  return out;
}

inline mpz_class gcd(const mpz_class& a, const mpz_class& b) {
  mpz_class out;
  mpz_gcd(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

struct SafePrime {
  mpz_class p;
  mpz_class p_half;

  /// Validates p = 2 * p_half + 1 with both halves prime.
  static SafePrime from(const mpz_class& p, int rounds = kPrimalityRounds) {
    SafePrime sp{p, (p - 1) / 2};
    require(p > 5 && p % 2 == 1, ErrorCode::parameter_constraint, "safe prime must be odd and > 5");
    require(is_probable_prime(sp.p, rounds) && is_probable_prime(sp.p_half, rounds),
            ErrorCode::parameter_constraint, "not a safe prime: " + p.get_str());
    return sp;
  }

  friend bool operator==(const SafePrime&, const SafePrime&) = default;
};

struct RigidModulus {
  mpz_class N;
  std::optional<std::pair<SafePrime, SafePrime>> trapdoor;

  static RigidModulus from_primes(const SafePrime& p, const SafePrime& q,
                                  ParamMode mode = ParamMode::secure) {
    require(p.p != q.p, ErrorCode::parameter_constraint, "rigid modulus factors must differ");
    if (mode == ParamMode::secure)
      require(bit_length(p.p) == bit_length(q.p), ErrorCode::parameter_constraint,
              "rigid modulus factors must have equal bit length");
    return RigidModulus{p.p * q.p, std::make_pair(p, q)};
  }

  std::size_t bits() const { return bit_length(N); }
  bool has_trapdoor() const noexcept { return trapdoor.has_value(); }

  /// |QR(N)| = p' * q'. Only available while the trapdoor is held.
  mpz_class qr_order() const {
    require(has_trapdoor(), ErrorCode::invalid_argument, "group order requires the trapdoor");
    return trapdoor->first.p_half * trapdoor->second.p_half;
  }

  RigidModulus public_part() const { return RigidModulus{N, std::nullopt}; }

  void destroy_trapdoor() {
    if (!trapdoor) return;
    // Overwrite limbs before release; mpz_clear alone leaves them in the heap.
    for (mpz_class* v : {&trapdoor->first.p, &trapdoor->first.p_half, &trapdoor->second.p,
                         &trapdoor->second.p_half}) {
      mpz_ptr raw = v->get_mpz_t();
      const auto limbs = static_cast<mp_size_t>(mpz_size(raw));
      if (limbs > 0) {
        mp_limb_t* data = mpz_limbs_modify(raw, limbs);
        std::fill(data, data + limbs, mp_limb_t{0});
      }
      mpz_limbs_finish(raw, 0);
    }
    trapdoor.reset();
  }
};

/// Integer interval S(2^l, 2^mu) = [2^l - 2^mu + 1, 2^l + 2^mu - 1].
struct Sphere {
  unsigned l = 0;
  unsigned mu = 0;
  mpz_class lo;
  mpz_class hi;

  static Sphere make(unsigned l, unsigned mu) {
    require(mu >= 1 && mu < l, ErrorCode::parameter_constraint, "sphere needs 1 <= mu < l");
    Sphere s{l, mu, 0, 0};
    mpz_class center, radius;
    mpz_ui_pow_ui(center.get_mpz_t(), 2, l);
    mpz_ui_pow_ui(radius.get_mpz_t(), 2, mu);
    s.lo = center - radius + 1;
    s.hi = center + radius - 1;
    return s;
  }

  bool contains(const mpz_class& x) const { return x >= lo && x <= hi; }
  mpz_class cardinality() const { return hi - lo + 1; }

  friend bool operator==(const Sphere& a, const Sphere& b) { return a.l == b.l && a.mu == b.mu; }
};

namespace detail {

inline const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> table = [] {
    constexpr std::uint32_t limit = 1u << 16;
    std::vector<bool> composite(limit, false);
    std::vector<std::uint32_t> primes;
    for (std::uint32_t i = 2; i < limit; ++i) {
      if (composite[i]) continue;
      primes.push_back(i);
      for (std::uint64_t j = std::uint64_t{i} * i; j < limit; j += i) composite[j] = true;
    }
    return primes;
  }();
  return table;
}

inline bool fermat_base2(const mpz_class& n) {
  mpz_class r;
  mpz_class e = n - 1;
  mpz_class two = 2;
  mpz_powm(r.get_mpz_t(), two.get_mpz_t(), e.get_mpz_t(), n.get_mpz_t());
  return r == 1;
}

inline std::uint64_t mod_ui(const mpz_class& n, std::uint32_t m) {
  return mpz_fdiv_ui(n.get_mpz_t(), m);
}

// Safe primes below 64 bits: plain rejection sampling on the half.
inline std::optional<SafePrime> small_safe_prime(unsigned bits, Rng& rng, std::size_t cap) {
  const mpz_class lo = mpz_class(1) << (bits - 2);
  const mpz_class hi = (mpz_class(1) << (bits - 1)) - 1;
  for (std::size_t i = 0; i < cap; ++i) {
    mpz_class half = rng.between(lo, hi);
    if (half % 2 == 0) half += 1;
    if (half > hi) half = lo + 1;
    if (half % 2 == 0 || half < 3) continue;
    if (is_probable_prime(half) && is_probable_prime(2 * half + 1)) return SafePrime{2 * half + 1, half};
  }
  return std::nullopt;
}

// Sieves a window of odd candidates h = h0 + 2k, removing every k for which a
// small prime divides h or 2h + 1.
inline std::optional<SafePrime> sieved_safe_prime(unsigned bits, Rng& rng, std::size_t cap) {
  constexpr std::size_t window = 1u << 14;
  const auto& primes = small_primes();
  const mpz_class lo = mpz_class(1) << (bits - 2);
  const mpz_class limit = mpz_class(1) << (bits - 1);
  std::vector<bool> dead(window);
  for (std::size_t attempt = 0; attempt < cap; ++attempt) {
    mpz_class h0 = lo + rng.below(lo);
    if (h0 % 2 == 0) h0 += 1;
    std::fill(dead.begin(), dead.end(), false);
    for (std::size_t idx = 1; idx < primes.size(); ++idx) {
      const std::uint64_t sp = primes[idx];
      const std::uint64_t r = mod_ui(h0, static_cast<std::uint32_t>(sp));
      const std::uint64_t inv2 = (sp + 1) / 2;
      const std::uint64_t inv4 = inv2 * inv2 % sp;
      const std::uint64_t k1 = (sp - r) % sp * inv2 % sp;
      const std::uint64_t k2 = (sp - (2 * r + 1) % sp) % sp * inv4 % sp;
      for (std::uint64_t k = k1; k < window; k += sp) dead[k] = true;
      for (std::uint64_t k = k2; k < window; k += sp) dead[k] = true;
    }
    for (std::size_t k = 0; k < window; ++k) {
      if (dead[k]) continue;
      mpz_class half = h0 + 2 * static_cast<unsigned long>(k);
      if (half >= limit) break;
      if (!fermat_base2(half)) continue;
      mpz_class p = 2 * half + 1;
      if (!fermat_base2(p)) continue;
      if (is_probable_prime(half) && is_probable_prime(p)) return SafePrime{p, half};
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Random safe prime of exactly `bits` bits whose Sophie-Germain half is odd.
inline SafePrime gen_safe_prime(unsigned bits, Rng& rng, ParamMode mode = ParamMode::secure,
                                std::size_t max_attempts = kDefaultAttemptCap) {
  require(bits >= (mode == ParamMode::secure ? 16u : 3u), ErrorCode::parameter_constraint,
          "safe prime bit length below floor: " + std::to_string(bits));
  auto found = bits < 64 ? detail::small_safe_prime(bits, rng, max_attempts)
                         : detail::sieved_safe_prime(bits, rng, std::max<std::size_t>(max_attempts >> 10, 64));
  if (!found) throw Error(ErrorCode::generation_failure, "safe prime search exhausted");
  return *found;
}

/// N = p * q for distinct safe primes of lambda/2 bits each. Trapdoor retained.
inline RigidModulus gen_rigid_modulus(unsigned lambda, Rng& rng, ParamMode mode = ParamMode::secure,
                                      std::size_t max_attempts = 64) {
  require(lambda % 2 == 0, ErrorCode::parameter_constraint, "modulus bit length must be even");
  require(lambda >= (mode == ParamMode::secure ? 32u : 6u), ErrorCode::parameter_constraint,
          "modulus bit length below floor: " + std::to_string(lambda));
  const SafePrime p = gen_safe_prime(lambda / 2, rng, mode);
  for (std::size_t i = 0; i < max_attempts; ++i) {
    SafePrime q = gen_safe_prime(lambda / 2, rng, mode);
    if (q.p != p.p) return RigidModulus::from_primes(p, q, mode);
  }
  throw Error(ErrorCode::generation_failure, "could not find two distinct safe primes");
}

/// Quadratic residuosity via the factor Legendre symbols (trapdoor required).
inline bool is_quadratic_residue(const mpz_class& x, const RigidModulus& modulus) {
  require(modulus.has_trapdoor(), ErrorCode::invalid_argument, "residuosity test requires the trapdoor");
  if (gcd(x, modulus.N) != 1) return false;
  const auto& [p, q] = *modulus.trapdoor;
  return mpz_legendre(x.get_mpz_t(), p.p.get_mpz_t()) == 1 &&
         mpz_legendre(x.get_mpz_t(), q.p.get_mpz_t()) == 1;
}

/// Generator test for QR(N) when N is a product of distinct safe primes:
/// u in QR(N), u != 1 and gcd(u - 1, N) = 1.
inline bool is_qr_generator(const mpz_class& u, const RigidModulus& modulus) {
  if (u <= 1 || u >= modulus.N) return false;
  return is_quadratic_residue(u, modulus) && gcd(u - 1, modulus.N) == 1;
}

inline mpz_class find_qr_generator(const RigidModulus& modulus, Rng& rng,
                                   std::size_t max_attempts = kDefaultAttemptCap) {
  require(modulus.has_trapdoor(), ErrorCode::invalid_argument, "generator search requires the trapdoor");
  for (std::size_t i = 0; i < max_attempts; ++i) {
    const mpz_class a = rng.between(2, modulus.N - 1);
    if (gcd(a, modulus.N) != 1) continue;
    const mpz_class u = a * a % modulus.N;
    if (u != 1 && gcd(u - 1, modulus.N) == 1) return u;
  }
  throw Error(ErrorCode::generation_failure, "no QR(N) generator found");
}

/// Random prime inside the closed sphere interval.
inline mpz_class sample_sphere_prime(const Sphere& sphere, Rng& rng,
                                     std::size_t max_attempts = kDefaultAttemptCap) {
  const mpz_class size = sphere.cardinality();
  if (size <= static_cast<unsigned long>(max_attempts)) {
    // Small sphere: scan every member once from a random offset.
    const mpz_class start = rng.below(size);
    for (mpz_class i = 0; i < size; ++i) {
      mpz_class candidate = sphere.lo + (start + i) % size;
      if (is_probable_prime(candidate)) return candidate;
    }
    throw Error(ErrorCode::no_prime_in_sphere, "sphere S(2^" + std::to_string(sphere.l) + ", 2^" +
                                                   std::to_string(sphere.mu) + ") holds no prime");
  }
  for (std::size_t i = 0; i < max_attempts; ++i) {
    mpz_class candidate = sphere.lo + rng.below(size);
    if (candidate % 2 == 0) candidate += (candidate < sphere.hi) ? 1 : -1;
    if (is_probable_prime(candidate)) return candidate;
  }
  throw Error(ErrorCode::no_prime_in_sphere, "sphere prime search exhausted");
}

}  // namespace fcslrs
