#pragma once

#include <gmpxx.h>

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fcslrs/accumulator.hpp"
#include "fcslrs/error.hpp"
#include "fcslrs/group_arith.hpp"
#include "fcslrs/hash.hpp"
#include "fcslrs/random.hpp"

namespace fcslrs {

/// Security triple: modulus bits, key-sphere exponent l, sphere radius mu.
struct SecurityLevel {
  unsigned lambda = 0;
  unsigned l = 0;
  unsigned mu = 0;

  friend bool operator==(const SecurityLevel&, const SecurityLevel&) = default;
};

inline void validate_level(const SecurityLevel& level, ParamMode mode) {
  require(level.l % 2 == 0, ErrorCode::parameter_constraint, "l must be even");
  require(level.mu >= 1 && level.mu < level.l / 2, ErrorCode::parameter_constraint,
          "mu must satisfy 1 <= mu < l/2");
  if (mode == ParamMode::secure) {
    require(level.lambda > level.l + 2, ErrorCode::parameter_constraint, "lambda - 2 > l violated");
    require(level.l / 2 > level.mu + 1, ErrorCode::parameter_constraint, "l/2 > mu + 1 violated");
  }
}

/// Default (l, mu) for a modulus size: the largest even l <= min(128,
/// lambda - 4) and mu = l/2 - 2. Smaller l shrinks the key space below what
/// random key generation can draw without collisions.
inline SecurityLevel default_level(unsigned lambda) {
  unsigned l = lambda >= 132 ? 128 : (lambda > 12 ? (lambda - 4) & ~1u : 8);
  return SecurityLevel{lambda, l, l / 2 - 2};
}

struct SystemParams {
  SecurityLevel level;
  ParamMode mode = ParamMode::secure;
  std::string hash_id{kChallengeHashId};
  mpz_class N;
  mpz_class u;  // accumulator base, a generator of QR(N)
  mpz_class g, h, t, y, s, zeta;

  std::size_t element_bytes() const { return (bit_length(N) + 7) / 8; }
  mpz_class quarter() const { return N / 4; }

  AccumulatorParams accumulator() const {
    return AccumulatorParams{N, u, Sphere::make(level.l, level.mu), Sphere::make(level.l / 2, level.mu), mode};
  }

  std::array<const mpz_class*, 7> group_elements() const { return {&u, &g, &h, &t, &y, &s, &zeta}; }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Structural checks any holder of public parameters can run.
inline void validate_params(const SystemParams& params) {
  validate_level(params.level, params.mode);
  require(params.hash_id == kChallengeHashId, ErrorCode::parameter_constraint, "unsupported hash " + params.hash_id);
  require(params.N > 4 && params.N % 2 == 1, ErrorCode::parameter_constraint, "modulus must be odd");
  if (params.mode == ParamMode::secure)
    require(bit_length(params.N) + 1 >= params.level.lambda, ErrorCode::parameter_constraint,
            "modulus shorter than lambda");
  const auto elems = params.group_elements();
  for (std::size_t i = 0; i < elems.size(); ++i) {
    require(*elems[i] > 1 && *elems[i] < params.N, ErrorCode::parameter_constraint, "generator outside (1, N)");
    for (std::size_t j = 0; j < i; ++j)
      require(*elems[i] != *elems[j], ErrorCode::parameter_constraint, "generators must differ pairwise");
  }
}

/// Trusted setup over a caller-supplied rigid modulus (trapdoor required).
/// The six public generators are base^rd_i with rd_i drawn from
/// [2, p'q' - 1]; the trapdoor is wiped before returning.
inline SystemParams setup_with_modulus(RigidModulus modulus, const SecurityLevel& level, ParamMode mode,
                                       Rng& rng, std::optional<mpz_class> base = std::nullopt) {
  validate_level(level, mode);
  require(modulus.has_trapdoor(), ErrorCode::invalid_argument, "setup requires the modulus trapdoor");
  if (base)
    require(is_qr_generator(*base, modulus), ErrorCode::parameter_constraint, "supplied base does not generate QR(N)");
  SystemParams params;
  params.level = level;
  params.mode = mode;
  params.N = modulus.N;
  params.u = base ? *base : find_qr_generator(modulus, rng);

  mpz_class order = modulus.qr_order();
  require(order > 8, ErrorCode::parameter_constraint, "QR(N) too small for seven distinct elements");
  std::array<mpz_class*, 6> derived{&params.g, &params.h, &params.t, &params.y, &params.s, &params.zeta};
  for (std::size_t i = 0; i < derived.size(); ++i) {
    for (std::size_t tries = 0;; ++tries) {
      require(tries < kDefaultAttemptCap, ErrorCode::generation_failure, "generator derivation stuck");
      const mpz_class rd = rng.between(2, order - 1);
      mpz_class candidate = mod_exp(params.u, rd, params.N);
      bool fresh = candidate != 1 && candidate != params.u;
      for (std::size_t j = 0; j < i && fresh; ++j) fresh = candidate != *derived[j];
      if (fresh) {
        *derived[i] = candidate;
        break;
      }
    }
  }
  order = 0;  // trapdoor material
  modulus.destroy_trapdoor();
  validate_params(params);
  return params;
}

/// Init: fresh rigid modulus of lambda bits, then setup_with_modulus.
inline SystemParams init(const SecurityLevel& level, Rng& rng, ParamMode mode = ParamMode::secure) {
  validate_level(level, mode);
  return setup_with_modulus(gen_rigid_modulus(level.lambda, rng, mode), level, mode, rng);
}

/// Secret (p, q) with public key y = 2pq + 1.
struct EndorserKeyPair {
  mpz_class p;
  mpz_class q;
  mpz_class y;

  /// Builds and validates a key pair from explicit primes.
  static EndorserKeyPair from_primes(const SystemParams& params, const mpz_class& p, const mpz_class& q) {
    EndorserKeyPair kp{p, q, 2 * p * q + 1};
    const AccumulatorParams acc = params.accumulator();
    require(check_domain_relation(kp.y, {p, q}, acc), ErrorCode::domain, "(p, q) violates the domain relation");
    require(in_accumulator_domain(acc, kp.y), ErrorCode::domain, "public key outside accumulator domain");
    return kp;
  }

  friend bool operator==(const EndorserKeyPair&, const EndorserKeyPair&) = default;
};

namespace detail {

// Product of the odd primes below 1000, for a one-gcd compositeness filter.
inline const mpz_class& small_prime_product() {
  static const mpz_class product = [] {
    mpz_class acc = 1;
    for (auto sp : small_primes()) {
      if (sp == 2) continue;
      if (sp > 1000) break;
      acc *= sp;
    }
    return acc;
  }();
  return product;
}

inline bool survives_small_primes(const mpz_class& n) {
  if (n < 1000) return true;
  return gcd(n, small_prime_product()) == 1;
}

inline mpz_class ceil_div(const mpz_class& a, const mpz_class& b) {
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

inline mpz_class random_prime_bits(unsigned bits, Rng& rng) {
  const mpz_class lo = mpz_class(1) << (bits - 1);
  for (std::size_t i = 0; i < kDefaultAttemptCap; ++i) {
    const mpz_class c = rng.between(lo, 2 * lo - 1);
    if (is_probable_prime(c)) return c;
  }
  throw Error(ErrorCode::generation_failure, "no prime of requested size");
}

}  // namespace detail

/// Samples q from the half sphere and p so that y = 2pq + 1 is a prime inside
/// the key sphere. In secure mode p is solved for from q (the admissible p
/// window is narrower than one unit, so independent sampling never lands);
/// toy mode draws p as a random l/2-bit prime and skips the key sphere.
inline EndorserKeyPair keygen(const SystemParams& params, Rng& rng, std::size_t max_attempts = std::size_t{1} << 26) {
  const AccumulatorParams acc = params.accumulator();
  const mpz_class quarter = acc.quarter();
  if (params.mode == ParamMode::secure) {
    const Sphere& ks = acc.key_sphere;
    const Sphere& hs = acc.half_sphere;
    // Odd q candidates are taken in sieved windows; only survivors reach
    // bignum arithmetic.
    constexpr std::size_t window = 1u << 14;
    constexpr std::uint32_t sieve_limit = 1u << 15;
    const bool sieve = hs.lo > 2 * mpz_class(sieve_limit);
    std::vector<bool> dead(window);
    std::size_t examined = 0;
    while (examined < max_attempts) {
      mpz_class q0 = rng.between(hs.lo, hs.hi);
      if (q0 % 2 == 0) q0 += 1;
      std::fill(dead.begin(), dead.end(), false);
      if (sieve) {
        for (auto sp : detail::small_primes()) {
          if (sp == 2) continue;
          if (sp >= sieve_limit) break;
          const std::uint64_t r = mpz_fdiv_ui(q0.get_mpz_t(), sp);
          for (std::uint64_t k = (sp - r) % sp * ((sp + 1) / 2) % sp; k < window; k += sp) dead[k] = true;
        }
      }
      for (std::size_t k = 0; k < window; ++k, ++examined) {
        const mpz_class q = q0 + 2 * static_cast<unsigned long>(k);
        if (q > hs.hi) break;
        if (dead[k]) continue;
        const mpz_class twice_q = 2 * q;
        const mpz_class p_lo = detail::ceil_div(ks.lo - 1, twice_q);
        const mpz_class p_hi = (ks.hi - 1) / twice_q;
        for (mpz_class p = p_lo; p <= p_hi; ++p) {
          if (p == q || p < 3 || p % 2 == 0) continue;
          const mpz_class y = twice_q * p + 1;
          if (y >= quarter) continue;
          if (!detail::survives_small_primes(p) || !detail::survives_small_primes(y)) continue;
          if (!detail::fermat_base2(p) || !detail::fermat_base2(y) || !detail::fermat_base2(q)) continue;
          if (is_probable_prime(p) && is_probable_prime(q) && is_probable_prime(y)) return EndorserKeyPair{p, q, y};
        }
      }
    }
    throw Error(ErrorCode::generation_failure, "keygen attempt cap exceeded");
  }
  const unsigned half_bits = params.level.l / 2;
  require(half_bits >= 2, ErrorCode::parameter_constraint, "l too small for key generation");
  for (std::size_t attempt = 0; attempt < std::min<std::size_t>(max_attempts, kDefaultAttemptCap); ++attempt) {
    const mpz_class q = sample_sphere_prime(acc.half_sphere, rng);
    const mpz_class p = detail::random_prime_bits(half_bits, rng);
    if (p == q) continue;
    const mpz_class y = 2 * p * q + 1;
    if (y < quarter && is_probable_prime(y)) return EndorserKeyPair{p, q, y};
  }
  throw Error(ErrorCode::generation_failure, "keygen attempt cap exceeded");
}

/// Per-transaction base g_tid = g^H(tid) mod N.
struct TransactionContext {
  Bytes tid;
  mpz_class tx_exponent;
  mpz_class g_tid;
};

inline TransactionContext context_from_exponent(const SystemParams& params, ByteView tid, const mpz_class& exponent) {
  require(exponent >= 0 && exponent < params.quarter(), ErrorCode::domain, "transaction exponent outside Z_{N/4}");
  TransactionContext ctx{Bytes(tid.begin(), tid.end()), exponent, mod_exp(params.g, exponent, params.N)};
  require(ctx.g_tid != 1, ErrorCode::degenerate_context, "g_tid is the identity");
  return ctx;
}

/// The 128-bit digest of tid is read big-endian. It already lies in Z_{N/4}
/// for every modulus over 130 bits; smaller toy moduli reduce it mod N/4.
inline TransactionContext derive_gtid(const SystemParams& params, ByteView tid) {
  require(!tid.empty(), ErrorCode::invalid_argument, "empty transaction id");
  const mpz_class exponent = from_big_endian(digest128(tid)) % params.quarter();
  return context_from_exponent(params, tid, exponent);
}

struct Tag {
  mpz_class value;
  friend bool operator==(const Tag&, const Tag&) = default;
};

inline Tag gen_tag(const SystemParams& params, const TransactionContext& ctx, const EndorserKeyPair& sk) {
  return Tag{mod_exp(ctx.g_tid, sk.p + sk.q, params.N)};
}

struct RingSignature {
  std::array<mpz_class, 5> T;          // T1..T5
  std::array<mpz_class, 9> u;          // commitments u1..u9
  std::array<mpz_class, 5> responses;  // alpha~1..alpha~5, over the integers
  Tag tag;

  friend bool operator==(const RingSignature&, const RingSignature&) = default;
};

/// Exclusive response bounds: alpha~1, alpha~2, alpha~4 < 2^(lambda+129);
/// alpha~3, alpha~5 < 2^(2*lambda+130).
inline unsigned single_response_bits(const SecurityLevel& level) { return level.lambda + 129; }
inline unsigned double_response_bits(const SecurityLevel& level) { return 2 * level.lambda + 130; }
inline constexpr std::array<bool, 5> kDoubleWidthResponse{false, false, true, false, true};

/// c = H1(m || u1 || ... || u9), each u fixed-width big-endian.
inline mpz_class challenge(const SystemParams& params, ByteView message, std::span<const mpz_class, 9> commitments) {
  Sha3 hasher(Sha3::Kind::shake128_128);
  hasher.update(message);
  const std::size_t width = params.element_bytes();
  for (const auto& c : commitments) hasher.update(to_big_endian(c, width));
  return from_big_endian(hasher.finish());
}

inline RingSignature sign(const SystemParams& params, const AccumulatedValue& acc, const Witness& witness,
                          const EndorserKeyPair& sk, ByteView message, const TransactionContext& ctx, Rng& rng) {
  const mpz_class& N = params.N;
  require(witness.subject_pk == sk.y, ErrorCode::invalid_witness, "witness belongs to another key");
  require(witness_matches(params.accumulator(), witness, acc), ErrorCode::invalid_witness,
          "witness does not open the accumulated value");
  require(ctx.g_tid > 1 && ctx.g_tid < N, ErrorCode::degenerate_context, "invalid g_tid");

  const mpz_class& gt = ctx.g_tid;
  const mpz_class& x = sk.y;
  const mpz_class& e1 = sk.p;
  const mpz_class& e2 = sk.q;
  const mpz_class quarter = params.quarter();
  const mpz_class r = rng.below(quarter);
  const mpz_class a1 = rng.below(quarter);
  const mpz_class a2 = rng.below(quarter);
  const mpz_class a3 = rng.below(quarter);
  auto pw = [&](const mpz_class& b, const mpz_class& e) { return mod_exp(b, e, N); };

  RingSignature sig;
  sig.T[0] = pw(gt, r);
  sig.T[1] = pw(params.h, r) * pw(params.zeta, x + r) % N;
  sig.T[2] = pw(params.s, r) * pw(gt, e2) % N;
  sig.T[3] = witness.w * pw(params.y, r) % N;
  sig.T[4] = pw(params.t, r) * pw(gt, 2 * e1) % N;

  sig.u[0] = pw(gt, a1);
  sig.u[1] = pw(params.zeta, a1 + a2);
  sig.u[2] = pw(params.h, a1);
  sig.u[3] = pw(params.s, a1);  // s^a1: verification checks 5 and 8 expand to this
  sig.u[4] = pw(gt, a3);
  sig.u[5] = pw(witness.w, a2);
  sig.u[6] = pw(gt, 2 * e1 * a3);
  sig.u[7] = pw(params.t, a1);
  sig.u[8] = pw(gt, a2);

  const mpz_class c = challenge(params, message, sig.u);
  sig.responses[0] = a1 + c * r;
  sig.responses[1] = a2 + c * x;
  sig.responses[2] = r * sig.responses[1];
  sig.responses[3] = a3 + c * e2;
  sig.responses[4] = r * sig.responses[3];
  sig.tag = gen_tag(params, ctx, sk);
  return sig;
}

inline RingSignature sign(const SystemParams& params, const AccumulatedValue& acc, const Witness& witness,
                          const EndorserKeyPair& sk, ByteView message, ByteView tid, Rng& rng) {
  return sign(params, acc, witness, sk, message, derive_gtid(params, tid), rng);
}

enum class RejectReason {
  none,
  degenerate_context,
  element_out_of_range,
  response_out_of_bounds,
  equation_failed,
};

constexpr std::string_view to_string(RejectReason r) noexcept {
  switch (r) {
    case RejectReason::none: return "accept";
    case RejectReason::degenerate_context: return "degenerate transaction context";
    case RejectReason::element_out_of_range: return "group element out of range";
    case RejectReason::response_out_of_bounds: return "response out of bounds";
    case RejectReason::equation_failed: return "verification equation failed";
  }
  return "unknown";
}

struct VerifyResult {
  RejectReason reason = RejectReason::none;
  int failed_equation = 0;  // 1..8 when reason == equation_failed

  bool accepted() const noexcept { return reason == RejectReason::none; }
  explicit operator bool() const noexcept { return accepted(); }
};

inline VerifyResult verify(const SystemParams& params, const AccumulatedValue& acc, ByteView message,
                           const TransactionContext& ctx, const RingSignature& sig) {
  const mpz_class& N = params.N;
  if (ctx.g_tid <= 1 || ctx.g_tid >= N) return {RejectReason::degenerate_context};
  auto in_group = [&](const mpz_class& e) { return e >= 1 && e < N; };
  for (const auto& e : sig.T)
    if (!in_group(e)) return {RejectReason::element_out_of_range};
  for (const auto& e : sig.u)
    if (!in_group(e)) return {RejectReason::element_out_of_range};
  if (!in_group(sig.tag.value) || !in_group(acc.v)) return {RejectReason::element_out_of_range};
  for (std::size_t i = 0; i < sig.responses.size(); ++i) {
    const unsigned limit = kDoubleWidthResponse[i] ? double_response_bits(params.level) : single_response_bits(params.level);
    if (sig.responses[i] < 0 || bit_length(sig.responses[i]) > limit) return {RejectReason::response_out_of_bounds};
  }

  const mpz_class c = challenge(params, message, sig.u);
  const mpz_class& gt = ctx.g_tid;
  const auto& [T1, T2, T3, T4, T5] = sig.T;
  const auto& u = sig.u;
  const auto& a = sig.responses;
  auto pw = [&](const mpz_class& b, const mpz_class& e) { return mod_exp(b, e, N); };
  auto mul = [&](std::initializer_list<mpz_class> fs) {
    mpz_class acc_value = 1;
    for (const auto& f : fs) acc_value = acc_value * f % N;
    return acc_value;
  };

  const std::array<bool, 8> holds{
      pw(gt, a[0]) == mul({u[0], pw(T1, c)}),
      mul({pw(params.zeta, a[1] + a[0]), pw(params.h, a[0])}) == mul({u[1], u[2], pw(T2, c)}),
      pw(gt, a[2]) == pw(T1, a[1]),
      pw(gt, a[4]) == pw(T1, a[3]),
      mul({pw(gt, a[3]), pw(params.s, a[0])}) == mul({pw(T3, c), u[3], u[4]}),
      mul({u[5], pw(acc.v, c), pw(params.y, a[2])}) == pw(T4, a[1]),
      mul({pw(params.t, a[4]), pw(gt, a[1]), u[6]}) == mul({pw(T5, a[3]), u[8], pw(gt, c)}),
      mul({pw(sig.tag.value, 2 * c), pw(params.s, 2 * a[0]), pw(params.t, a[0])}) ==
          mul({pw(T3 * T3 % N * T5 % N, c), u[3] * u[3] % N, u[7]}),
  };
  for (std::size_t i = 0; i < holds.size(); ++i)
    if (!holds[i]) return {RejectReason::equation_failed, static_cast<int>(i + 1)};
  return {};
}

inline VerifyResult verify(const SystemParams& params, const AccumulatedValue& acc, ByteView message, ByteView tid,
                           const RingSignature& sig) {
  if (tid.empty()) return {RejectReason::degenerate_context};
  try {
    return verify(params, acc, message, derive_gtid(params, tid), sig);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::degenerate_context) return {RejectReason::degenerate_context};
    throw;
  }
}

enum class LinkResult { linked, unlinked };

/// Caller contract: both signatures verified for the same tid.
inline LinkResult link(const RingSignature& a, const RingSignature& b) {
  return a.tag == b.tag ? LinkResult::linked : LinkResult::unlinked;
}

}  // namespace fcslrs
