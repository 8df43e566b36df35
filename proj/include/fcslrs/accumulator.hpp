#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <set>
#include <span>
#include <utility>

#include "fcslrs/error.hpp"
#include "fcslrs/group_arith.hpp"

namespace fcslrs {

/// Public description of the RSA accumulator with one-way domain.
struct AccumulatorParams {
  mpz_class N;
  mpz_class u;
  Sphere key_sphere;   // S(2^l, 2^mu)
  Sphere half_sphere;  // S(2^(l/2), 2^mu)
  ParamMode mode = ParamMode::secure;

  /// floor(N / 4): exclusive upper end of the exponent domain Z_{N/4}.
  mpz_class quarter() const { return N / 4; }
};

struct AccumulatedValue {
  mpz_class v;
  std::size_t member_count = 0;

  friend bool operator==(const AccumulatedValue&, const AccumulatedValue&) = default;
};

struct Witness {
  mpz_class w;
  mpz_class subject_pk;

  friend bool operator==(const Witness&, const Witness&) = default;
};

/// f(base, x) = base^x mod N for x in Z_{N/4}.
inline mpz_class acc_eval(const AccumulatorParams& params, const mpz_class& base, const mpz_class& x) {
  require(x >= 0 && x < params.quarter(), ErrorCode::domain, "exponent outside Z_{N/4}");
  require(base >= 1 && base < params.N, ErrorCode::domain, "accumulator base outside [1, N)");
  return mod_exp(base, x, params.N);
}

/// Membership in the accumulator value domain. Secure mode additionally
/// requires the key sphere; toy mode only needs a prime inside Z_{N/4}.
inline bool in_accumulator_domain(const AccumulatorParams& params, const mpz_class& pk) {
  if (pk < 2 || pk >= params.quarter()) return false;
  if (params.mode == ParamMode::secure && !params.key_sphere.contains(pk)) return false;
  return is_probable_prime(pk);
}

namespace detail {

inline void check_members(const AccumulatorParams& params, std::span<const mpz_class> pks) {
  std::set<mpz_class> seen;
  for (const auto& pk : pks) {
    require(in_accumulator_domain(params, pk), ErrorCode::domain,
            "public key outside accumulator domain: " + pk.get_str(16));
    require(seen.insert(pk).second, ErrorCode::duplicate_member, "duplicate public key " + pk.get_str(16));
  }
}

// Strictly sequential iterated exponentiation, optionally skipping one key.
inline mpz_class fold(const AccumulatorParams& params, std::span<const mpz_class> pks,
                      const mpz_class* skip) {
  mpz_class acc = params.u;
  for (const auto& pk : pks) {
    if (skip && pk == *skip) continue;
    acc = acc_eval(params, acc, pk);
  }
  return acc;
}

}  // namespace detail

/// v = (...((u^y1)^y2)...)^yn mod N. The empty ring accumulates to u.
inline AccumulatedValue accumulate(const AccumulatorParams& params, std::span<const mpz_class> pks) {
  detail::check_members(params, pks);
  return AccumulatedValue{detail::fold(params, pks, nullptr), pks.size()};
}

/// Accumulation of every key except `subject_pk`.
inline Witness gen_witness(const AccumulatorParams& params, std::span<const mpz_class> pks,
                           const mpz_class& subject_pk) {
  detail::check_members(params, pks);
  require(std::find(pks.begin(), pks.end(), subject_pk) != pks.end(), ErrorCode::not_a_member,
          "subject key is not in the ring");
  return Witness{detail::fold(params, pks, &subject_pk), subject_pk};
}

inline bool witness_matches(const AccumulatorParams& params, const Witness& witness,
                            const AccumulatedValue& acc) {
  if (witness.w < 1 || witness.w >= params.N) return false;
  if (witness.subject_pk < 0 || witness.subject_pk >= params.quarter()) return false;
  return mod_exp(witness.w, witness.subject_pk, params.N) == acc.v;
}

/// One-way domain relation: pk = 2 * e1 * e2 + 1 with e1 != e2 prime, pk
/// prime, and (secure mode) e2 in the half sphere and pk in the key sphere.
inline bool check_domain_relation(const mpz_class& pk, const std::pair<mpz_class, mpz_class>& sk_pair,
                                  const AccumulatorParams& params) {
  const auto& [e1, e2] = sk_pair;
  if (e1 == e2) return false;
  if (pk != 2 * e1 * e2 + 1) return false;
  if (!is_probable_prime(e1) || !is_probable_prime(e2) || !is_probable_prime(pk)) return false;
  if (params.mode == ParamMode::secure) {
    if (!params.half_sphere.contains(e2) || !params.key_sphere.contains(pk)) return false;
  }
  return true;
}

}  // namespace fcslrs
