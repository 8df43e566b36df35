#include "support.hpp"

using namespace fcslrs;
using namespace fcslrs::testing;

namespace {

struct Signed {
  AccumulatedValue v;
  Bytes message;
  Bytes tid;
  RingSignature sig;
};

Signed sign_with(const Fixture& fx, std::size_t n, std::size_t signer, std::string_view msg, std::string_view tid,
                 Rng& rng) {
  const AccumulatorParams acc = fx.params.accumulator();
  const auto ring = fx.ring(n);
  Signed s{accumulate(acc, ring), text(msg), text(tid), {}};
  const Witness w = gen_witness(acc, ring, fx.keys[signer].y);
  s.sig = sign(fx.params, s.v, w, fx.keys[signer], s.message, s.tid, rng);
  return s;
}

bool accepts(const Fixture& fx, const Signed& s, const RingSignature& sig) {
  return verify(fx.params, s.v, s.message, s.tid, sig).accepted();
}

}  // namespace

TEST(Hash, KnownAnswers) {
  EXPECT_EQ(to_hex(digest128(text(""))), "7f9c2ba4e88f827d616045507605853e");
  EXPECT_EQ(to_hex(digest128(text("abc"))), "5881092dd818bf5cf8a3ddb793fbcba7");
  EXPECT_EQ(to_hex(sha3_256(text(""))), "a7ffc6f8bf1ed76651c14756a061d662f580ff4de43b49fa82d80a4b80f8434a");
  EXPECT_EQ(to_hex(sha3_256(text("abc"))), "3a985da74fe225b2045c172d6bd390bd855f086e3e9d525b46bfe24511431532");
}

TEST(Hash, BigEndianCodec) {
  EXPECT_EQ(to_big_endian(0x0102, 4), (Bytes{0, 0, 1, 2}));
  EXPECT_EQ(to_big_endian(0), Bytes{});
  EXPECT_EQ(from_big_endian(Bytes{0, 1, 0}), 256);
  EXPECT_THROW(to_big_endian(0x10000, 2), Error);
}

TEST(Level, Validation) {
  EXPECT_NO_THROW(validate_level({1024, 512, 254}, ParamMode::secure));
  EXPECT_NO_THROW(validate_level({1024, 128, 62}, ParamMode::secure));
  EXPECT_THROW(validate_level({1024, 511, 100}, ParamMode::secure), Error);  // odd l
  EXPECT_THROW(validate_level({1024, 128, 64}, ParamMode::secure), Error);   // mu >= l/2
  EXPECT_THROW(validate_level({1024, 128, 63}, ParamMode::secure), Error);   // l/2 > mu + 1 fails
  EXPECT_THROW(validate_level({514, 512, 254}, ParamMode::secure), Error);   // lambda - 2 > l fails
  EXPECT_NO_THROW(validate_level({515, 512, 254}, ParamMode::secure));
  EXPECT_NO_THROW(validate_level(toy_level(), ParamMode::insecure_toy));
  EXPECT_THROW(validate_level(toy_level(), ParamMode::secure), Error);
  EXPECT_EQ(default_level(64), (SecurityLevel{64, 60, 28}));
  EXPECT_EQ(default_level(130), (SecurityLevel{130, 126, 61}));
  EXPECT_EQ(default_level(512), (SecurityLevel{512, 128, 62}));
  EXPECT_EQ(default_level(2048), (SecurityLevel{2048, 128, 62}));
}

TEST(Setup, ToyModulusWithFixedBase) {
  const SystemParams p = toy_params();
  EXPECT_EQ(p.N, 1081);
  EXPECT_EQ(p.u, 4);
  EXPECT_EQ(p.element_bytes(), 2u);
  const RigidModulus m = toy_modulus();
  for (const mpz_class* e : p.group_elements()) EXPECT_TRUE(is_quadratic_residue(*e, m)) << *e;
  Rng rng = Rng::seeded(1);
  EXPECT_THROW(setup_with_modulus(toy_modulus(), toy_level(), ParamMode::insecure_toy, rng, mpz_class(1080)), Error);
  EXPECT_THROW(setup_with_modulus(toy_modulus().public_part(), toy_level(), ParamMode::insecure_toy, rng), Error);
}

TEST(Setup, InitElementsDistinct) {
  const SystemParams& p = small_fixture().params;
  EXPECT_NO_THROW(validate_params(p));
  EXPECT_GE(bit_length(p.N) + 1, 64u);
  SystemParams broken = p;
  broken.h = broken.g;
  EXPECT_THROW(validate_params(broken), Error);
  broken = p;
  broken.zeta = 1;
  EXPECT_THROW(validate_params(broken), Error);
}

TEST(Setup, SpecExampleLevel) {
  Rng rng = Rng::seeded(21);
  const SystemParams p = init({1024, 512, 254}, rng);
  EXPECT_EQ(p.level.l, 512u);
  EXPECT_EQ(p.element_bytes(), 128u);
}

TEST(Keygen, SecureKeysSatisfyDomain) {
  const Fixture& fx = small_fixture();
  const AccumulatorParams acc = fx.params.accumulator();
  for (const auto& k : fx.keys) {
    EXPECT_EQ(k.y, 2 * k.p * k.q + 1);
    EXPECT_TRUE(check_domain_relation(k.y, {k.p, k.q}, acc));
    EXPECT_TRUE(in_accumulator_domain(acc, k.y));
    EXPECT_TRUE(trial_prime(to_u64(k.p)) && trial_prime(to_u64(k.q)));
  }
  const Fixture& big = medium_fixture();
  for (const auto& k : big.keys) EXPECT_TRUE(in_accumulator_domain(big.params.accumulator(), k.y));
}

TEST(Keygen, ToyKeysEnumerated) {
  const SystemParams p = toy_params();
  Rng rng = Rng::seeded(2);
  for (int i = 0; i < 30; ++i) {
    const EndorserKeyPair k = keygen(p, rng);
    EXPECT_TRUE(k.y == 13 || k.y == 31) << k.y;
  }
}

TEST(Keygen, FromPrimes) {
  const SystemParams p = toy_params();
  EXPECT_EQ(EndorserKeyPair::from_primes(p, 3, 5).y, 31);
  EXPECT_THROW(EndorserKeyPair::from_primes(p, 3, 3), Error);
  EXPECT_THROW(EndorserKeyPair::from_primes(p, 4, 5), Error);
  EXPECT_THROW(EndorserKeyPair::from_primes(p, 5, 37), Error);  // y = 371 >= N/4
}

TEST(Context, Derivation) {
  const SystemParams p = toy_params();
  const TransactionContext ctx = derive_gtid(p, text("tid-1"));
  EXPECT_EQ(ctx.tx_exponent, 129);
  EXPECT_EQ(to_u64(ctx.g_tid), naive_pow(to_u64(p.g), 129, 1081));
  EXPECT_EQ(derive_gtid(p, text("tid-1")).g_tid, ctx.g_tid);
  try {
    derive_gtid(p, Bytes{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
  try {
    context_from_exponent(p, text("x"), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_context);
  }
  EXPECT_THROW(context_from_exponent(p, text("x"), 270), Error);
}

TEST(Tag, FrozenToyValue) {
  SystemParams p = toy_params();
  p.g = 4;
  const TransactionContext ctx = context_from_exponent(p, text("x"), 8);
  EXPECT_EQ(ctx.g_tid, 676);
  const EndorserKeyPair k = EndorserKeyPair::from_primes(p, 3, 5);
  EXPECT_EQ(gen_tag(p, ctx, k).value, 1048);
}

TEST(Challenge, FixedWidthEncoding) {
  const SystemParams p = toy_params();
  std::array<mpz_class, 9> u;
  for (int i = 0; i < 9; ++i) u[i] = i + 1;
  const mpz_class c = challenge(p, text("abc"), u);
  EXPECT_EQ(c, mpz_class("31529616974330706126818824814132475019"));
  EXPECT_LE(bit_length(c), 128u);
  u[8] = 10;
  EXPECT_NE(challenge(p, text("abc"), u), c);
}

TEST(Sign, ToyModulusRoundTrip) {
  const SystemParams p = toy_params();
  const AccumulatorParams acc = p.accumulator();
  const EndorserKeyPair a = EndorserKeyPair::from_primes(p, 2, 3);
  const EndorserKeyPair b = EndorserKeyPair::from_primes(p, 3, 5);
  const std::vector<mpz_class> ring{a.y, b.y};
  const AccumulatedValue v = accumulate(acc, ring);
  Rng rng = Rng::seeded(3);
  for (int i = 0; i < 50; ++i) {
    const Bytes tid = text("toy-" + std::to_string(i));
    TransactionContext ctx;
    try {
      ctx = derive_gtid(p, tid);
    } catch (const Error&) {
      continue;
    }
    const RingSignature sig = sign(p, v, gen_witness(acc, ring, b.y), b, text("m"), ctx, rng);
    EXPECT_TRUE(verify(p, v, text("m"), ctx, sig).accepted());
  }
}

TEST(Sign, HonestRoundsAccept) {
  Rng rng = Rng::seeded(4);
  const Fixture& fx = small_fixture();
  for (std::size_t n : {1u, 2u, 5u, 16u})
    for (std::size_t signer = 0; signer < n; signer += 3) {
      const Signed s = sign_with(fx, n, signer, "payload", "tx-" + std::to_string(n), rng);
      EXPECT_TRUE(accepts(fx, s, s.sig)) << n << "/" << signer;
    }
  const Fixture& big = medium_fixture();
  for (std::size_t signer = 0; signer < 8; ++signer) {
    const Signed s = sign_with(big, 8, signer, "payload", "tx", rng);
    EXPECT_TRUE(accepts(big, s, s.sig));
  }
}

TEST(Sign, ResponsesWithinBounds) {
  Rng rng = Rng::seeded(5);
  const Fixture& fx = medium_fixture();
  for (int i = 0; i < 10; ++i) {
    const Signed s = sign_with(fx, 4, i % 4, "m", "t", rng);
    for (std::size_t j = 0; j < 5; ++j) {
      const unsigned bound = kDoubleWidthResponse[j] ? double_response_bits(fx.params.level)
                                                     : single_response_bits(fx.params.level);
      EXPECT_LE(bit_length(s.sig.responses[j]), bound);
      EXPECT_GE(s.sig.responses[j], 0);
    }
  }
}

TEST(Sign, RandomizedButTagDeterministic) {
  Rng rng = Rng::seeded(6);
  const Fixture& fx = small_fixture();
  const Signed a = sign_with(fx, 4, 1, "m", "t", rng);
  const Signed b = sign_with(fx, 4, 1, "m", "t", rng);
  EXPECT_NE(a.sig.u, b.sig.u);
  EXPECT_NE(a.sig.responses, b.sig.responses);
  EXPECT_EQ(a.sig.tag, b.sig.tag);
  EXPECT_EQ(link(a.sig, b.sig), LinkResult::linked);
  EXPECT_EQ(a.sig.tag, gen_tag(fx.params, derive_gtid(fx.params, a.tid), fx.keys[1]));
}

TEST(Sign, LinkingSeparatesSignersAndTransactions) {
  Rng rng = Rng::seeded(7);
  const Fixture& fx = small_fixture();
  const Signed base = sign_with(fx, 4, 0, "m", "t", rng);
  EXPECT_EQ(link(base.sig, sign_with(fx, 4, 1, "m", "t", rng).sig), LinkResult::unlinked);
  EXPECT_EQ(link(base.sig, sign_with(fx, 4, 0, "m", "t2", rng).sig), LinkResult::unlinked);
  EXPECT_EQ(link(base.sig, sign_with(fx, 4, 0, "other", "t", rng).sig), LinkResult::linked);
}

TEST(Sign, WitnessMismatchRejected) {
  Rng rng = Rng::seeded(8);
  const Fixture& fx = small_fixture();
  const AccumulatorParams acc = fx.params.accumulator();
  const auto ring = fx.ring(4);
  const AccumulatedValue v = accumulate(acc, ring);
  const Witness w0 = gen_witness(acc, ring, fx.keys[0].y);
  try {
    sign(fx.params, v, w0, fx.keys[1], text("m"), text("t"), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_witness);
  }
  const AccumulatedValue other = accumulate(acc, fx.ring(5));
  EXPECT_THROW(sign(fx.params, other, w0, fx.keys[0], text("m"), text("t"), rng), Error);
}

TEST(Verify, TamperClassesRejected) {
  Rng rng = Rng::seeded(9);
  const Fixture& fx = small_fixture();
  const mpz_class& N = fx.params.N;
  for (int trial = 0; trial < 5; ++trial) {
    const Signed s = sign_with(fx, 6, trial, "message", "tid", rng);
    ASSERT_TRUE(accepts(fx, s, s.sig));

    Signed flipped = s;
    flipped.message[trial % flipped.message.size()] ^= 1;
    EXPECT_FALSE(accepts(fx, flipped, s.sig));

    RingSignature t = s.sig;
    t.tag = sign_with(fx, 6, (trial + 1) % 6, "message", "tid", rng).sig.tag;
    EXPECT_FALSE(accepts(fx, s, t));

    for (std::size_t i = 0; i < 5; ++i) {
      t = s.sig;
      t.T[i] = t.T[i] * fx.params.g % N;
      EXPECT_FALSE(accepts(fx, s, t)) << "T" << i + 1;
      t = s.sig;
      t.responses[i] += 1;
      EXPECT_FALSE(accepts(fx, s, t)) << "response " << i + 1;
    }
    for (std::size_t i = 0; i < 9; ++i) {
      t = s.sig;
      t.u[i] = t.u[i] * fx.params.g % N;
      EXPECT_FALSE(accepts(fx, s, t)) << "u" << i + 1;
    }
  }
}

TEST(Verify, StructuralRejections) {
  Rng rng = Rng::seeded(10);
  const Fixture& fx = small_fixture();
  const Signed s = sign_with(fx, 3, 0, "m", "t", rng);
  RingSignature t = s.sig;
  t.T[0] = 0;
  EXPECT_EQ(verify(fx.params, s.v, s.message, s.tid, t).reason, RejectReason::element_out_of_range);
  t = s.sig;
  t.u[4] = fx.params.N;
  EXPECT_EQ(verify(fx.params, s.v, s.message, s.tid, t).reason, RejectReason::element_out_of_range);
  t = s.sig;
  t.responses[1] = -1;
  EXPECT_EQ(verify(fx.params, s.v, s.message, s.tid, t).reason, RejectReason::response_out_of_bounds);
  t = s.sig;
  t.responses[2] = mpz_class(1) << double_response_bits(fx.params.level);
  EXPECT_EQ(verify(fx.params, s.v, s.message, s.tid, t).reason, RejectReason::response_out_of_bounds);
  EXPECT_EQ(verify(fx.params, s.v, s.message, Bytes{}, s.sig).reason, RejectReason::degenerate_context);
  const AccumulatedValue wrong = accumulate(fx.params.accumulator(), fx.ring(4));
  EXPECT_EQ(verify(fx.params, wrong, s.message, s.tid, s.sig).reason, RejectReason::equation_failed);
  EXPECT_FALSE(verify(fx.params, s.v, s.message, text("t2"), s.sig).accepted());
}

TEST(Verify, RandomTranscriptsRejected) {
  Rng rng = Rng::seeded(11);
  const Fixture& fx = small_fixture();
  const AccumulatedValue v = accumulate(fx.params.accumulator(), fx.ring(4));
  const TransactionContext ctx = derive_gtid(fx.params, text("t"));
  const unsigned single = single_response_bits(fx.params.level);
  for (int i = 0; i < 2000; ++i) {
    RingSignature r;
    for (auto& e : r.T) e = rng.between(1, fx.params.N - 1);
    for (auto& e : r.u) e = rng.between(1, fx.params.N - 1);
    for (std::size_t j = 0; j < 5; ++j) r.responses[j] = rng.bits(kDoubleWidthResponse[j] ? 2 * single : single);
    r.tag.value = rng.between(1, fx.params.N - 1);
    EXPECT_FALSE(verify(fx.params, v, text("m"), ctx, r).accepted());
  }
}
