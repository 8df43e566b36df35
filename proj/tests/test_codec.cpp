#include <cstdio>
#include <filesystem>
#include <functional>

#include "support.hpp"

using namespace fcslrs;
using namespace fcslrs::testing;

namespace {

std::string random_text(Rng& rng, std::size_t max_len) {
  const std::size_t len = rng.below(max_len + 1).get_ui();
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<char>(rng.between(0, 255).get_ui()));
  return s;
}

TranProposal random_proposal(Rng& rng) {
  TranProposal tp;
  tp.tid = rng.bytes(32);
  tp.chaincode_id = random_text(rng, 12);
  tp.tx_content_blob = rng.bytes(rng.below(64).get_ui());
  for (std::size_t i = rng.below(4).get_ui(); i > 0; --i) tp.readset.push_back({random_text(rng, 8), rng.next_u64()});
  for (std::size_t i = rng.below(4).get_ui(); i > 0; --i)
    tp.writeset.push_back({random_text(rng, 8), rng.bytes(rng.below(16).get_ui())});
  return tp;
}

ProposeMessage random_propose(Rng& rng) {
  ProposeMessage m;
  m.tx = Transaction{random_text(rng, 10), random_text(rng, 10), rng.bytes(rng.below(100).get_ui()), rng.next_u64(),
                     rng.bytes(rng.below(40).get_ui())};
  if (rng.below(2) == 1) {
    m.anchor.emplace();
    for (std::size_t i = rng.below(5).get_ui(); i > 0; --i) (*m.anchor)[random_text(rng, 6)] = rng.next_u64();
  }
  return m;
}

RingSignature random_signature(const SystemParams& p, Rng& rng) {
  RingSignature s;
  for (auto& e : s.T) e = rng.below(p.N);
  for (auto& e : s.u) e = rng.below(p.N);
  for (std::size_t i = 0; i < 5; ++i)
    s.responses[i] = rng.bits(kDoubleWidthResponse[i] ? double_response_bits(p.level) : single_response_bits(p.level));
  s.tag.value = rng.below(p.N);
  return s;
}

// Every strict prefix must fail with a decode error.
void expect_prefixes_fail(const Bytes& full, const std::function<void(ByteView)>& decode) {
  for (std::size_t len = 0; len < full.size(); ++len) {
    try {
      decode(ByteView(full).first(len));
      ADD_FAILURE() << "prefix of length " << len << " decoded";
      return;
    } catch (const DecodeError& e) {
      EXPECT_LE(e.position(), len);
    }
  }
  Bytes longer = full;
  longer.push_back(0);
  EXPECT_THROW(decode(longer), DecodeError);
}

}  // namespace

TEST(Codec, ParamsRoundTrip) {
  for (const SystemParams* p : {&small_fixture().params, &medium_fixture().params}) {
    const Bytes b = codec::encode(*p);
    EXPECT_EQ(codec::decode_params(b), *p);
    EXPECT_EQ(codec::encode(codec::decode_params(b)), b);
  }
  const SystemParams toy = toy_params();
  EXPECT_EQ(codec::decode_params(codec::encode(toy)), toy);
}

TEST(Codec, ParamsLayout) {
  const SystemParams toy = toy_params();
  const Bytes b = codec::encode(toy);
  // magic, version, mode, lambda, l, mu
  EXPECT_EQ(Bytes(b.begin(), b.begin() + 18), (Bytes{'F', 'P', 'R', 'M', 1, 1, 0, 0, 0, 12, 0, 0, 0, 4, 0, 0, 0, 1}));
  const std::size_t expected = 4 + 1 + 1 + 12 + (4 + 12) + (4 + 2) + 7 * (4 + 2);
  EXPECT_EQ(b.size(), expected);
}

TEST(Codec, ParamsRejectInvalid) {
  SystemParams p = toy_params();
  p.h = p.g;
  EXPECT_THROW(codec::decode_params(codec::encode(p)), DecodeError);
  Bytes b = codec::encode(toy_params());
  b[0] = 'X';
  try {
    codec::decode_params(b);
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.position(), 0u);
  }
  b = codec::encode(toy_params());
  b[4] = 2;
  EXPECT_THROW(codec::decode_params(b), DecodeError);
  expect_prefixes_fail(codec::encode(toy_params()), [](ByteView v) { codec::decode_params(v); });
}

TEST(Codec, KeysAccumulatorWitness) {
  const Fixture& fx = small_fixture();
  const AccumulatorParams acc = fx.params.accumulator();
  const auto ring = fx.ring(5);
  const AccumulatedValue v = accumulate(acc, ring);
  const Witness w = gen_witness(acc, ring, ring[2]);
  for (const auto& k : fx.keys) EXPECT_EQ(codec::decode_keypair(codec::encode(k)), k);
  EXPECT_EQ(codec::decode_accumulated(codec::encode(v, fx.params), fx.params), v);
  EXPECT_EQ(codec::decode_witness(codec::encode(w, fx.params), fx.params), w);
  expect_prefixes_fail(codec::encode(fx.keys[0]), [](ByteView b) { codec::decode_keypair(b); });
  expect_prefixes_fail(codec::encode(v, fx.params), [&](ByteView b) { codec::decode_accumulated(b, fx.params); });
  expect_prefixes_fail(codec::encode(w, fx.params), [&](ByteView b) { codec::decode_witness(b, fx.params); });
  // Width mismatch against other parameters.
  EXPECT_THROW(codec::decode_accumulated(codec::encode(v, fx.params), medium_fixture().params), DecodeError);
  EndorserKeyPair bad = fx.keys[0];
  bad.y += 2;
  EXPECT_THROW(codec::decode_keypair(codec::encode(bad)), DecodeError);
}

TEST(Codec, NonMinimalIntegerRejected) {
  codec::Writer w;
  w.header(codec::kKeyPairMagic).bytes(Bytes{0, 3}).integer(5).integer(31);
  EXPECT_THROW(codec::decode_keypair(w.view()), DecodeError);
}

TEST(Codec, FieldLengthOverflow) {
  Bytes b{'F', 'K', 'E', 'Y', 1, 0x7f, 0xff, 0xff, 0xff, 1};
  try {
    codec::decode_keypair(b);
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.position(), 5u);
  }
}

TEST(Codec, SignatureSizeConstant) {
  Rng rng = Rng::seeded(1);
  const Fixture& fx = small_fixture();
  const AccumulatorParams acc = fx.params.accumulator();
  const std::size_t expected = codec::signature_size(fx.params);
  for (std::size_t n : {1u, 2u, 8u, 16u}) {
    const auto ring = fx.ring(n);
    const AccumulatedValue v = accumulate(acc, ring);
    const RingSignature sig =
        sign(fx.params, v, gen_witness(acc, ring, ring[0]), fx.keys[0], text("m"), text("t"), rng);
    const Bytes b = codec::encode(sig, fx.params);
    EXPECT_EQ(b.size(), expected) << n;
    EXPECT_EQ(codec::decode_signature(b, fx.params), sig);
  }
  // A small response still encodes at full width.
  RingSignature tiny = random_signature(fx.params, rng);
  tiny.responses[0] = 1;
  tiny.T[0] = 1;
  EXPECT_EQ(codec::encode(tiny, fx.params).size(), expected);
  expect_prefixes_fail(codec::encode(tiny, fx.params), [&](ByteView b) { codec::decode_signature(b, fx.params); });
  EXPECT_THROW(codec::decode_signature(codec::encode(tiny, fx.params), medium_fixture().params), DecodeError);
}

TEST(Codec, FuzzRoundTrip) {
  Rng rng = Rng::seeded(2);
  const SystemParams& p = small_fixture().params;
  std::size_t records = 0;
  for (int i = 0; i < 2500; ++i) {
    const ProposeMessage m = random_propose(rng);
    const Bytes mb = codec::encode(m);
    EXPECT_EQ(codec::decode_propose(mb), m);
    EXPECT_EQ(codec::encode(codec::decode_propose(mb)), mb);

    const TranProposal tp = random_proposal(rng);
    const Bytes tb = codec::encode(tp);
    EXPECT_EQ(codec::decode_tran_proposal(tb), tp);

    const RingSignature s = random_signature(p, rng);
    EXPECT_EQ(codec::decode_signature(codec::encode(s, p), p), s);

    const ProposalResponse r{tp.tid, tp, s, s.tag};
    const Bytes rb = codec::encode(r, p);
    EXPECT_EQ(codec::decode_response(rb, p), r);
    EXPECT_EQ(codec::encode(codec::decode_response(rb, p), p), rb);
    records += 4;
  }
  EXPECT_GE(records, 10000u);
}

TEST(Codec, FuzzTruncationAndGarbage) {
  Rng rng = Rng::seeded(3);
  const SystemParams& p = small_fixture().params;
  for (int i = 0; i < 30; ++i) {
    const TranProposal tp = random_proposal(rng);
    const RingSignature s = random_signature(p, rng);
    expect_prefixes_fail(codec::encode(random_propose(rng)), [](ByteView b) { codec::decode_propose(b); });
    expect_prefixes_fail(codec::encode(tp), [](ByteView b) { codec::decode_tran_proposal(b); });
    expect_prefixes_fail(codec::encode(ProposalResponse{tp.tid, tp, s, s.tag}, p),
                         [&](ByteView b) { codec::decode_response(b, p); });
  }
  // Random bytes either decode to a record that re-encodes identically or fail cleanly.
  for (int i = 0; i < 5000; ++i) {
    Bytes junk = rng.bytes(rng.below(80).get_ui());
    if (rng.below(2) == 1 && junk.size() > 5) {
      std::copy_n("FTPR", 4, junk.begin());
      junk[4] = 1;
    }
    try {
      const TranProposal tp = codec::decode_tran_proposal(junk);
      EXPECT_EQ(codec::encode(tp), junk);
    } catch (const DecodeError&) {
    }
  }
}

TEST(Codec, ResponseTagMustMatch) {
  Rng rng = Rng::seeded(4);
  const SystemParams& p = small_fixture().params;
  const TranProposal tp = random_proposal(rng);
  const RingSignature s = random_signature(p, rng);
  ProposalResponse r{tp.tid, tp, s, Tag{s.tag.value + 1}};
  EXPECT_THROW(codec::encode(r, p), Error);
  r.tag = s.tag;
  Bytes b = codec::encode(r, p);
  b.back() ^= 1;
  EXPECT_THROW(codec::decode_response(b, p), DecodeError);
}

TEST(Codec, AnchorOrderEnforced) {
  ProposeMessage m;
  m.tx.payload = text("x");
  m.anchor = std::map<std::string, std::uint64_t>{{"a", 1}, {"b", 2}};
  Bytes b = codec::encode(m);
  // Swap the two single-byte keys in place.
  auto a_at = std::find(b.end() - 30, b.end(), 'a');
  auto b_at = std::find(a_at, b.end(), 'b');
  std::iter_swap(a_at, b_at);
  EXPECT_THROW(codec::decode_propose(b), DecodeError);
}

TEST(KeyDatabase, AddRevokeActive) {
  const Fixture& fx = small_fixture();
  KeyDatabase db(fx.params);
  for (std::size_t i = 0; i < 5; ++i) db.add(fx.keys[i].y, "e" + std::to_string(i));
  try {
    db.add(fx.keys[1].y, "again");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::duplicate_member);
  }
  try {
    db.revoke(fx.keys[9].y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_key);
  }
  const AccumulatorParams acc = fx.params.accumulator();
  const mpz_class before = accumulate(acc, db.active_keys()).v;
  db.revoke(fx.keys[2].y);
  const auto active = db.active_keys();
  EXPECT_EQ(active.size(), 4u);
  EXPECT_EQ(std::count(active.begin(), active.end(), fx.keys[2].y), 0);
  const mpz_class after = accumulate(acc, active).v;
  EXPECT_NE(after, before);
  std::vector<mpz_class> remaining{fx.keys[0].y, fx.keys[1].y, fx.keys[3].y, fx.keys[4].y};
  EXPECT_EQ(after, accumulate(acc, remaining).v);
  EXPECT_EQ(db.entries().size(), 5u);
  EXPECT_TRUE(db.bound_to(fx.params));
  EXPECT_FALSE(db.bound_to(medium_fixture().params));
}

TEST(KeyDatabase, ToyRevocationMatchesNaive) {
  const SystemParams p = toy_params();
  KeyDatabase db(p);
  for (int y : {13, 31, 71}) db.add(y, "");
  db.revoke(31);
  EXPECT_EQ(to_u64(accumulate(p.accumulator(), db.active_keys()).v), naive_pow(naive_pow(4, 13, 1081), 71, 1081));
}

TEST(KeyDatabase, FileRoundTrip) {
  const Fixture& fx = small_fixture();
  KeyDatabase db(fx.params);
  for (std::size_t i = 0; i < 3; ++i) db.add(fx.keys[i].y, "label " + std::to_string(i));
  db.revoke(fx.keys[0].y);
  const auto path = (std::filesystem::temp_directory_path() / "fcslrs_keydb_test.db").string();
  db.save(path);
  const KeyDatabase loaded = KeyDatabase::load(path);
  std::remove(path.c_str());
  EXPECT_EQ(loaded.entries(), db.entries());
  EXPECT_EQ(loaded.bound_params_digest(), db.bound_params_digest());
  expect_prefixes_fail(db.encode(), [](ByteView b) { KeyDatabase::decode(b); });
  EXPECT_THROW(KeyDatabase::load("/nonexistent/dir/keys.db"), Error);
}
