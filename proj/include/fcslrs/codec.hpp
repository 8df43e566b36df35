#pragma once

// Binary wire format. Every record is
//
//   magic[4] | version u8 | body
//
// with big-endian fixed-width scalars and u32 length prefixes on every
// variable field. Group elements are padded to the modulus byte width so a
// signature's length depends on lambda alone. docs/wire_format.md has the
// field-by-field layouts.

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "fcslrs/accumulator.hpp"
#include "fcslrs/error.hpp"
#include "fcslrs/hash.hpp"
#include "fcslrs/messages.hpp"
#include "fcslrs/scheme.hpp"

namespace fcslrs::codec {

inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kMaxField = std::size_t{1} << 24;

using Magic = std::array<char, 4>;
inline constexpr Magic kParamsMagic{'F', 'P', 'R', 'M'};
inline constexpr Magic kKeyPairMagic{'F', 'K', 'E', 'Y'};
inline constexpr Magic kAccumulatedMagic{'F', 'A', 'C', 'C'};
inline constexpr Magic kWitnessMagic{'F', 'W', 'I', 'T'};
inline constexpr Magic kSignatureMagic{'F', 'S', 'I', 'G'};
inline constexpr Magic kProposeMagic{'F', 'P', 'R', 'P'};
inline constexpr Magic kTranProposalMagic{'F', 'T', 'P', 'R'};
inline constexpr Magic kResponseMagic{'F', 'R', 'S', 'P'};
inline constexpr Magic kKeyDatabaseMagic{'F', 'K', 'D', 'B'};

class Writer {
 public:
  Writer& header(const Magic& magic) {
    out_.insert(out_.end(), magic.begin(), magic.end());
    return u8(kVersion);
  }
  Writer& u8(std::uint8_t v) {
    out_.push_back(v);
    return *this;
  }
  Writer& u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
  }
  Writer& u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
  }
  Writer& bytes(ByteView data) {
    require(data.size() <= kMaxField, ErrorCode::encode, "field too large");
    u32(static_cast<std::uint32_t>(data.size()));
    out_.insert(out_.end(), data.begin(), data.end());
    return *this;
  }
  Writer& text(std::string_view s) { return bytes(as_bytes(s)); }
  /// Length-prefixed big-endian integer; width 0 means minimal encoding.
  Writer& integer(const mpz_class& v, std::size_t width = 0) { return bytes(to_big_endian(v, width)); }

  Bytes take() && { return std::move(out_); }
  const Bytes& view() const noexcept { return out_; }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  void header(const Magic& magic) {
    need(magic.size() + 1);
    if (std::memcmp(data_.data() + pos_, magic.data(), magic.size()) != 0)
      throw DecodeError(pos_, "bad magic, expected " + std::string(magic.begin(), magic.end()));
    pos_ += magic.size();
    const std::uint8_t version = data_[pos_];
    if (version != kVersion) throw DecodeError(pos_, "unsupported version " + std::to_string(version));
    ++pos_;
  }
  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }
  ByteView bytes() {
    const std::size_t at = pos_;
    const std::uint32_t len = u32();
    if (len > kMaxField) throw DecodeError(at, "field length overflow");
    need(len);
    ByteView out = data_.subspan(pos_, len);
    pos_ += len;
    return out;
  }
  std::string text() {
    ByteView b = bytes();
    return std::string(b.begin(), b.end());
  }
  /// Reads a length-prefixed integer. With width > 0 the field must be
  /// exactly that long; with width 0 it must be minimal (no leading zero).
  mpz_class integer(std::size_t width = 0) {
    const std::size_t at = pos_;
    ByteView b = bytes();
    if (width > 0 && b.size() != width)
      throw DecodeError(at, "integer width " + std::to_string(b.size()) + " != " + std::to_string(width));
    if (width == 0 && !b.empty() && b.front() == 0) throw DecodeError(at, "non-minimal integer");
    return from_big_endian(b);
  }
  std::size_t position() const noexcept { return pos_; }
  void finish() const {
    if (pos_ != data_.size()) throw DecodeError(pos_, "trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw DecodeError(pos_, "truncated record");
  }

  ByteView data_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// SystemParams

inline Bytes encode(const SystemParams& params) {
  Writer w;
  w.header(kParamsMagic)
      .u8(static_cast<std::uint8_t>(params.mode))
      .u32(params.level.lambda)
      .u32(params.level.l)
      .u32(params.level.mu)
      .text(params.hash_id)
      .integer(params.N);
  for (const mpz_class* e : params.group_elements()) w.integer(*e, params.element_bytes());
  return std::move(w).take();
}

inline SystemParams decode_params(ByteView data) {
  Reader r(data);
  r.header(kParamsMagic);
  SystemParams params;
  const std::size_t mode_at = r.position();
  const std::uint8_t mode = r.u8();
  if (mode > 1) throw DecodeError(mode_at, "unknown parameter mode");
  params.mode = static_cast<ParamMode>(mode);
  params.level.lambda = r.u32();
  params.level.l = r.u32();
  params.level.mu = r.u32();
  params.hash_id = r.text();
  params.N = r.integer();
  if (params.N < 5) throw DecodeError(r.position(), "modulus too small");
  std::array<mpz_class*, 7> elems{&params.u, &params.g, &params.h, &params.t, &params.y, &params.s, &params.zeta};
  for (mpz_class* e : elems) *e = r.integer(params.element_bytes());
  r.finish();
  try {
    validate_params(params);
  } catch (const Error& e) {
    throw DecodeError(r.position(), std::string("invalid parameters: ") + e.what());
  }
  return params;
}

// ---------------------------------------------------------------------------
// Endorser key pair (secret)

inline Bytes encode(const EndorserKeyPair& kp) {
  Writer w;
  w.header(kKeyPairMagic).integer(kp.p).integer(kp.q).integer(kp.y);
  return std::move(w).take();
}

inline EndorserKeyPair decode_keypair(ByteView data) {
  Reader r(data);
  r.header(kKeyPairMagic);
  EndorserKeyPair kp;
  kp.p = r.integer();
  kp.q = r.integer();
  kp.y = r.integer();
  r.finish();
  if (kp.y != 2 * kp.p * kp.q + 1) throw DecodeError(r.position(), "public key is not 2pq + 1");
  return kp;
}

// ---------------------------------------------------------------------------
// Accumulated value and witness

inline Bytes encode(const AccumulatedValue& acc, const SystemParams& params) {
  Writer w;
  const std::size_t width = params.element_bytes();
  w.header(kAccumulatedMagic).u32(static_cast<std::uint32_t>(width)).u32(static_cast<std::uint32_t>(acc.member_count));
  w.integer(acc.v, width);
  return std::move(w).take();
}

inline AccumulatedValue decode_accumulated(ByteView data, const SystemParams& params) {
  Reader r(data);
  r.header(kAccumulatedMagic);
  const std::size_t at = r.position();
  if (r.u32() != params.element_bytes()) throw DecodeError(at, "element width does not match parameters");
  AccumulatedValue acc;
  acc.member_count = r.u32();
  acc.v = r.integer(params.element_bytes());
  r.finish();
  return acc;
}

inline Bytes encode(const Witness& wit, const SystemParams& params) {
  Writer w;
  const std::size_t width = params.element_bytes();
  w.header(kWitnessMagic).u32(static_cast<std::uint32_t>(width)).integer(wit.w, width).integer(wit.subject_pk);
  return std::move(w).take();
}

inline Witness decode_witness(ByteView data, const SystemParams& params) {
  Reader r(data);
  r.header(kWitnessMagic);
  const std::size_t at = r.position();
  if (r.u32() != params.element_bytes()) throw DecodeError(at, "element width does not match parameters");
  Witness wit;
  wit.w = r.integer(params.element_bytes());
  wit.subject_pk = r.integer();
  r.finish();
  return wit;
}

// ---------------------------------------------------------------------------
// Ring signature: lambda u32 | width u32 | T1..T5 | u1..u9 | a~1..a~5 | tag

inline std::size_t response_bytes(const SecurityLevel& level, std::size_t index) {
  return ((kDoubleWidthResponse[index] ? double_response_bits(level) : single_response_bits(level)) + 7) / 8;
}

inline void write_signature(Writer& w, const RingSignature& sig, const SystemParams& params) {
  const std::size_t width = params.element_bytes();
  w.header(kSignatureMagic).u32(params.level.lambda).u32(static_cast<std::uint32_t>(width));
  for (const auto& e : sig.T) w.integer(e, width);
  for (const auto& e : sig.u) w.integer(e, width);
  for (std::size_t i = 0; i < sig.responses.size(); ++i) w.integer(sig.responses[i], response_bytes(params.level, i));
  w.integer(sig.tag.value, width);
}

inline RingSignature read_signature(Reader& r, const SystemParams& params) {
  r.header(kSignatureMagic);
  std::size_t at = r.position();
  if (r.u32() != params.level.lambda) throw DecodeError(at, "signature lambda does not match parameters");
  at = r.position();
  const std::size_t width = params.element_bytes();
  if (r.u32() != width) throw DecodeError(at, "element width does not match parameters");
  RingSignature sig;
  for (auto& e : sig.T) e = r.integer(width);
  for (auto& e : sig.u) e = r.integer(width);
  for (std::size_t i = 0; i < sig.responses.size(); ++i) sig.responses[i] = r.integer(response_bytes(params.level, i));
  sig.tag.value = r.integer(width);
  return sig;
}

inline Bytes encode(const RingSignature& sig, const SystemParams& params) {
  Writer w;
  write_signature(w, sig, params);
  return std::move(w).take();
}

inline RingSignature decode_signature(ByteView data, const SystemParams& params) {
  Reader r(data);
  RingSignature sig = read_signature(r, params);
  r.finish();
  return sig;
}

/// Exact encoded signature length for the given parameters.
inline std::size_t signature_size(const SystemParams& params) {
  const std::size_t width = params.element_bytes();
  std::size_t total = 4 + 1 + 4 + 4 + 15 * (4 + width);
  for (std::size_t i = 0; i < 5; ++i) total += 4 + response_bytes(params.level, i);
  return total;
}

// ---------------------------------------------------------------------------
// Flow messages

inline Bytes encode(const ProposeMessage& msg) {
  Writer w;
  w.header(kProposeMagic)
      .text(msg.tx.client_id)
      .text(msg.tx.chaincode_id)
      .bytes(msg.tx.payload)
      .u64(msg.tx.timestamp)
      .bytes(msg.tx.client_sig);
  w.u8(msg.anchor ? 1 : 0);
  if (msg.anchor) {
    w.u32(static_cast<std::uint32_t>(msg.anchor->size()));
    for (const auto& [key, version] : *msg.anchor) w.text(key).u64(version);
  }
  return std::move(w).take();
}

inline ProposeMessage decode_propose(ByteView data) {
  Reader r(data);
  r.header(kProposeMagic);
  ProposeMessage msg;
  msg.tx.client_id = r.text();
  msg.tx.chaincode_id = r.text();
  ByteView payload = r.bytes();
  msg.tx.payload.assign(payload.begin(), payload.end());
  msg.tx.timestamp = r.u64();
  ByteView sig = r.bytes();
  msg.tx.client_sig.assign(sig.begin(), sig.end());
  const std::size_t flag_at = r.position();
  const std::uint8_t has_anchor = r.u8();
  if (has_anchor > 1) throw DecodeError(flag_at, "bad anchor flag");
  if (has_anchor) {
    msg.anchor.emplace();
    const std::uint32_t count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::size_t at = r.position();
      std::string key = r.text();
      const std::uint64_t version = r.u64();
      // Keys must be strictly increasing, matching the map's encode order.
      if (!msg.anchor->empty() && key <= msg.anchor->rbegin()->first)
        throw DecodeError(at, "anchor keys out of order");
      msg.anchor->emplace(std::move(key), version);
    }
  }
  r.finish();
  return msg;
}

inline void write_tran_proposal(Writer& w, const TranProposal& tp) {
  w.header(kTranProposalMagic).bytes(tp.tid).text(tp.chaincode_id).bytes(tp.tx_content_blob);
  w.u32(static_cast<std::uint32_t>(tp.readset.size()));
  for (const auto& item : tp.readset) w.text(item.key).u64(item.version);
  w.u32(static_cast<std::uint32_t>(tp.writeset.size()));
  for (const auto& item : tp.writeset) w.text(item.key).bytes(item.value);
}

inline TranProposal read_tran_proposal(Reader& r) {
  r.header(kTranProposalMagic);
  TranProposal tp;
  ByteView tid = r.bytes();
  tp.tid.assign(tid.begin(), tid.end());
  tp.chaincode_id = r.text();
  ByteView blob = r.bytes();
  tp.tx_content_blob.assign(blob.begin(), blob.end());
  const std::uint32_t reads = r.u32();
  for (std::uint32_t i = 0; i < reads; ++i) {
    ReadItem item;
    item.key = r.text();
    item.version = r.u64();
    tp.readset.push_back(std::move(item));
  }
  const std::uint32_t writes = r.u32();
  for (std::uint32_t i = 0; i < writes; ++i) {
    WriteItem item;
    item.key = r.text();
    ByteView value = r.bytes();
    item.value.assign(value.begin(), value.end());
    tp.writeset.push_back(std::move(item));
  }
  return tp;
}

/// Canonical bytes of a proposal body; this is the message m that endorsers sign.
inline Bytes encode(const TranProposal& tp) {
  Writer w;
  write_tran_proposal(w, tp);
  return std::move(w).take();
}

inline TranProposal decode_tran_proposal(ByteView data) {
  Reader r(data);
  TranProposal tp = read_tran_proposal(r);
  r.finish();
  return tp;
}

/// Canonical bytes of the (readset, writeset) pair, used for grouping.
inline Bytes encode_rw_sets(const TranProposal& tp) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(tp.readset.size()));
  for (const auto& item : tp.readset) w.text(item.key).u64(item.version);
  w.u32(static_cast<std::uint32_t>(tp.writeset.size()));
  for (const auto& item : tp.writeset) w.text(item.key).bytes(item.value);
  return std::move(w).take();
}

inline Bytes encode(const ProposalResponse& resp, const SystemParams& params) {
  require(resp.tag == resp.signature.tag, ErrorCode::encode, "response tag differs from signature tag");
  Writer w;
  w.header(kResponseMagic).bytes(resp.tid);
  write_tran_proposal(w, resp.tran_proposal);
  write_signature(w, resp.signature, params);
  w.integer(resp.tag.value, params.element_bytes());
  return std::move(w).take();
}

inline ProposalResponse decode_response(ByteView data, const SystemParams& params) {
  Reader r(data);
  r.header(kResponseMagic);
  ProposalResponse resp;
  ByteView tid = r.bytes();
  resp.tid.assign(tid.begin(), tid.end());
  resp.tran_proposal = read_tran_proposal(r);
  resp.signature = read_signature(r, params);
  const std::size_t tag_at = r.position();
  resp.tag.value = r.integer(params.element_bytes());
  r.finish();
  if (resp.tag != resp.signature.tag) throw DecodeError(tag_at, "response tag differs from signature tag");
  return resp;
}

// ---------------------------------------------------------------------------
// Files

inline Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::io, "short write to " + path);
}

}  // namespace fcslrs::codec
