#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fcslrs/accumulator.hpp"
#include "fcslrs/codec.hpp"
#include "fcslrs/error.hpp"
#include "fcslrs/messages.hpp"
#include "fcslrs/random.hpp"
#include "fcslrs/scheme.hpp"

namespace fcslrs::endorse {

/// t-out-of-n policy over a fixed ring.
struct EndorsementPolicy {
  std::vector<mpz_class> ring;
  AccumulatedValue v;
  std::size_t threshold = 1;

  static EndorsementPolicy make(const SystemParams& params, std::vector<mpz_class> ring, std::size_t threshold) {
    require(threshold >= 1 && threshold <= ring.size(), ErrorCode::invalid_argument,
            "threshold must satisfy 1 <= t <= n");
    AccumulatedValue v = accumulate(params.accumulator(), ring);
    return EndorsementPolicy{std::move(ring), std::move(v), threshold};
  }
};

enum class Decision { accept, reject };

constexpr std::string_view to_string(Decision d) noexcept { return d == Decision::accept ? "accept" : "reject"; }

struct ResponseOutcome {
  bool valid = false;
  std::string reason;
};

struct PolicyVerdict {
  Decision decision = Decision::reject;
  std::size_t valid_count = 0;
  std::size_t distinct_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> link_pairs;
  std::vector<ResponseOutcome> per_signature;
};

/// Verifies every response, groups the valid ones by identical
/// (readset, writeset) bytes, link-tests pairs inside the group with the most
/// distinct tags and accepts iff that count reaches the threshold.
inline PolicyVerdict evaluate_policy(const SystemParams& params, const EndorsementPolicy& policy, ByteView tid,
                                     const std::vector<ProposalResponse>& responses) {
  for (const auto& r : responses)
    require(std::equal(r.tid.begin(), r.tid.end(), tid.begin(), tid.end()), ErrorCode::invalid_argument,
            "responses carry mixed transaction ids");

  PolicyVerdict verdict;
  verdict.per_signature.resize(responses.size());
  std::optional<TransactionContext> ctx;
  try {
    ctx = derive_gtid(params, tid);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::degenerate_context) throw;
  }

  std::map<Bytes, std::vector<std::size_t>> groups;
  std::vector<Bytes> group_order;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const ProposalResponse& r = responses[i];
    ResponseOutcome& out = verdict.per_signature[i];
    if (!ctx) {
      out.reason = std::string(to_string(RejectReason::degenerate_context));
      continue;
    }
    if (r.tag != r.signature.tag) {
      out.reason = "tag field differs from signature tag";
      continue;
    }
    if (r.tran_proposal.tid != r.tid) {
      out.reason = "proposal body names another transaction";
      continue;
    }
    const VerifyResult result = verify(params, policy.v, codec::encode(r.tran_proposal), *ctx, r.signature);
    if (!result) {
      out.reason = std::string(to_string(result.reason));
      if (result.reason == RejectReason::equation_failed) out.reason += " #" + std::to_string(result.failed_equation);
      continue;
    }
    out.valid = true;
    out.reason = "accept";
    ++verdict.valid_count;
    Bytes key = codec::encode_rw_sets(r.tran_proposal);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) group_order.push_back(key);
    it->second.push_back(i);
  }

  const std::vector<std::size_t>* chosen = nullptr;
  std::size_t best_distinct = 0;
  for (const auto& key : group_order) {
    const auto& members = groups.at(key);
    std::set<mpz_class> tags;
    for (auto i : members) tags.insert(responses[i].tag.value);
    if (!chosen || tags.size() > best_distinct || (tags.size() == best_distinct && members.size() > chosen->size())) {
      chosen = &members;
      best_distinct = tags.size();
    }
  }
  if (chosen) {
    std::vector<bool> duplicate(chosen->size(), false);
    for (std::size_t a = 0; a < chosen->size(); ++a) {
      for (std::size_t b = a + 1; b < chosen->size(); ++b) {
        const std::size_t i = (*chosen)[a], j = (*chosen)[b];
        if (link(responses[i].signature, responses[j].signature) == LinkResult::linked) {
          verdict.link_pairs.emplace_back(i, j);
          duplicate[b] = true;
        }
      }
    }
    verdict.distinct_count = static_cast<std::size_t>(std::count(duplicate.begin(), duplicate.end(), false));
    for (const auto& key : group_order) {
      if (&groups.at(key) == chosen) continue;
      for (auto i : groups.at(key)) verdict.per_signature[i].reason = "read/write sets differ from counted group";
    }
  }
  verdict.decision = verdict.distinct_count >= policy.threshold ? Decision::accept : Decision::reject;
  return verdict;
}

/// Deterministic stand-in for chaincode execution.
inline std::pair<std::vector<ReadItem>, std::vector<WriteItem>> stub_chaincode(ByteView payload) {
  if (payload.empty()) return {};
  const Bytes digest = sha3_256(payload);
  const std::string key = "state/" + to_hex(ByteView(digest).first(4));
  std::uint64_t version = 0;
  for (std::size_t i = 4; i < 12; ++i) version = (version << 8) | digest[i];
  return {{ReadItem{key, version}}, {WriteItem{key, digest}}};
}

enum class EndorserBehavior { endorse, decline, corrupt_response, double_sign };
enum class ValidatorBehavior { honest, malicious_reject };

constexpr std::string_view to_string(EndorserBehavior b) noexcept {
  switch (b) {
    case EndorserBehavior::endorse: return "endorse";
    case EndorserBehavior::decline: return "decline";
    case EndorserBehavior::corrupt_response: return "corrupt";
    case EndorserBehavior::double_sign: return "double";
  }
  return "unknown";
}

inline EndorserBehavior parse_endorser_behavior(std::string_view s) {
  for (auto b : {EndorserBehavior::endorse, EndorserBehavior::decline, EndorserBehavior::corrupt_response,
                 EndorserBehavior::double_sign})
    if (s == to_string(b)) return b;
  throw Error(ErrorCode::invalid_argument, "unknown endorser behavior '" + std::string(s) + "'");
}

struct Endorser {
  EndorserKeyPair key;
  EndorserBehavior behavior = EndorserBehavior::endorse;
};

struct FlowConfig {
  std::vector<Endorser> endorsers;
  std::vector<ValidatorBehavior> validators;
  bool parallel_signing = true;
};

struct FlowEvent {
  std::uint64_t seq = 0;
  std::string kind;
  std::string from;
  std::string to;
  std::string detail;
  Bytes payload;
};

struct Block {
  std::uint64_t number = 0;
  Bytes tid;
  std::vector<Bytes> responses;
};

struct FlowTranscript {
  Bytes tid;
  std::vector<FlowEvent> events;
  std::vector<Bytes> response_wire;  // every broadcast PROPOSAL-RESPONSE, serialized
  std::vector<PolicyVerdict> verdicts;
  std::size_t accepting_validators = 0;
  std::optional<std::size_t> forwarding_validator;
  std::vector<Block> block_log;

  bool ordered() const noexcept { return !block_log.empty(); }
};

namespace detail {

inline std::vector<ProposalResponse> endorse_one(const SystemParams& params, const EndorsementPolicy& policy,
                                                 const TranProposal& honest, const TransactionContext& ctx,
                                                 const Endorser& e, Rng rng) {
  TranProposal tp = honest;
  if (e.behavior == EndorserBehavior::corrupt_response) {
    if (tp.writeset.empty()) tp.writeset.push_back(WriteItem{"state/corrupt", {}});
    tp.writeset.front().value.push_back(0xff);
  }
  const Witness wit = gen_witness(params.accumulator(), policy.ring, e.key.y);
  const Bytes message = codec::encode(tp);
  const int copies = e.behavior == EndorserBehavior::double_sign ? 2 : 1;
  std::vector<ProposalResponse> out;
  for (int i = 0; i < copies; ++i) {
    RingSignature sig = sign(params, policy.v, wit, e.key, message, ctx, rng);
    Tag tag = sig.tag;
    out.push_back(ProposalResponse{tp.tid, tp, std::move(sig), std::move(tag)});
  }
  return out;
}

}  // namespace detail

/// In-memory run of PROPOSE -> PROPOSAL-RESPONSE -> validation -> ordering.
/// Endorsers sign concurrently; each validator evaluates the policy on its own
/// decoded copy; the lowest-indexed accepting validator forwards once at least
/// ceil(V/2) validators accept.
inline FlowTranscript run_flow(const SystemParams& params, const EndorsementPolicy& policy,
                               const ProposeMessage& propose, const FlowConfig& config, Rng& rng) {
  require(config.endorsers.size() == policy.ring.size(), ErrorCode::invalid_argument,
          "one behavior per ring member required");
  for (std::size_t i = 0; i < policy.ring.size(); ++i)
    require(config.endorsers[i].key.y == policy.ring[i], ErrorCode::invalid_argument,
            "endorser key does not match ring position");
  require(!config.validators.empty(), ErrorCode::invalid_argument, "at least one validator required");

  FlowTranscript transcript;
  std::uint64_t seq = 0;
  auto record = [&](std::string kind, std::string from, std::string to, std::string detail, Bytes payload = {}) {
    transcript.events.push_back(FlowEvent{seq++, std::move(kind), std::move(from), std::move(to), std::move(detail),
                                          std::move(payload)});
  };

  transcript.tid = propose.tid();
  const Bytes propose_wire = codec::encode(propose);
  for (std::size_t i = 0; i < config.endorsers.size(); ++i)
    record("PROPOSE", "client", "ep" + std::to_string(i), "transaction proposal", propose_wire);

  auto [readset, writeset] = stub_chaincode(propose.tx.payload);
  const TranProposal honest{transcript.tid, propose.tx.chaincode_id, propose.tx.payload, std::move(readset),
                            std::move(writeset)};
  const TransactionContext ctx = derive_gtid(params, transcript.tid);

  std::vector<std::future<std::vector<ProposalResponse>>> pending;
  std::size_t nacks = 0;
  for (const auto& e : config.endorsers) {
    if (e.behavior == EndorserBehavior::decline) {
      ++nacks;
      continue;
    }
    pending.push_back(std::async(config.parallel_signing ? std::launch::async : std::launch::deferred,
                                 detail::endorse_one, std::cref(params), std::cref(policy), std::cref(honest),
                                 std::cref(ctx), std::cref(e), rng.fork()));
  }
  for (std::size_t i = 0; i < nacks; ++i) record("NACK", "endorser", "client", "endorsement declined");

  std::vector<ProposalResponse> responses;
  for (auto& f : pending)
    for (auto& r : f.get()) responses.push_back(std::move(r));
  // Broadcast order is shuffled so position does not reveal ring index.
  for (std::size_t i = responses.size(); i > 1; --i)
    std::swap(responses[i - 1], responses[rng.below(static_cast<unsigned long>(i)).get_ui()]);
  for (const auto& r : responses) {
    Bytes wire = codec::encode(r, params);
    record("PROPOSAL-RESPONSE", "anonymous", "peers", "tag " + r.tag.value.get_str(16).substr(0, 16), wire);
    transcript.response_wire.push_back(std::move(wire));
  }

  for (std::size_t v = 0; v < config.validators.size(); ++v) {
    std::vector<ProposalResponse> received;
    for (const auto& wire : transcript.response_wire) received.push_back(codec::decode_response(wire, params));
    PolicyVerdict verdict = evaluate_policy(params, policy, transcript.tid, received);
    if (config.validators[v] == ValidatorBehavior::malicious_reject) verdict.decision = Decision::reject;
    if (verdict.decision == Decision::accept) {
      ++transcript.accepting_validators;
      if (!transcript.forwarding_validator) transcript.forwarding_validator = v;
    }
    record("VERDICT", "validator" + std::to_string(v), "validators",
           std::string(to_string(verdict.decision)) + " distinct=" + std::to_string(verdict.distinct_count) +
               " valid=" + std::to_string(verdict.valid_count));
    transcript.verdicts.push_back(std::move(verdict));
  }

  const std::size_t quorum = (config.validators.size() + 1) / 2;
  if (transcript.accepting_validators >= quorum && transcript.forwarding_validator) {
    const std::size_t leader = *transcript.forwarding_validator;
    record("FORWARD", "validator" + std::to_string(leader), "orderer", "policy satisfied by quorum");
    Block block{transcript.block_log.size(), transcript.tid, transcript.response_wire};
    transcript.block_log.push_back(std::move(block));
    record("BLOCK", "orderer", "peers", "block " + std::to_string(transcript.block_log.back().number));
    // Version re-validation at commit has no concurrent writers here.
    record("VALIDATE", "peers", "ledger", "endorsement and versions checked");
  } else {
    record("ABORT", "validators", "client",
           "policy unsatisfied: " + std::to_string(transcript.accepting_validators) + " of " +
               std::to_string(config.validators.size()) + " validators accepted");
  }
  return transcript;
}

}  // namespace fcslrs::endorse
