#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fcslrs/hash.hpp"
#include "fcslrs/scheme.hpp"

namespace fcslrs {

struct ReadItem {
  std::string key;
  std::uint64_t version = 0;
  friend bool operator==(const ReadItem&, const ReadItem&) = default;
};

struct WriteItem {
  std::string key;
  Bytes value;
  friend bool operator==(const WriteItem&, const WriteItem&) = default;
};

/// Client transaction carried by PROPOSE.
struct Transaction {
  std::string client_id;
  std::string chaincode_id;
  Bytes payload;
  std::uint64_t timestamp = 0;
  Bytes client_sig;
  friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// <PROPOSE, tx, [anchor]>. The transaction id is always derived from the
/// payload, never carried.
struct ProposeMessage {
  Transaction tx;
  std::optional<std::map<std::string, std::uint64_t>> anchor;

  Bytes tid() const { return sha3_256(tx.payload); }
  friend bool operator==(const ProposeMessage&, const ProposeMessage&) = default;
};

/// Endorsed proposal body. Carries no endorser field.
struct TranProposal {
  Bytes tid;
  std::string chaincode_id;
  Bytes tx_content_blob;
  std::vector<ReadItem> readset;
  std::vector<WriteItem> writeset;
  friend bool operator==(const TranProposal&, const TranProposal&) = default;
};

/// Identity-stripped PROPOSAL-RESPONSE.
struct ProposalResponse {
  Bytes tid;
  TranProposal tran_proposal;
  RingSignature signature;
  Tag tag;  // always equal to signature.tag
  friend bool operator==(const ProposalResponse&, const ProposalResponse&) = default;
};

}  // namespace fcslrs
