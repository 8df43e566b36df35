#pragma once

#include <json.hpp>

#include <string>

#include "fcslrs/endorsement.hpp"
#include "fcslrs/hash.hpp"

namespace fcslrs::codec {

inline nlohmann::json to_json(const endorse::PolicyVerdict& v) {
  nlohmann::json out;
  out["decision"] = std::string(endorse::to_string(v.decision));
  out["valid_count"] = v.valid_count;
  out["distinct_count"] = v.distinct_count;
  out["link_pairs"] = nlohmann::json::array();
  for (auto [i, j] : v.link_pairs) out["link_pairs"].push_back({i, j});
  out["per_signature"] = nlohmann::json::array();
  for (const auto& s : v.per_signature) out["per_signature"].push_back({{"valid", s.valid}, {"reason", s.reason}});
  return out;
}

/// Event payloads are hex; ordering follows the event sequence numbers.
inline nlohmann::json to_json(const endorse::FlowTranscript& t) {
  nlohmann::json out;
  out["tid"] = to_hex(t.tid);
  out["events"] = nlohmann::json::array();
  for (const auto& e : t.events) {
    out["events"].push_back({{"seq", e.seq},
                             {"kind", e.kind},
                             {"from", e.from},
                             {"to", e.to},
                             {"detail", e.detail},
                             {"payload", to_hex(e.payload)}});
  }
  out["verdicts"] = nlohmann::json::array();
  for (const auto& v : t.verdicts) out["verdicts"].push_back(to_json(v));
  out["accepting_validators"] = t.accepting_validators;
  out["forwarding_validator"] =
      t.forwarding_validator ? nlohmann::json(*t.forwarding_validator) : nlohmann::json(nullptr);
  out["ordered"] = t.ordered();
  out["blocks"] = nlohmann::json::array();
  for (const auto& b : t.block_log) {
    nlohmann::json block{{"number", b.number}, {"tid", to_hex(b.tid)}, {"responses", nlohmann::json::array()}};
    for (const auto& r : b.responses) block["responses"].push_back(to_hex(r));
    out["blocks"].push_back(std::move(block));
  }
  return out;
}

inline std::string transcript_document(const endorse::FlowTranscript& t) { return to_json(t).dump(2) + "\n"; }

}  // namespace fcslrs::codec
