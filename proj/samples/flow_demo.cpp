// 2-out-of-4 endorsement with one declining endorser and one double signer.
#include <iostream>

#include "fcslrs.hpp"

using namespace fcslrs;

int main() {
  Rng rng = Rng::seeded(11);
  const SystemParams params = init(default_level(512), rng);

  endorse::FlowConfig config;
  std::vector<mpz_class> ring;
  const endorse::EndorserBehavior behaviors[] = {endorse::EndorserBehavior::endorse,
                                                 endorse::EndorserBehavior::decline,
                                                 endorse::EndorserBehavior::double_sign,
                                                 endorse::EndorserBehavior::endorse};
  for (auto b : behaviors) {
    EndorserKeyPair kp = keygen(params, rng);
    ring.push_back(kp.y);
    config.endorsers.push_back({std::move(kp), b});
  }
  config.validators.assign(3, endorse::ValidatorBehavior::honest);
  const auto policy = endorse::EndorsementPolicy::make(params, ring, 2);

  ProposeMessage propose;
  const std::string payload = "set x = 42";
  propose.tx = Transaction{"client-0", "kv", Bytes(payload.begin(), payload.end()), 1, {}};
  const auto transcript = endorse::run_flow(params, policy, propose, config, rng);
  std::cout << codec::transcript_document(transcript);
  return transcript.ordered() ? 0 : 1;
}
