// Four-member ring on toy-secure parameters: sign, verify, link.
#include <iostream>

#include "fcslrs.hpp"

using namespace fcslrs;

int main() {
  Rng rng = Rng::seeded(7);
  const SystemParams params = init(default_level(64), rng);
  const AccumulatorParams acc = params.accumulator();

  std::vector<EndorserKeyPair> keys;
  std::vector<mpz_class> ring;
  for (int i = 0; i < 4; ++i) {
    keys.push_back(keygen(params, rng));
    ring.push_back(keys.back().y);
  }
  const AccumulatedValue v = accumulate(acc, ring);
  std::cout << "N = " << params.N << "\nv = " << v.v << "\n";

  const Bytes message = {'h', 'e', 'l', 'l', 'o'};
  const Bytes tid = sha3_256(message);
  const Witness w = gen_witness(acc, ring, keys[2].y);
  const RingSignature a = sign(params, v, w, keys[2], message, tid, rng);
  const RingSignature b = sign(params, v, w, keys[2], message, tid, rng);

  std::cout << "verify a: " << (verify(params, v, message, tid, a) ? "accept" : "reject") << "\n";
  std::cout << "verify b: " << (verify(params, v, message, tid, b) ? "accept" : "reject") << "\n";
  std::cout << "link(a, b): " << (link(a, b) == LinkResult::linked ? "linked" : "unlinked") << "\n";
  std::cout << "signature bytes: " << codec::encode(a, params).size() << "\n";
  return 0;
}
