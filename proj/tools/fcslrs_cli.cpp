// Operator front end. Every subcommand forwards to one library operation.
#include <CLI11.hpp>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fcslrs.hpp"

namespace fs = std::filesystem;
using namespace fcslrs;

namespace {

constexpr int kExitReject = 1;

Rng make_rng() {
  if (const char* seed = std::getenv("FCSLRS_SEED")) {
    try {
      return Rng::seeded(std::stoull(seed));
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument, "FCSLRS_SEED must be an unsigned integer");
    }
  }
  return Rng::system();
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::size_t parse_size(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_argument, "not a number: '" + s + "'");
  }
  const std::string suffix = s.substr(pos);
  if (suffix == "k" || suffix == "K") return v * 1024;
  if (!suffix.empty()) throw Error(ErrorCode::invalid_argument, "bad size suffix in '" + s + "'");
  return v;
}

/// "4,16,64" or "4..256" (doubling from the lower bound).
std::vector<std::size_t> parse_list(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& item : split(s)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_size(item));
      continue;
    }
    const std::size_t lo = parse_size(item.substr(0, dots)), hi = parse_size(item.substr(dots + 2));
    require(lo >= 1 && lo <= hi, ErrorCode::invalid_argument, "bad range '" + item + "'");
    for (std::size_t v = lo; v <= hi; v *= 2) out.push_back(v);
  }
  require(!out.empty(), ErrorCode::invalid_argument, "empty list '" + s + "'");
  return out;
}

std::string file_token(const std::string& tid) {
  for (char c : tid)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return to_hex(as_bytes(tid));
  return tid;
}

SystemParams load_params(const std::string& path) { return codec::decode_params(codec::read_file(path)); }

struct Options {
  // init
  unsigned lambda = 1024;
  std::optional<unsigned> l, mu;
  bool toy = false;
  std::string out;
  // shared inputs
  std::string params = "params.bin";
  std::string db = "keys.db";
  std::string acc = "acc.bin";
  std::string key;
  std::string witness;
  std::string sig;
  std::vector<std::string> sigs;
  std::string tid;
  std::string message;
  std::size_t count = 1;
  std::string dir = ".";
  // endorse
  std::size_t threshold = 1;
  std::size_t endorsers = 4;
  std::size_t validators = 3;
  std::size_t malicious = 0;
  std::string behaviors;
  std::string payload = "transfer 10 from a to b";
  // bench
  std::string lambdas = "1024";
  std::string rings = "4,16,64,256";
  std::string msgs = "2k";
  std::size_t trials = 20;
  std::size_t warmup = 3;
  std::string csv;
  bool parallel = false;
  bool check = false;
};

int cmd_init(const Options& o) {
  SecurityLevel level = default_level(o.lambda);
  if (o.l) level.l = *o.l;
  if (o.mu) level.mu = *o.mu;
  Rng rng = make_rng();
  const SystemParams params = init(level, rng, o.toy ? ParamMode::insecure_toy : ParamMode::secure);
  const std::string out = o.out.empty() ? "params.bin" : o.out;
  codec::write_file(out, codec::encode(params));
  std::cout << "params lambda=" << level.lambda << " l=" << level.l << " mu=" << level.mu
            << (o.toy ? " mode=insecure_toy" : " mode=secure") << " -> " << out << "\n";
  return 0;
}

int cmd_keygen(const Options& o) {
  const SystemParams params = load_params(o.params);
  KeyDatabase db = fs::exists(o.db) ? KeyDatabase::load(o.db) : KeyDatabase(params);
  require(db.bound_to(params), ErrorCode::invalid_argument, o.db + " belongs to other parameters");
  Rng rng = make_rng();
  const std::size_t first = db.entries().size();
  for (std::size_t i = 0; i < o.count; ++i) {
    const EndorserKeyPair kp = keygen(params, rng);
    const std::size_t index = first + i;
    db.add(kp.y, "endorser-" + std::to_string(index));
    const fs::path path = fs::path(o.dir) / ("key_" + std::to_string(index) + ".bin");
    codec::write_file(path.string(), codec::encode(kp));
    std::cout << "key " << index << " -> " << path.string() << "\n";
  }
  db.save(o.db);
  std::cout << db.active_keys().size() << " active keys in " << o.db << "\n";
  return 0;
}

int cmd_accumulate(const Options& o) {
  const SystemParams params = load_params(o.params);
  const KeyDatabase db = KeyDatabase::load(o.db);
  require(db.bound_to(params), ErrorCode::invalid_argument, o.db + " belongs to other parameters");
  const AccumulatedValue v = accumulate(params.accumulator(), db.active_keys());
  const std::string out = o.out.empty() ? o.acc : o.out;
  codec::write_file(out, codec::encode(v, params));
  std::cout << "accumulated " << v.member_count << " keys -> " << out << "\n";
  return 0;
}

int cmd_witness(const Options& o) {
  const SystemParams params = load_params(o.params);
  const KeyDatabase db = KeyDatabase::load(o.db);
  const EndorserKeyPair kp = codec::decode_keypair(codec::read_file(o.key));
  const Witness w = gen_witness(params.accumulator(), db.active_keys(), kp.y);
  const std::string out = o.out.empty() ? "witness.bin" : o.out;
  codec::write_file(out, codec::encode(w, params));
  std::cout << "witness -> " << out << "\n";
  return 0;
}

int cmd_sign(const Options& o) {
  const SystemParams params = load_params(o.params);
  const AccumulatedValue v = codec::decode_accumulated(codec::read_file(o.acc), params);
  const EndorserKeyPair kp = codec::decode_keypair(codec::read_file(o.key));
  const Witness w = codec::decode_witness(codec::read_file(o.witness), params);
  const Bytes message = codec::read_file(o.message);
  Rng rng = make_rng();
  const RingSignature sig = sign(params, v, w, kp, message, as_bytes(o.tid), rng);
  std::string out = o.out;
  if (out.empty()) {
    std::size_t i = 0;
    do out = "sig_" + file_token(o.tid) + "_" + std::to_string(i++) + ".bin";
    while (fs::exists(out));
  }
  codec::write_file(out, codec::encode(sig, params));
  std::cout << "signature (" << codec::signature_size(params) << " bytes) -> " << out << "\n";
  return 0;
}

int cmd_verify(const Options& o) {
  const SystemParams params = load_params(o.params);
  const AccumulatedValue v = codec::decode_accumulated(codec::read_file(o.acc), params);
  const Bytes message = codec::read_file(o.message);
  RingSignature sig;
  try {
    sig = codec::decode_signature(codec::read_file(o.sig), params);
  } catch (const DecodeError& e) {
    std::cout << "reject: malformed signature (" << e.what() << ")\n";
    return kExitReject;
  }
  const VerifyResult r = verify(params, v, message, as_bytes(o.tid), sig);
  if (r) {
    std::cout << "accept\n";
    return 0;
  }
  std::cout << "reject: " << to_string(r.reason);
  if (r.reason == RejectReason::equation_failed) std::cout << " (check " << r.failed_equation << ")";
  std::cout << "\n";
  return kExitReject;
}

int cmd_link(const Options& o) {
  require(o.sigs.size() == 2, ErrorCode::invalid_argument, "link takes exactly two signatures");
  const SystemParams params = load_params(o.params);
  const RingSignature a = codec::decode_signature(codec::read_file(o.sigs[0]), params);
  const RingSignature b = codec::decode_signature(codec::read_file(o.sigs[1]), params);
  std::cout << (link(a, b) == LinkResult::linked ? "linked" : "unlinked") << "\n";
  return 0;
}

int cmd_endorse(const Options& o) {
  Rng rng = make_rng();
  const SystemParams params = o.params.empty() ? init(default_level(512), rng) : load_params(o.params);
  std::vector<endorse::EndorserBehavior> behaviors;
  for (const auto& b : split(o.behaviors)) behaviors.push_back(endorse::parse_endorser_behavior(b));
  if (behaviors.empty()) behaviors.assign(o.endorsers, endorse::EndorserBehavior::endorse);
  require(behaviors.size() == o.endorsers, ErrorCode::invalid_argument, "need one behavior per endorser");
  require(o.malicious <= o.validators, ErrorCode::invalid_argument, "more malicious validators than validators");

  endorse::FlowConfig config;
  std::vector<mpz_class> ring;
  for (std::size_t i = 0; i < o.endorsers; ++i) {
    EndorserKeyPair kp = keygen(params, rng);
    ring.push_back(kp.y);
    config.endorsers.push_back(endorse::Endorser{std::move(kp), behaviors[i]});
  }
  for (std::size_t i = 0; i < o.validators; ++i)
    config.validators.push_back(i < o.malicious ? endorse::ValidatorBehavior::malicious_reject
                                                : endorse::ValidatorBehavior::honest);
  const auto policy = endorse::EndorsementPolicy::make(params, ring, o.threshold);

  ProposeMessage propose;
  propose.tx = Transaction{"client-0", "asset-transfer", Bytes(o.payload.begin(), o.payload.end()), 0, {}};
  const endorse::FlowTranscript transcript = endorse::run_flow(params, policy, propose, config, rng);

  if (!o.out.empty()) {
    std::ofstream(o.out) << codec::transcript_document(transcript);
    std::cout << "transcript -> " << o.out << "\n";
  }
  for (std::size_t v = 0; v < transcript.verdicts.size(); ++v) {
    const auto& verdict = transcript.verdicts[v];
    std::cout << "validator " << v << ": " << endorse::to_string(verdict.decision)
              << " distinct=" << verdict.distinct_count << " valid=" << verdict.valid_count << "\n";
  }
  if (transcript.ordered()) {
    std::cout << "ordered: block " << transcript.block_log.back().number << " via validator "
              << *transcript.forwarding_validator << "\n";
    return 0;
  }
  std::cout << "policy unsatisfied: " << transcript.accepting_validators << " of " << o.validators
            << " validators accepted (t=" << o.threshold << ")\n";
  return kExitReject;
}

int cmd_bench(const Options& o) {
  bench::BenchConfig cfg;
  cfg.lambdas.clear();
  for (auto v : parse_list(o.lambdas)) cfg.lambdas.push_back(static_cast<unsigned>(v));
  cfg.rings = parse_list(o.rings);
  cfg.msg_lens = parse_list(o.msgs);
  cfg.trials = o.trials;
  cfg.warmup = o.warmup;
  cfg.parallel = o.parallel;
  Rng rng = make_rng();
  const bench::BenchReport report = bench::run(cfg, rng);
  if (!o.csv.empty()) {
    std::ofstream out(o.csv);
    require(static_cast<bool>(out), ErrorCode::io, "cannot write " + o.csv);
    report.write_csv(out);
  } else {
    report.write_csv(std::cout);
  }
  report.write_summary(std::cout);
  if (!o.check) return 0;
  bool ok = true;
  for (unsigned lambda : cfg.lambdas) {
    ok = ok && report.size_constant(lambda);
    for (std::size_t m : cfg.msg_lens)
      for (const char* op : {"sign", "verify"}) ok = ok && report.cv_across_rings(lambda, m, op) < 0.10;
  }
  std::cout << (ok ? "check: constant size and time across n\n" : "check FAILED\n");
  return ok ? 0 : kExitReject;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anonymous threshold endorsement with constant-size linkable ring signatures"};
  app.require_subcommand(1);
  Options o;

  auto* init_cmd = app.add_subcommand("init", "generate system parameters");
  init_cmd->add_option("--lambda", o.lambda, "modulus bits")->capture_default_str();
  init_cmd->add_option("--l", o.l, "key sphere exponent");
  init_cmd->add_option("--mu", o.mu, "key sphere radius exponent");
  init_cmd->add_flag("--toy", o.toy, "insecure toy mode: relaxed size checks");
  init_cmd->add_option("--out", o.out, "output file (params.bin)");

  auto* keygen_cmd = app.add_subcommand("keygen", "generate endorser keys and enroll them");
  keygen_cmd->add_option("--params", o.params)->capture_default_str();
  keygen_cmd->add_option("--count", o.count)->capture_default_str();
  keygen_cmd->add_option("--db", o.db)->capture_default_str();
  keygen_cmd->add_option("--dir", o.dir, "directory for key_<i>.bin")->capture_default_str();

  auto* acc_cmd = app.add_subcommand("accumulate", "accumulate the active keys");
  acc_cmd->add_option("--params", o.params)->capture_default_str();
  acc_cmd->add_option("--db", o.db)->capture_default_str();
  acc_cmd->add_option("--out", o.out, "output file (acc.bin)");

  auto* wit_cmd = app.add_subcommand("witness", "compute a membership witness");
  wit_cmd->add_option("--params", o.params)->capture_default_str();
  wit_cmd->add_option("--db", o.db)->capture_default_str();
  wit_cmd->add_option("--key", o.key)->required();
  wit_cmd->add_option("--out", o.out, "output file (witness.bin)");

  auto* sign_cmd = app.add_subcommand("sign", "sign a message for a transaction id");
  sign_cmd->add_option("--params", o.params)->capture_default_str();
  sign_cmd->add_option("--acc", o.acc)->capture_default_str();
  sign_cmd->add_option("--key", o.key)->required();
  sign_cmd->add_option("--witness", o.witness)->required();
  sign_cmd->add_option("--tid", o.tid)->required();
  sign_cmd->add_option("--message", o.message, "message file")->required();
  sign_cmd->add_option("--out", o.out, "output file (sig_<tid>_<i>.bin)");

  auto* verify_cmd = app.add_subcommand("verify", "verify a signature; exit 0 on accept");
  verify_cmd->add_option("--params", o.params)->capture_default_str();
  verify_cmd->add_option("--acc", o.acc)->capture_default_str();
  verify_cmd->add_option("--tid", o.tid)->required();
  verify_cmd->add_option("--message", o.message, "message file")->required();
  verify_cmd->add_option("--sig", o.sig)->required();

  auto* link_cmd = app.add_subcommand("link", "test two signatures for a common signer");
  link_cmd->add_option("--params", o.params)->capture_default_str();
  link_cmd->add_option("sigs", o.sigs, "two signature files")->required()->expected(2);

  auto* endorse_cmd = app.add_subcommand("endorse", "run the endorsement flow simulation");
  endorse_cmd->add_option("--params", o.params, "parameter file; fresh lambda=512 parameters if absent");
  endorse_cmd->add_option("--threshold", o.threshold)->capture_default_str();
  endorse_cmd->add_option("--endorsers", o.endorsers)->capture_default_str();
  endorse_cmd->add_option("--validators", o.validators)->capture_default_str();
  endorse_cmd->add_option("--malicious", o.malicious, "validators that always reject")->capture_default_str();
  endorse_cmd->add_option("--behaviors", o.behaviors, "endorse|decline|corrupt|double, comma separated");
  endorse_cmd->add_option("--payload", o.payload)->capture_default_str();
  endorse_cmd->add_option("--out", o.out, "transcript JSON file");

  auto* bench_cmd = app.add_subcommand("bench", "time sign, verify and tag across ring sizes");
  bench_cmd->add_option("--lambdas", o.lambdas)->capture_default_str();
  bench_cmd->add_option("--rings", o.rings, "list or a..b doubling range")->capture_default_str();
  bench_cmd->add_option("--msg", o.msgs, "message sizes, k suffix allowed")->capture_default_str();
  bench_cmd->add_option("--trials", o.trials)->capture_default_str();
  bench_cmd->add_option("--warmup", o.warmup)->capture_default_str();
  bench_cmd->add_option("--csv", o.csv, "CSV output file (stdout if empty)");
  bench_cmd->add_flag("--parallel", o.parallel, "sign trials concurrently");
  bench_cmd->add_flag("--check", o.check, "exit nonzero unless size is constant and CV < 10%");

  CLI11_PARSE(app, argc, argv);
  // Unset --params on endorse means a fresh parameter set.
  if (endorse_cmd->parsed() && endorse_cmd->count("--params") == 0) o.params.clear();

  try {
    if (init_cmd->parsed()) return cmd_init(o);
    if (keygen_cmd->parsed()) return cmd_keygen(o);
    if (acc_cmd->parsed()) return cmd_accumulate(o);
    if (wit_cmd->parsed()) return cmd_witness(o);
    if (sign_cmd->parsed()) return cmd_sign(o);
    if (verify_cmd->parsed()) return cmd_verify(o);
    if (link_cmd->parsed()) return cmd_link(o);
    if (endorse_cmd->parsed()) return cmd_endorse(o);
    if (bench_cmd->parsed()) return cmd_bench(o);
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.code()) << "]: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
