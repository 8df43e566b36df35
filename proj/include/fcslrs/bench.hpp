#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "fcslrs/accumulator.hpp"
#include "fcslrs/codec.hpp"
#include "fcslrs/error.hpp"
#include "fcslrs/random.hpp"
#include "fcslrs/scheme.hpp"

namespace fcslrs::bench {

struct BenchRow {
  std::size_t n = 0;
  unsigned lambda = 0;
  std::size_t msg_len = 0;
  std::string op;  // sign | verify | tag
  double mean_ms = 0;
  double stddev_ms = 0;
  std::size_t sig_bytes = 0;
  std::size_t trials = 0;
};

struct BenchConfig {
  std::vector<unsigned> lambdas{1024};
  std::vector<std::size_t> rings{4, 16, 64, 256};
  std::vector<std::size_t> msg_lens{2048};
  std::size_t trials = 20;
  std::size_t warmup = 3;
  bool parallel = false;  // sign the trials of one cell concurrently
};

struct Stats {
  double mean = 0;
  double stddev = 0;
};

inline Stats summarize(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double acc = 0;
    for (double x : xs) acc += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(acc / static_cast<double>(xs.size() - 1));
  }
  return s;
}

/// Sample coefficient of variation; 0 for fewer than two values.
inline double coefficient_of_variation(const std::vector<double>& xs) {
  const Stats s = summarize(xs);
  return s.mean > 0 ? s.stddev / s.mean : 0.0;
}

struct BenchReport {
  std::vector<BenchRow> rows;

  std::vector<double> means(unsigned lambda, std::size_t msg_len, const std::string& op) const {
    std::vector<double> out;
    for (const auto& r : rows)
      if (r.lambda == lambda && r.msg_len == msg_len && r.op == op) out.push_back(r.mean_ms);
    return out;
  }

  double cv_across_rings(unsigned lambda, std::size_t msg_len, const std::string& op) const {
    return coefficient_of_variation(means(lambda, msg_len, op));
  }

  bool size_constant(unsigned lambda) const {
    std::size_t seen = 0;
    for (const auto& r : rows) {
      if (r.lambda != lambda) continue;
      if (seen && r.sig_bytes != seen) return false;
      seen = r.sig_bytes;
    }
    return true;
  }

  void write_csv(std::ostream& os) const {
    os << "n,lambda,msg_len,op,mean_ms,stddev_ms,sig_bytes,trials\n";
    for (const auto& r : rows)
      os << r.n << ',' << r.lambda << ',' << r.msg_len << ',' << r.op << ',' << r.mean_ms << ',' << r.stddev_ms << ','
         << r.sig_bytes << ',' << r.trials << '\n';
  }

  void write_summary(std::ostream& os) const {
    std::map<std::pair<unsigned, std::size_t>, bool> cells;
    for (const auto& r : rows) cells[{r.lambda, r.msg_len}] = true;
    for (const auto& [cell, _] : cells) {
      const auto [lambda, msg_len] = cell;
      os << "lambda=" << lambda << " msg=" << msg_len << "B";
      for (const char* op : {"sign", "verify", "tag"}) {
        const auto m = means(lambda, msg_len, op);
        if (m.empty()) continue;
        os << "  " << op << " mean=" << summarize(m).mean << "ms cv=" << coefficient_of_variation(m) * 100 << "%";
      }
      os << "  sig size " << (size_constant(lambda) ? "constant" : "VARIES") << " across n\n";
    }
  }
};

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

/// Keys and parameters for one modulus size; rings of size n reuse the first
/// n keys.
struct BenchFixture {
  SystemParams params;
  std::vector<EndorserKeyPair> keys;

  static BenchFixture make(unsigned lambda, std::size_t max_n, Rng& rng) {
    BenchFixture fx{init(default_level(lambda), rng), {}};
    fx.keys.reserve(max_n);
    for (std::size_t i = 0; i < max_n; ++i) fx.keys.push_back(keygen(fx.params, rng));
    return fx;
  }

  std::vector<mpz_class> ring(std::size_t n) const {
    require(n >= 1 && n <= keys.size(), ErrorCode::invalid_argument, "ring larger than fixture");
    std::vector<mpz_class> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(keys[i].y);
    return out;
  }
};

/// Times sign, verify and tag for every (n, msg_len) cell of one fixture.
/// The signer is the last ring member. Every verify must accept.
inline void run_cells(const BenchFixture& fx, const BenchConfig& cfg, Rng& rng, BenchReport& report) {
  const AccumulatorParams acc = fx.params.accumulator();
  for (std::size_t n : cfg.rings) {
    const std::vector<mpz_class> ring = fx.ring(n);
    const AccumulatedValue v = accumulate(acc, ring);
    const EndorserKeyPair& signer = fx.keys[n - 1];
    const Witness wit = gen_witness(acc, ring, signer.y);
    for (std::size_t msg_len : cfg.msg_lens) {
      const Bytes message = rng.bytes(msg_len);
      const Bytes tid = sha3_256(message);
      const TransactionContext ctx = derive_gtid(fx.params, tid);
      std::vector<double> sign_ms, verify_ms, tag_ms;
      std::size_t sig_bytes = 0;

      for (std::size_t i = 0; i < cfg.warmup; ++i) {
        const RingSignature sig = sign(fx.params, v, wit, signer, message, ctx, rng);
        require(verify(fx.params, v, message, ctx, sig).accepted(), ErrorCode::generation_failure,
                "warm-up signature rejected");
      }

      std::vector<RingSignature> sigs(cfg.trials);
      if (cfg.parallel) {
        std::vector<std::future<std::pair<RingSignature, double>>> jobs;
        for (std::size_t i = 0; i < cfg.trials; ++i)
          jobs.push_back(std::async(std::launch::async, [&, r = rng.fork()]() mutable {
            const auto t0 = Clock::now();
            RingSignature sig = sign(fx.params, v, wit, signer, message, ctx, r);
            return std::make_pair(std::move(sig), elapsed_ms(t0));
          }));
        for (std::size_t i = 0; i < cfg.trials; ++i) {
          auto [sig, ms] = jobs[i].get();
          sigs[i] = std::move(sig);
          sign_ms.push_back(ms);
        }
      } else {
        for (std::size_t i = 0; i < cfg.trials; ++i) {
          const auto t0 = Clock::now();
          sigs[i] = sign(fx.params, v, wit, signer, message, ctx, rng);
          sign_ms.push_back(elapsed_ms(t0));
        }
      }
      for (const auto& sig : sigs) {
        const auto t0 = Clock::now();
        const bool ok = verify(fx.params, v, message, ctx, sig).accepted();
        verify_ms.push_back(elapsed_ms(t0));
        require(ok, ErrorCode::generation_failure, "benchmark signature rejected");
        sig_bytes = codec::encode(sig, fx.params).size();
      }
      for (std::size_t i = 0; i < cfg.trials; ++i) {
        const auto t0 = Clock::now();
        const Tag tag = gen_tag(fx.params, ctx, signer);
        tag_ms.push_back(elapsed_ms(t0));
        require(tag == sigs[i].tag, ErrorCode::generation_failure, "tag mismatch");
      }

      for (auto [op, xs] : {std::pair{"sign", &sign_ms}, std::pair{"verify", &verify_ms}, std::pair{"tag", &tag_ms}}) {
        const Stats s = summarize(*xs);
        report.rows.push_back(BenchRow{n, fx.params.level.lambda, msg_len, op, s.mean, s.stddev, sig_bytes, cfg.trials});
      }
    }
  }
}

inline BenchReport run(const BenchConfig& cfg, Rng& rng) {
  require(cfg.trials >= 20, ErrorCode::invalid_argument, "at least 20 trials required");
  require(!cfg.rings.empty() && !cfg.lambdas.empty() && !cfg.msg_lens.empty(), ErrorCode::invalid_argument,
          "empty benchmark grid");
  const std::size_t max_n = *std::max_element(cfg.rings.begin(), cfg.rings.end());
  BenchReport report;
  for (unsigned lambda : cfg.lambdas) {
    const BenchFixture fx = BenchFixture::make(lambda, max_n, rng);
    run_cells(fx, cfg, rng, report);
  }
  return report;
}

}  // namespace fcslrs::bench
