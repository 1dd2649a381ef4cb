#include "crqkd/reconcile.hpp"

#include <algorithm>
#include <stdexcept>

#include "crqkd/hash.hpp"
#include "crqkd/rng.hpp"

namespace crqkd {

ReconcileConfig reconcile_config_for(double epsilon_estimate) {
  // Disclosure fitted to the SC decoder: smallest syndrome that still left
  // no residual blocks over 10^4 fitted trials at 1.25x the stated rate.
  ReconcileConfig cfg;
  double e = std::max(0.0, epsilon_estimate);
  if (e < 0.005)
    cfg.syndrome_len = 256;
  else if (e < 0.012)
    cfg.syndrome_len = 320;
  else if (e < 0.025)
    cfg.syndrome_len = 416;
  else if (e < 0.045)
    cfg.syndrome_len = 512;
  else if (e < 0.070)
    cfg.syndrome_len = 576;
  else if (e < 0.100)
    cfg.syndrome_len = 672;
  else
    cfg.syndrome_len = 768;
  cfg.epsilon_hint = std::max(e, 0.002);
  return cfg;
}

std::vector<uint32_t> block_permutation(std::size_t n, uint64_t session_seed,
                                        std::size_t block, int round) {
  std::vector<uint32_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<uint32_t>(i);
  if (round == 0) return perm;  // first pass runs on the raw block
  Rng rng(splitmix64(session_seed ^ (0x51ed2700ULL + block * 1315423911ULL + round)));
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = rng.below(i + 1);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

namespace {

EccConfig inner_code_config(const ReconcileConfig& cfg) {
  if (cfg.syndrome_len == 0 || cfg.syndrome_len >= cfg.block_len)
    throw std::invalid_argument("ReconcileConfig: syndrome_len must lie in (0, block_len)");
  if (cfg.max_rounds < 1) throw std::invalid_argument("ReconcileConfig: max_rounds must be >= 1");
  return EccConfig{cfg.block_len, cfg.block_len - cfg.syndrome_len, cfg.design_epsilon};
}

}  // namespace

SyndromeSource::SyndromeSource(BitString reference, const ReconcileConfig& cfg,
                               uint64_t session_seed)
    : cfg_(cfg), seed_(session_seed), reference_(std::move(reference)),
      length_(reference_.size()), code_(inner_code_config(cfg)) {
  n_blocks_ = (length_ + cfg_.block_len - 1) / cfg_.block_len;
  reference_.resize(n_blocks_ * cfg_.block_len, 0);  // public zero padding
}

SyndromeSource::BlockMessage SyndromeSource::block_message(std::size_t block, int round) {
  if (block >= n_blocks_) throw std::invalid_argument("block_message: block out of range");
  std::size_t n = cfg_.block_len;
  auto perm = block_permutation(n, seed_, block, round);
  BitString permuted(n);
  const uint8_t* src = reference_.data() + block * n;
  for (std::size_t i = 0; i < n; ++i) permuted[i] = src[perm[i]];

  PolarCode::transform_inplace(permuted);
  BlockMessage msg;
  msg.syndrome.resize(code_.frozen_positions().size());
  for (std::size_t i = 0; i < msg.syndrome.size(); ++i)
    msg.syndrome[i] = permuted[code_.frozen_positions()[i]];
  msg.check = crc32_bits(BitString(src, src + n));

  leaked_bits_ += cfg_.syndrome_message_bits();
  ++messages_;
  return msg;
}

uint64_t SyndromeSource::reference_digest() const {
  BitString trimmed(reference_.begin(), reference_.begin() + length_);
  return hash64(trimmed);
}

ReconcileResult reconcile(const BitString& local, SyndromeSource& remote) {
  const ReconcileConfig& cfg = remote.config();
  if (local.size() != remote.source_length())
    throw std::invalid_argument("reconcile: parties hold different lengths");

  std::size_t n = cfg.block_len;
  std::size_t n_blocks = remote.n_blocks();
  PolarCode code(inner_code_config(cfg));

  BitString padded = local;
  padded.resize(n_blocks * n, 0);
  std::size_t pad_start = remote.source_length();

  BitString corrected = padded;
  std::vector<std::size_t> pending(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) pending[b] = b;

  std::size_t leaked = 0;
  for (int round = 0; round < cfg.max_rounds && !pending.empty(); ++round) {
    std::vector<std::size_t> still_failing;
    for (std::size_t b : pending) {
      auto msg = remote.block_message(b, round);
      leaked += cfg.syndrome_message_bits();

      auto perm = block_permutation(n, remote.session_seed(), b, round);
      BitString y(n);
      std::vector<uint8_t> known(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t pos = b * n + perm[i];
        y[i] = padded[pos];
        known[i] = pos >= pad_start;  // zero padding is public
      }

      BitString u = code.decode_sc(y, cfg.epsilon_hint, msg.syndrome, known);
      PolarCode::transform_inplace(u);  // permuted codeword estimate
      BitString est(n);
      for (std::size_t i = 0; i < n; ++i) est[perm[i]] = u[i];

      if (crc32_bits(est) == msg.check) {
        std::copy(est.begin(), est.end(), corrected.begin() + b * n);
      } else {
        still_failing.push_back(b);
      }
    }
    pending.swap(still_failing);
  }

  ReconcileResult out;
  out.corrected.assign(corrected.begin(), corrected.begin() + remote.source_length());
  out.leaked_bits = leaked;
  out.success = pending.empty() && hash64(out.corrected) == remote.reference_digest();
  return out;
}

}  // namespace crqkd
