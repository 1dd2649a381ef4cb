#include "crqkd/simplified.hpp"

#include <algorithm>
#include <stdexcept>

#include "crqkd/errors.hpp"
#include "crqkd/hash.hpp"

namespace crqkd {

void PadPair::append(const BitString& q, const BitString& u, const BitString& e) {
  if (q.size() != u.size() || q.size() != e.size())
    throw std::invalid_argument("PadPair: side lengths differ");
  qap.insert(qap.end(), q.begin(), q.end());
  user.insert(user.end(), u.begin(), u.end());
  eve.insert(eve.end(), e.begin(), e.end());
}

std::size_t simplified_payload_bits(const EccConfig& cfg) {
  if (cfg.info_len_k <= kDigestBits)
    throw std::invalid_argument("EccConfig: info_len_k must exceed the digest width");
  return cfg.info_len_k - kDigestBits;
}

BitString ecc_encode(const BitString& info, const EccConfig& cfg) {
  if (info.size() != cfg.info_len_k)
    throw std::invalid_argument("ecc_encode: info length != k");
  PolarCode code(cfg);
  return code.encode_systematic(info);
}

namespace {

BitString payload_with_digest(const BitString& payload, const EccConfig& cfg) {
  BitString info = payload;
  info.resize(simplified_payload_bits(cfg), 0);
  BitString digest = hash64_bits(info);
  info.insert(info.end(), digest.begin(), digest.end());
  return info;  // exactly k bits
}

}  // namespace

BitString forward_simplified(const KeyGroup& q_group, PadPair& pads, const EccConfig& cfg,
                             const PolarCode& code) {
  std::size_t n = cfg.code_len_n;
  if (pads.remaining() < n)
    throw InsufficientMaterial("forward_simplified: pad stream exhausted");

  std::size_t payload_bits = simplified_payload_bits(cfg);
  BitString payload(q_group.bits.begin(),
                    q_group.bits.begin() +
                        std::min<std::size_t>(payload_bits, q_group.bits.size()));
  BitString info = payload_with_digest(payload, cfg);
  BitString codeword = code.encode_systematic(info);

  BitString transmitted(n);
  for (std::size_t i = 0; i < n; ++i)
    transmitted[i] = codeword[i] ^ pads.qap[pads.cursor + i];
  pads.cursor += n;  // QAP-side bits consumed; the user consumes in lockstep
  return transmitted;
}

CascadeDecode decode_cascade(const BitString& received, const BitString& pad_user,
                             double epsilon_hat, const EccConfig& cfg, const PolarCode& code) {
  std::size_t n = cfg.code_len_n;
  if (received.size() != n || pad_user.size() != n)
    throw std::invalid_argument("decode_cascade: lengths must equal n");

  // codeword XOR (pad disagreement pattern): a BSC(epsilon_q) observation.
  BitString observed = xor_bits(received, pad_user);
  BitString u = code.decode_sc(observed, epsilon_hat);
  PolarCode::transform_inplace(u);  // codeword estimate
  BitString info = code.extract_info(u);

  std::size_t payload_bits = simplified_payload_bits(cfg);
  CascadeDecode out;
  out.info.assign(info.begin(), info.begin() + payload_bits);
  BitString digest(info.begin() + payload_bits, info.end());
  out.ok = digest == hash64_bits(out.info);
  if (out.ok) {
    // Disagreement pattern implied by the accepted codeword.
    std::size_t w = hamming_distance(observed, u);
    out.measured_epsilon = static_cast<double>(w) / static_cast<double>(n);
  }
  return out;
}

GroupDelivery retransmit_loop(const KeyGroup& group, PadPair& pads, const EccConfig& cfg,
                              const PolarCode& code, int max_attempts, SimplifiedStats& stats,
                              double& epsilon_hat, const PadRefill& refill) {
  if (max_attempts < 1) throw std::invalid_argument("retransmit_loop: max_attempts must be >= 1");

  std::size_t payload_bits = simplified_payload_bits(cfg);
  std::size_t n_chunks = (group.bits.size() + payload_bits - 1) / payload_bits;

  GroupDelivery out;
  out.recovered.group_no = group.group_no;
  BitString assembled;
  assembled.reserve(group.bits.size());

  for (std::size_t c = 0; c < n_chunks; ++c) {
    std::size_t begin = c * payload_bits;
    std::size_t end = std::min(group.bits.size(), begin + payload_bits);
    KeyGroup chunk{group.group_no, BitString(group.bits.begin() + begin, group.bits.begin() + end)};

    bool got = false;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
      if (pads.remaining() < cfg.code_len_n) {
        if (!refill || !refill(pads, cfg.code_len_n)) break;  // group deferred
      }
      std::size_t user_cursor = pads.cursor;
      BitString transmitted = forward_simplified(chunk, pads, cfg, code);
      BitString pad_user(pads.user.begin() + user_cursor,
                         pads.user.begin() + user_cursor + cfg.code_len_n);
      ++stats.attempts;
      ++out.attempts;
      stats.pad_bits_used += cfg.code_len_n;
      TransmissionRecord rec;
      rec.pad_cursor = user_cursor;
      rec.transmitted = transmitted;
      rec.codeword.resize(cfg.code_len_n);
      for (std::size_t i = 0; i < cfg.code_len_n; ++i)
        rec.codeword[i] = transmitted[i] ^ pads.qap[user_cursor + i];
      out.log.push_back(std::move(rec));

      CascadeDecode dec = decode_cascade(transmitted, pad_user, epsilon_hat, cfg, code);
      if (dec.ok) {
        // Sliding estimate of the cascade-channel parameter.
        epsilon_hat = 0.9 * epsilon_hat + 0.1 * dec.measured_epsilon;
        stats.residual_epsilon += dec.measured_epsilon;
        ++stats.epsilon_samples;
        assembled.insert(assembled.end(), dec.info.begin(), dec.info.begin() + (end - begin));
        got = true;
        break;
      }
      ++stats.failures;
    }
    if (!got) return out;  // undelivered; attempts already tallied
  }

  out.recovered.bits = std::move(assembled);
  out.delivered = true;
  return out;
}

}  // namespace crqkd
