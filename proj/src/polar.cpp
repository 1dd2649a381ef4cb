#include "crqkd/polar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crqkd {

namespace {

bool is_pow2(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

constexpr double kKnownLlr = 1e9;  // effectively certain bit

double bsc_llr_magnitude(double epsilon) {
  // Clamp away from 0 and 1/2 so the LLR stays finite.
  double e = std::clamp(epsilon, 1e-9, 0.5 - 1e-9);
  return std::log((1.0 - e) / e);
}

}  // namespace

void validate(const EccConfig& cfg) {
  if (!is_pow2(cfg.code_len_n) || cfg.code_len_n < 2)
    throw std::invalid_argument("EccConfig: code_len_n must be a power of two >= 2");
  if (cfg.info_len_k == 0 || cfg.info_len_k >= cfg.code_len_n)
    throw std::invalid_argument("EccConfig: require 0 < info_len_k < code_len_n");
  if (!(cfg.design_epsilon > 0.0 && cfg.design_epsilon < 0.5))
    throw std::invalid_argument("EccConfig: design_epsilon must lie in (0, 0.5)");
}

PolarCode::PolarCode(const EccConfig& cfg) {
  validate(cfg);
  n_ = cfg.code_len_n;
  k_ = cfg.info_len_k;
  stages_ = 0;
  while ((std::size_t{1} << stages_) < n_) ++stages_;

  // Bhattacharyya parameter of each synthesized channel: walk the bits of
  // the u-index from MSB to LSB; 0 takes the degraded branch, 1 the
  // upgraded one.
  double z0 = 2.0 * std::sqrt(cfg.design_epsilon * (1.0 - cfg.design_epsilon));
  std::vector<double> z(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double zi = z0;
    for (int b = stages_ - 1; b >= 0; --b) {
      if ((i >> b) & 1u)
        zi = zi * zi;
      else
        zi = 2.0 * zi - zi * zi;
    }
    z[i] = zi;
  }

  std::vector<uint32_t> order(n_);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](uint32_t a, uint32_t b) { return z[a] < z[b]; });

  frozen_.assign(n_, 1);
  for (std::size_t i = 0; i < k_; ++i) frozen_[order[i]] = 0;
  for (uint32_t i = 0; i < n_; ++i) {
    if (frozen_[i])
      frozen_pos_.push_back(i);
    else
      info_pos_.push_back(i);
  }
}

void PolarCode::transform_inplace(BitString& x) {
  std::size_t n = x.size();
  if (!is_pow2(n)) throw std::invalid_argument("polar transform: length must be a power of two");
  for (std::size_t h = 1; h < n; h <<= 1)
    for (std::size_t i = 0; i < n; i += 2 * h)
      for (std::size_t j = i; j < i + h; ++j) x[j] ^= x[j + h];
}

BitString PolarCode::encode_systematic(const BitString& info) const {
  if (info.size() != k_) throw std::invalid_argument("encode_systematic: info length != k");
  // Two-pass systematic construction: transform, re-mask the frozen
  // coordinates, transform again.
  BitString word(n_, 0);
  for (std::size_t i = 0; i < k_; ++i) word[info_pos_[i]] = info[i];
  transform_inplace(word);
  for (uint32_t p : frozen_pos_) word[p] = 0;
  // Keep only info coordinates of the intermediate word.
  BitString out(n_, 0);
  for (uint32_t p : info_pos_) out[p] = word[p];
  transform_inplace(out);
  return out;
}

BitString PolarCode::extract_info(const BitString& codeword) const {
  if (codeword.size() != n_) throw std::invalid_argument("extract_info: length != n");
  BitString info(k_);
  for (std::size_t i = 0; i < k_; ++i) info[i] = codeword[info_pos_[i]];
  return info;
}

namespace {

// Recursive SC pass over preallocated per-level buffers. llr/beta hold one
// array per level laid out back to back; level l spans n >> l entries.
struct ScWorkspace {
  std::vector<double> llr;
  std::vector<uint8_t> beta;
  std::vector<std::size_t> off;
  const std::vector<uint8_t>* frozen = nullptr;
  const uint8_t* frozen_val_at = nullptr;  // indexed by u position, may be null
  BitString* u_hat = nullptr;
  std::size_t n = 0;

  void run(int level, std::size_t u_base) {
    std::size_t len = n >> level;
    double* L = llr.data() + off[level];
    uint8_t* B = beta.data() + off[level];
    if (len == 1) {
      uint8_t bit;
      if ((*frozen)[u_base])
        bit = frozen_val_at ? frozen_val_at[u_base] : 0;
      else
        bit = L[0] < 0.0 ? 1 : 0;
      (*u_hat)[u_base] = bit;
      B[0] = bit;
      return;
    }
    std::size_t half = len / 2;
    double* Lc = llr.data() + off[level + 1];
    uint8_t* Bc = beta.data() + off[level + 1];

    // f-node (min-sum)
    for (std::size_t j = 0; j < half; ++j) {
      double a = L[j], b = L[j + half];
      double sign = (a < 0.0) == (b < 0.0) ? 1.0 : -1.0;
      Lc[j] = sign * std::min(std::fabs(a), std::fabs(b));
    }
    run(level + 1, u_base);
    for (std::size_t j = 0; j < half; ++j) B[j] = Bc[j];

    // g-node
    for (std::size_t j = 0; j < half; ++j) {
      double a = L[j], b = L[j + half];
      Lc[j] = B[j] ? b - a : b + a;
    }
    run(level + 1, u_base + half);

    for (std::size_t j = 0; j < half; ++j) {
      uint8_t left = B[j] ^ Bc[j];
      B[j] = left;
      B[j + half] = Bc[j];
    }
  }
};

}  // namespace

BitString PolarCode::decode_sc(const BitString& received, double epsilon,
                               const BitString& frozen_vals,
                               const std::vector<uint8_t>& known_mask) const {
  if (received.size() != n_) throw std::invalid_argument("decode_sc: length != n");
  if (!frozen_vals.empty() && frozen_vals.size() != frozen_pos_.size())
    throw std::invalid_argument("decode_sc: frozen_vals length mismatch");
  if (!known_mask.empty() && known_mask.size() != n_)
    throw std::invalid_argument("decode_sc: known_mask length mismatch");

  ScWorkspace ws;
  ws.n = n_;
  ws.off.resize(stages_ + 1);
  std::size_t total = 0;
  for (int l = 0; l <= stages_; ++l) {
    ws.off[l] = total;
    total += n_ >> l;
  }
  ws.llr.resize(total);
  ws.beta.resize(total);

  double mag = bsc_llr_magnitude(epsilon);
  for (std::size_t i = 0; i < n_; ++i) {
    double m = (!known_mask.empty() && known_mask[i]) ? kKnownLlr : mag;
    ws.llr[i] = received[i] ? -m : m;
  }

  BitString frozen_expanded;
  if (!frozen_vals.empty()) {
    frozen_expanded.assign(n_, 0);
    for (std::size_t i = 0; i < frozen_pos_.size(); ++i)
      frozen_expanded[frozen_pos_[i]] = frozen_vals[i];
  }

  BitString u_hat(n_, 0);
  ws.frozen = &frozen_;
  ws.frozen_val_at = frozen_expanded.empty() ? nullptr : frozen_expanded.data();
  ws.u_hat = &u_hat;
  ws.run(0, 0);
  return u_hat;
}

BitString PolarCode::decode_info_sc(const BitString& received, double epsilon) const {
  BitString u = decode_sc(received, epsilon);
  transform_inplace(u);  // codeword estimate
  return extract_info(u);
}

}  // namespace crqkd
