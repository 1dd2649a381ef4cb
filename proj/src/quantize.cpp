#include "crqkd/quantize.hpp"

#include <cmath>
#include <stdexcept>

#include "crqkd/errors.hpp"

namespace crqkd {

namespace {

void validate(const QuantizerConfig& cfg) {
  if (cfg.guard_alpha < 0.0) throw std::invalid_argument("QuantizerConfig: guard_alpha must be >= 0");
  if (cfg.block_len < 2) throw std::invalid_argument("QuantizerConfig: block_len must be >= 2");
}

}  // namespace

std::vector<int8_t> classify_samples(const std::vector<double>& samples,
                                     const QuantizerConfig& cfg) {
  validate(cfg);
  if (samples.size() < cfg.block_len)
    throw InsufficientMaterial("quantize: fewer samples than one statistics window");

  std::vector<int8_t> cls(samples.size(), -1);
  std::size_t n_windows = samples.size() / cfg.block_len;
  for (std::size_t w = 0; w < n_windows; ++w) {
    std::size_t begin = w * cfg.block_len;
    // The tail shorter than block_len joins the final window.
    std::size_t end = (w + 1 == n_windows) ? samples.size() : begin + cfg.block_len;
    std::size_t len = end - begin;

    double mean = 0.0;
    for (std::size_t i = begin; i < end; ++i) mean += samples[i];
    mean /= static_cast<double>(len);
    double var = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      double d = samples[i] - mean;
      var += d * d;
    }
    double sigma = std::sqrt(var / static_cast<double>(len));
    if (sigma == 0.0) continue;  // constant window: all samples dropped

    double hi = mean + cfg.guard_alpha * sigma;
    double lo = mean - cfg.guard_alpha * sigma;
    for (std::size_t i = begin; i < end; ++i) {
      if (samples[i] > hi)
        cls[i] = 1;
      else if (samples[i] < lo)
        cls[i] = 0;
    }
  }
  return cls;
}

QuantizeResult quantize(const std::vector<double>& samples, const QuantizerConfig& cfg) {
  auto cls = classify_samples(samples, cfg);
  QuantizeResult out;
  out.kept_mask.assign(samples.size(), 0);
  out.bits.reserve(samples.size());
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (cls[i] >= 0) {
      out.kept_mask[i] = 1;
      out.bits.push_back(static_cast<uint8_t>(cls[i]));
    }
  }
  return out;
}

std::pair<BitString, BitString> intersect_kept(const QuantizeResult& a,
                                               const QuantizeResult& b) {
  if (a.kept_mask.size() != b.kept_mask.size())
    throw std::invalid_argument("intersect_kept: sample counts differ");
  BitString bits_a, bits_b;
  std::size_t ia = 0, ib = 0;
  for (std::size_t i = 0; i < a.kept_mask.size(); ++i) {
    bool ka = a.kept_mask[i], kb = b.kept_mask[i];
    if (ka && kb) {
      bits_a.push_back(a.bits[ia]);
      bits_b.push_back(b.bits[ib]);
    }
    ia += ka;
    ib += kb;
  }
  return {std::move(bits_a), std::move(bits_b)};
}

BitString bits_at_positions(const std::vector<double>& samples, std::size_t block_len,
                            const std::vector<uint8_t>& positions_mask) {
  if (positions_mask.size() != samples.size())
    throw std::invalid_argument("bits_at_positions: mask length mismatch");
  QuantizerConfig cfg{0.0, block_len};
  auto cls = classify_samples(samples, cfg);
  BitString out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!positions_mask[i]) continue;
    // Inside-band or constant-window samples still force a guess.
    out.push_back(cls[i] == 1 ? 1 : 0);
  }
  return out;
}

}  // namespace crqkd
