#pragma once

#include <cstdint>
#include <vector>

#include "crqkd/bits.hpp"

namespace crqkd {

struct EccConfig {
  std::size_t code_len_n = 1024;
  std::size_t info_len_k = 512;
  double design_epsilon = 0.08;  // BSC crossover the frozen set is built for
};

// Binary polar code with successive-cancellation decoding over a BSC.
// The frozen set comes from the Bhattacharyya parameter recursion evaluated
// at design_epsilon. The u-domain transform x = u * F^{(x)m} (F = [1 0; 1 1])
// is an involution, which the syndrome-reconciliation path relies on.
class PolarCode {
 public:
  explicit PolarCode(const EccConfig& cfg);

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  const std::vector<uint8_t>& frozen_mask() const { return frozen_; }
  const std::vector<uint32_t>& info_positions() const { return info_pos_; }
  const std::vector<uint32_t>& frozen_positions() const { return frozen_pos_; }

  // In-place polar transform over GF(2); applying it twice is the identity.
  static void transform_inplace(BitString& x);

  // Systematic encoding: the k info bits reappear verbatim at the info
  // positions of the returned n-bit codeword.
  BitString encode_systematic(const BitString& info) const;
  BitString extract_info(const BitString& codeword) const;

  // SC decode of an n-bit word observed through BSC(epsilon). frozen_vals,
  // when given, supplies one bit per frozen position (ascending order) in
  // place of the all-zero convention; that is the hook used for syndrome
  // decoding with side information. known_mask marks positions whose value
  // is known exactly (public padding), taken from the received word.
  // Returns the u-domain estimate; transform_inplace() of it gives the
  // codeword estimate.
  BitString decode_sc(const BitString& received, double epsilon,
                      const BitString& frozen_vals = {},
                      const std::vector<uint8_t>& known_mask = {}) const;

  // Convenience for systematic codes: decode and return the info bits of the
  // re-encoded word.
  BitString decode_info_sc(const BitString& received, double epsilon) const;

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  int stages_ = 0;
  std::vector<uint8_t> frozen_;        // 1 = frozen, indexed in u-domain
  std::vector<uint32_t> info_pos_;     // ascending
  std::vector<uint32_t> frozen_pos_;   // ascending
};

void validate(const EccConfig& cfg);

}  // namespace crqkd
