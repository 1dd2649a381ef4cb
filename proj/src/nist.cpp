#include "crqkd/nist.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "crqkd/errors.hpp"

namespace crqkd {

namespace {

double monobit_p(const BitString& bits) {
  double sum = 0.0;
  for (uint8_t b : bits) sum += b ? 1.0 : -1.0;
  double s_obs = std::fabs(sum) / std::sqrt(static_cast<double>(bits.size()));
  return std::erfc(s_obs / std::sqrt(2.0));
}

double block_frequency_p(const BitString& bits, std::size_t m) {
  std::size_t n_blocks = bits.size() / m;
  double chi2 = 0.0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    double ones = 0.0;
    for (std::size_t i = 0; i < m; ++i) ones += bits[b * m + i];
    double pi = ones / static_cast<double>(m);
    chi2 += (pi - 0.5) * (pi - 0.5);
  }
  chi2 *= 4.0 * static_cast<double>(m);
  return boost::math::gamma_q(static_cast<double>(n_blocks) / 2.0, chi2 / 2.0);
}

double runs_p(const BitString& bits) {
  std::size_t n = bits.size();
  double ones = 0.0;
  for (uint8_t b : bits) ones += b;
  double pi = ones / static_cast<double>(n);
  // Prerequisite frequency check from the test definition.
  if (std::fabs(pi - 0.5) >= 2.0 / std::sqrt(static_cast<double>(n))) return 0.0;
  double v_obs = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) v_obs += bits[i] != bits[i + 1];
  double prod = pi * (1.0 - pi);
  double num = std::fabs(v_obs - 2.0 * static_cast<double>(n) * prod);
  double den = 2.0 * std::sqrt(2.0 * static_cast<double>(n)) * prod;
  return std::erfc(num / den);
}

}  // namespace

RandomnessReport randomness_tests(const BitString& bits, double alpha) {
  if (bits.size() < kMinRandomnessBits)
    throw InsufficientMaterial("randomness_tests: need at least 10^4 bits");

  RandomnessReport rep;
  rep.tests.push_back({"monobit", monobit_p(bits), false});
  rep.tests.push_back({"block-frequency", block_frequency_p(bits, kBlockFrequencyLen), false});
  rep.tests.push_back({"runs", runs_p(bits), false});
  rep.all_pass = true;
  for (auto& t : rep.tests) {
    t.pass = t.p_value >= alpha;
    rep.all_pass = rep.all_pass && t.pass;
  }
  return rep;
}

}  // namespace crqkd
