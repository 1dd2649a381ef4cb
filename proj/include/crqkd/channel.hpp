#pragma once

#include <complex>
#include <string_view>

#include "crqkd/rng.hpp"

namespace crqkd {

struct ChannelParams {
  double reciprocity_rho = 0.95;  // target corr(amp_forward, amp_backward)
  double temporal_rho = 0.0;      // AR(1) coefficient of the latent fading
  double snr_db = 30.0;           // probe SNR; bounds the reachable reciprocity
  double probe_rate_hz = 1000.0;
  double eve_rho = 0.0;           // target corr(legitimate amp, eve amp)
};

struct ChannelProbe {
  double t = 0.0;  // seconds
  double amp_forward = 0.0;
  double amp_backward = 0.0;
  double amp_eve = 0.0;
};

// Reciprocal TDD fading channel, amplitude-only. Both directions observe a
// shared complex-Gaussian fading latent plus independent per-probe noise;
// the mixing weights are solved so the Rayleigh envelope correlations match
// reciprocity_rho and eve_rho. The latent evolves as AR(1) between probes.
class ChannelState {
 public:
  ChannelState(const ChannelParams& params, uint64_t seed);

  ChannelProbe probe();

  const ChannelParams& params() const { return params_; }

 private:
  ChannelParams params_;
  Rng rng_;
  double dt_;
  double t_ = 0.0;
  double share_legit_ = 0.0;  // amplitude weight of the shared latent, both sides
  double share_eve_ = 0.0;
  std::complex<double> latent_;
  std::complex<double> latent_eve_;

  std::complex<double> cgauss();
};

ChannelState new_channel(const ChannelParams& params, uint64_t seed);

// Calibrated presets for the three measured rooms; see scenarios/ for the
// full scenario files these belong to.
ChannelParams scenario_params(std::string_view name);

// Rayleigh envelope correlation as a function of the squared complex
// correlation between two unit-variance complex Gaussians, and its inverse.
// Exposed for tests.
double envelope_corr_from_sq(double rho_c_sq);
double envelope_corr_inverse(double target);

}  // namespace crqkd
