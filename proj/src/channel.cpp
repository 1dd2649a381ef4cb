#include "crqkd/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace crqkd {

double envelope_corr_from_sq(double rho_c_sq) {
  // corr(|f|,|b|) for jointly complex-Gaussian f, b with |E[f conj(b)]|^2 =
  // rho_c_sq: (pi/4) (2F1(-1/2,-1/2;1;x) - 1) / (1 - pi/4).
  double x = rho_c_sq;
  double coeff = 1.0, xpow = 1.0, sum = 0.0;
  for (int k = 0; k < 400; ++k) {
    double r = (k - 0.5) / (k + 1.0);
    coeff *= r * r;  // c_{k+1} of the hypergeometric series
    xpow *= x;
    double term = coeff * xpow;
    sum += term;
    if (term < 1e-14 && k > 2) break;
  }
  const double pi4 = std::atan(1.0);  // pi/4
  return pi4 * sum / (1.0 - pi4);
}

double envelope_corr_inverse(double target) {
  if (target <= 0.0) return 0.0;
  if (target >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    if (envelope_corr_from_sq(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

void validate(const ChannelParams& p) {
  if (!(p.reciprocity_rho >= 0.0 && p.reciprocity_rho <= 1.0))
    throw std::invalid_argument("ChannelParams: reciprocity_rho must lie in [0,1]");
  if (!(p.temporal_rho >= 0.0 && p.temporal_rho < 1.0))
    throw std::invalid_argument("ChannelParams: temporal_rho must lie in [0,1)");
  if (!(p.eve_rho >= 0.0 && p.eve_rho < 1.0))
    throw std::invalid_argument("ChannelParams: eve_rho must lie in [0,1)");
  if (!(p.probe_rate_hz > 0.0))
    throw std::invalid_argument("ChannelParams: probe_rate_hz must be positive");
  if (!std::isfinite(p.snr_db))
    throw std::invalid_argument("ChannelParams: snr_db must be finite");
}

}  // namespace

ChannelState::ChannelState(const ChannelParams& params, uint64_t seed)
    : params_(params), rng_(Rng(seed).derive("radio-channel")) {
  validate(params);
  dt_ = 1.0 / params.probe_rate_hz;

  // Solve the complex-domain mixing weight whose Rayleigh envelopes hit the
  // requested amplitude correlation.
  double x = envelope_corr_inverse(params.reciprocity_rho);
  share_legit_ = std::pow(x, 0.25);
  double noise_floor = 1.0 / (1.0 + std::pow(10.0, params.snr_db / 10.0));
  double indep = 1.0 - share_legit_ * share_legit_;
  if (indep + 1e-12 < noise_floor)
    throw std::invalid_argument("ChannelParams: reciprocity_rho unreachable at snr_db");

  double xe = envelope_corr_inverse(params.eve_rho);
  share_eve_ = std::pow(xe, 0.25);
  double indep_e = 1.0 - share_eve_ * share_eve_;
  if (indep_e + 1e-12 < noise_floor)
    throw std::invalid_argument("ChannelParams: eve_rho unreachable at snr_db");

  latent_ = cgauss();
  latent_eve_ = cgauss();
}

std::complex<double> ChannelState::cgauss() {
  double re = rng_.gaussian();
  double im = rng_.gaussian();
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

ChannelProbe ChannelState::probe() {
  double a = share_legit_;
  double c = std::sqrt(std::max(0.0, 1.0 - a * a));
  double ae = share_eve_;
  double ce = std::sqrt(std::max(0.0, 1.0 - ae * ae));

  std::complex<double> f = a * latent_ + c * cgauss();
  std::complex<double> b = a * latent_ + c * cgauss();
  std::complex<double> e = ae * latent_ + ce * latent_eve_;

  ChannelProbe out;
  out.t = t_;
  out.amp_forward = std::abs(f);
  out.amp_backward = std::abs(b);
  out.amp_eve = std::abs(e);

  // AR(1) evolution of the fading latents between probes.
  double rho = params_.temporal_rho;
  double fresh = std::sqrt(1.0 - rho * rho);
  latent_ = rho * latent_ + fresh * cgauss();
  latent_eve_ = rho * latent_eve_ + fresh * cgauss();
  t_ += dt_;
  return out;
}

ChannelState new_channel(const ChannelParams& params, uint64_t seed) {
  return ChannelState(params, seed);
}

ChannelParams scenario_params(std::string_view name) {
  // Fitted presets; reciprocity/eve targets were tuned so the full pipeline
  // lands on the measured per-room KDR figures, then frozen.
  if (name == "office") return {0.8022, 0.05, 27.0, 1037.0, 0.0028};
  if (name == "hall") return {0.8582, 0.00, 30.0, 1370.0, 0.0008};
  if (name == "corridor") return {0.8378, 0.05, 28.0, 1248.0, 0.0155};
  throw std::invalid_argument("scenario_params: unknown scenario '" + std::string(name) + "'");
}

}  // namespace crqkd
