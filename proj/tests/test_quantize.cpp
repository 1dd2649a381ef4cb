#include <doctest.h>

#include "crqkd/channel.hpp"
#include "crqkd/crkg.hpp"
#include "crqkd/errors.hpp"
#include "crqkd/quantize.hpp"

using namespace crqkd;

TEST_SUITE("quantize") {

TEST_CASE("mean threshold with zero guard band") {
  QuantizerConfig cfg{0.0, 4};
  QuantizeResult r = quantize({0, 0, 10, 10}, cfg);
  CHECK(r.bits == from_01("0011"));
  CHECK(r.kept_mask == std::vector<uint8_t>{1, 1, 1, 1});
}

TEST_CASE("constant windows are dropped entirely") {
  QuantizerConfig cfg{0.5, 4};
  QuantizeResult r = quantize({3, 3, 3, 3, 3, 3, 3, 3}, cfg);
  CHECK(r.bits.empty());
  for (auto k : r.kept_mask) CHECK(k == 0);
}

TEST_CASE("guard band drops mid-range samples") {
  QuantizerConfig cfg{0.5, 5};
  QuantizeResult r = quantize({0, 0, 5, 10, 10}, cfg);
  // mean 5, the middle sample sits inside the band
  CHECK(r.kept_mask == std::vector<uint8_t>{1, 1, 0, 1, 1});
  CHECK(r.bits == from_01("0011"));
}

TEST_CASE("too few samples") {
  QuantizerConfig cfg{0.3, 8};
  CHECK_THROWS_AS(quantize({1.0, 2.0}, cfg), InsufficientMaterial);
}

TEST_CASE("mask intersection keeps only common positions") {
  QuantizeResult a, b;
  a.kept_mask = {1, 0, 1, 1};
  a.bits = from_01("101");
  b.kept_mask = {1, 1, 0, 1};
  b.bits = from_01("010");
  auto [ba, bb] = intersect_kept(a, b);
  CHECK(ba == from_01("11"));
  CHECK(bb == from_01("00"));

  b.kept_mask.pop_back();
  CHECK_THROWS_AS(intersect_kept(a, b), std::invalid_argument);
}

TEST_CASE("wider guard bands never raise the post-intersection disagreement") {
  ChannelParams p;
  p.reciprocity_rho = 0.9;
  const double alphas[] = {0.0, 0.15, 0.3, 0.45, 0.6};
  double prev = 1.0;
  for (double alpha : alphas) {
    ChannelState ch(p, 41);  // same seed per grid point
    Rng rng(42);
    CrkgOutput o = run_crkg(ch, 60000, QuantizerConfig{alpha, 4096}, CrkgMode::raw, rng);
    CHECK(o.stats.epsilon_q <= prev);
    prev = o.stats.epsilon_q;
  }
}

TEST_CASE("bits_at_positions forces a guess everywhere requested") {
  std::vector<double> samples = {0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<uint8_t> mask(8, 1);
  BitString bits = bits_at_positions(samples, 8, mask);
  CHECK(bits.size() == 8);
  CHECK(bits == from_01("00001111"));
  mask.pop_back();
  CHECK_THROWS_AS(bits_at_positions(samples, 8, mask), std::invalid_argument);
}

}  // TEST_SUITE
