#include <doctest.h>

#include <stdexcept>

#include "crqkd/polar.hpp"
#include "crqkd/rng.hpp"

using namespace crqkd;

TEST_SUITE("polar") {

TEST_CASE("config validation") {
  CHECK_THROWS_AS(PolarCode(EccConfig{1000, 500, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(PolarCode(EccConfig{1024, 1024, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(PolarCode(EccConfig{1024, 0, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(PolarCode(EccConfig{1024, 512, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(PolarCode(EccConfig{1024, 512, 0.5}), std::invalid_argument);
}

TEST_CASE("transform is an involution") {
  Rng rng(101);
  for (std::size_t n : {2u, 64u, 1024u}) {
    BitString x = random_bits(n, rng);
    BitString y = x;
    PolarCode::transform_inplace(y);
    PolarCode::transform_inplace(y);
    CHECK(y == x);
  }
}

TEST_CASE("systematic encoding puts info bits in place") {
  EccConfig cfg{1024, 512, 0.10};
  PolarCode code(cfg);
  CHECK(code.n() == 1024);
  CHECK(code.k() == 512);
  Rng rng(102);
  BitString info = random_bits(512, rng);
  BitString cw = code.encode_systematic(info);
  CHECK(cw.size() == 1024);
  CHECK(code.extract_info(cw) == info);
  // and the u-domain word respects the frozen set
  BitString u = cw;
  PolarCode::transform_inplace(u);
  for (uint32_t p : code.frozen_positions()) CHECK(u[p] == 0);
}

TEST_CASE("all-zero info encodes to the all-zero codeword") {
  PolarCode code(EccConfig{256, 128, 0.1});
  BitString cw = code.encode_systematic(BitString(128, 0));
  for (auto b : cw) CHECK(b == 0);
}

TEST_CASE("encoding is linear") {
  PolarCode code(EccConfig{1024, 512, 0.10});
  Rng rng(103);
  for (int t = 0; t < 1000; ++t) {
    BitString a = random_bits(512, rng);
    BitString b = random_bits(512, rng);
    CHECK(xor_bits(code.encode_systematic(a), code.encode_systematic(b)) ==
          code.encode_systematic(xor_bits(a, b)));
  }
}

TEST_CASE("noiseless decoding is exact") {
  PolarCode code(EccConfig{1024, 512, 0.10});
  Rng rng(104);
  for (int t = 0; t < 1000; ++t) {
    BitString info = random_bits(512, rng);
    BitString cw = code.encode_systematic(info);
    REQUIRE(code.decode_info_sc(cw, 0.05) == info);
  }
}

TEST_CASE("decoding at half the design crossover stays below 5% failure") {
  EccConfig cfg{};  // the default code must satisfy its own design point
  PolarCode code(cfg);
  Rng rng(105);
  int fails = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    BitString info = random_bits(512, rng);
    BitString rx = code.encode_systematic(info);
    for (auto& b : rx)
      if (rng.bernoulli(cfg.design_epsilon / 2)) b ^= 1;
    if (code.decode_info_sc(rx, cfg.design_epsilon / 2) != info) ++fails;
  }
  CHECK(static_cast<double>(fails) / trials < 0.05);
}

TEST_CASE("syndrome-style decoding honours nonzero frozen values") {
  EccConfig cfg{512, 256, 0.10};
  PolarCode code(cfg);
  Rng rng(106);
  for (int t = 0; t < 50; ++t) {
    BitString word = random_bits(512, rng);  // arbitrary word, not a codeword
    BitString u = word;
    PolarCode::transform_inplace(u);
    BitString syndrome(code.frozen_positions().size());
    for (std::size_t i = 0; i < syndrome.size(); ++i)
      syndrome[i] = u[code.frozen_positions()[i]];
    BitString noisy = word;
    for (auto& b : noisy)
      if (rng.bernoulli(0.02)) b ^= 1;
    BitString u_hat = code.decode_sc(noisy, 0.02, syndrome);
    PolarCode::transform_inplace(u_hat);
    REQUIRE(u_hat == word);
  }
}

}  // TEST_SUITE
