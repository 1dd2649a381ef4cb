#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "crqkd/bits.hpp"

namespace crqkd {

// Fixed-length numbered key segment: the unit of alignment, allocation and
// OTP encryption.
struct KeyGroup {
  uint32_t group_no = 0;
  BitString bits;
};

void validate_group_len(std::size_t l_g);

// One-shot segmentation: whole l_g-bit groups numbered from first_no; a
// trailing remainder is dropped (use GroupSegmenter to carry it).
std::vector<KeyGroup> segment(const BitString& stream, std::size_t l_g, uint32_t first_no);

// Streaming segmenter with a carry buffer for the incomplete tail.
class GroupSegmenter {
 public:
  explicit GroupSegmenter(std::size_t l_g, uint32_t first_no = 0);

  std::vector<KeyGroup> push(const BitString& stream);
  const BitString& carry() const { return carry_; }
  uint32_t next_no() const { return next_no_; }
  std::size_t group_len() const { return l_g_; }

 private:
  std::size_t l_g_;
  uint32_t next_no_;
  BitString carry_;
};

// Binary XOR of two equal-length groups; the pad discipline lives with the
// caller (see PadLedger in forwarding.hpp).
BitString otp_encrypt(const KeyGroup& q, const KeyGroup& c);

// FIFO of quantum key groups with production/allocation counters, so buffer
// conservation can be audited.
class QuantumKeyBuffer {
 public:
  void push(KeyGroup g);
  std::size_t available() const { return groups_.size(); }
  KeyGroup take_front();
  std::size_t produced() const { return produced_; }
  std::size_t allocated() const { return allocated_; }
  const std::deque<KeyGroup>& groups() const { return groups_; }

 private:
  std::deque<KeyGroup> groups_;
  std::size_t produced_ = 0;
  std::size_t allocated_ = 0;
};

}  // namespace crqkd
