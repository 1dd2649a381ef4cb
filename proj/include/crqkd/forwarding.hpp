#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "crqkd/bits.hpp"
#include "crqkd/keygroup.hpp"

namespace crqkd {

struct UserPairRequest {
  std::string a_id;
  std::string b_id;
  std::size_t n_groups = 1;  // N_{A_i,B_j}
};

// Aggregated round demand: duplicate pairs merged, per-user totals N_{A_i}.
struct PairDemand {
  std::vector<UserPairRequest> merged;  // lexicographic (a_id, b_id)
  std::size_t total_groups = 0;
  std::map<std::string, std::size_t> per_user_groups;
};

PairDemand collect_requests(const std::vector<UserPairRequest>& requests);

struct AllocationEntry {
  std::string a_id;
  std::string b_id;
  std::vector<uint32_t> group_nos;  // ascending
  std::size_t requested = 0;
};

struct AllocationTable {
  std::vector<AllocationEntry> entries;  // lexicographic (a_id, b_id)
  std::size_t groups_used = 0;           // taken from the front of the supply
  std::size_t shortfall = 0;             // requested groups left unserved
};

// Serves pairs in lexicographic order from the ascending-numbered supply;
// the boundary pair of a short round receives the remainder.
AllocationTable allocate(const PairDemand& demand, const std::vector<KeyGroup>& available);

// Wire format (bit-exact): version | pair_id | group_no | payload_len_bits |
// ciphertext (MSB-first, zero-padded) | crc32, all integers big-endian.
inline constexpr uint8_t kFrameVersionUnified = 0x01;
inline constexpr uint8_t kFrameVersionSimplified = 0x02;

struct ForwardFrame {
  uint8_t version = kFrameVersionUnified;
  uint16_t pair_id = 0;
  uint32_t group_no = 0;
  BitString ciphertext;  // payload_len_bits on the wire
};

std::vector<uint8_t> encode_frame(const ForwardFrame& frame);

// Integrity first (corrupt frames fail the CRC whatever the damage), then
// the version gate: only the caller's expected version is accepted.
ForwardFrame decode_frame(const std::vector<uint8_t>& bytes,
                          uint8_t expected_version = kFrameVersionUnified);

// Single-use accounting for channel-key groups. Each (owner, group_no) may
// pad exactly one frame; a second use throws OtpReuse.
class PadLedger {
 public:
  void mark_used(const std::string& owner, uint32_t group_no);
  bool was_used(const std::string& owner, uint32_t group_no) const;
  std::size_t uses() const { return used_.size(); }

 private:
  std::set<std::pair<std::string, uint32_t>> used_;
};

// Per-user accumulation of channel-key groups awaiting consumption.
class ChannelKeyStore {
 public:
  explicit ChannelKeyStore(std::size_t l_g) : seg_(l_g) {}

  void push_bits(const BitString& raw) {
    for (auto& g : seg_.push(raw)) ready_.push_back(std::move(g));
  }
  std::size_t ready() const { return ready_.size(); }
  KeyGroup consume_next();
  std::size_t consumed() const { return consumed_; }

 private:
  GroupSegmenter seg_;
  std::deque<KeyGroup> ready_;
  std::size_t consumed_ = 0;
};

struct RoundDelivery {
  std::string user;        // receiving end-user
  uint32_t group_no = 0;   // quantum group number
  uint16_t pair_id = 0;
};

struct RoundOutput {
  std::vector<std::pair<std::string, std::string>> pair_ids;  // index = pair_id
  std::vector<ForwardFrame> frames_qap1;  // towards A-side users
  std::vector<ForwardFrame> frames_qap2;  // towards B-side users
  std::vector<RoundDelivery> deliveries_qap1, deliveries_qap2;
  std::vector<std::string> deferred_users;  // insufficient channel key this round
};

// One encrypted broadcast round. Channel-key stores are consumed under the
// ledger's single-use rule; users short of channel key have their frames
// deferred rather than served partially.
RoundOutput forward_round(const AllocationTable& alloc,
                          const std::map<uint32_t, KeyGroup>& quantum_groups,
                          std::map<std::string, ChannelKeyStore>& stores_a,
                          std::map<std::string, ChannelKeyStore>& stores_b,
                          PadLedger& ledger);

}  // namespace crqkd
