#include "crqkd/forwarding.hpp"

#include <algorithm>
#include <stdexcept>

#include "crqkd/errors.hpp"
#include "crqkd/hash.hpp"

namespace crqkd {

PairDemand collect_requests(const std::vector<UserPairRequest>& requests) {
  std::map<std::pair<std::string, std::string>, std::size_t> merged;
  for (const auto& r : requests) {
    if (r.a_id == r.b_id)
      throw std::invalid_argument("collect_requests: a user cannot pair with itself");
    if (r.n_groups < 1) throw std::invalid_argument("collect_requests: n_groups must be >= 1");
    merged[{r.a_id, r.b_id}] += r.n_groups;
  }
  PairDemand out;
  for (const auto& [pair, n] : merged) {
    out.merged.push_back(UserPairRequest{pair.first, pair.second, n});
    out.total_groups += n;
    out.per_user_groups[pair.first] += n;
    out.per_user_groups[pair.second] += n;
  }
  return out;
}

AllocationTable allocate(const PairDemand& demand, const std::vector<KeyGroup>& available) {
  std::vector<uint32_t> supply;
  supply.reserve(available.size());
  for (const auto& g : available) supply.push_back(g.group_no);
  std::sort(supply.begin(), supply.end());

  AllocationTable table;
  std::size_t cursor = 0;
  for (const auto& req : demand.merged) {
    AllocationEntry entry;
    entry.a_id = req.a_id;
    entry.b_id = req.b_id;
    entry.requested = req.n_groups;
    std::size_t take = std::min(req.n_groups, supply.size() - cursor);
    for (std::size_t i = 0; i < take; ++i) entry.group_nos.push_back(supply[cursor++]);
    table.shortfall += req.n_groups - take;
    table.entries.push_back(std::move(entry));
  }
  table.groups_used = cursor;
  return table;
}

std::vector<uint8_t> encode_frame(const ForwardFrame& frame) {
  if (frame.ciphertext.empty() || frame.ciphertext.size() > 0xffff)
    throw std::invalid_argument("encode_frame: payload must hold 1..65535 bits");
  std::vector<uint8_t> out;
  out.reserve(13 + (frame.ciphertext.size() + 7) / 8);
  out.push_back(frame.version);
  out.push_back(static_cast<uint8_t>(frame.pair_id >> 8));
  out.push_back(static_cast<uint8_t>(frame.pair_id));
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(frame.group_no >> s));
  uint16_t len = static_cast<uint16_t>(frame.ciphertext.size());
  out.push_back(static_cast<uint8_t>(len >> 8));
  out.push_back(static_cast<uint8_t>(len));
  auto payload = pack_msb(frame.ciphertext);
  out.insert(out.end(), payload.begin(), payload.end());
  uint32_t crc = crc32(out.data(), out.size());
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(crc >> s));
  return out;
}

ForwardFrame decode_frame(const std::vector<uint8_t>& bytes, uint8_t expected_version) {
  if (bytes.size() < 14) throw CorruptFrame("decode_frame: truncated frame");
  uint32_t stored_crc = 0;
  for (std::size_t i = bytes.size() - 4; i < bytes.size(); ++i)
    stored_crc = (stored_crc << 8) | bytes[i];
  if (crc32(bytes.data(), bytes.size() - 4) != stored_crc)
    throw CorruptFrame("decode_frame: CRC mismatch");

  ForwardFrame f;
  f.version = bytes[0];
  if (f.version != expected_version)
    throw UnsupportedVersion("decode_frame: unexpected version byte");
  f.pair_id = static_cast<uint16_t>((bytes[1] << 8) | bytes[2]);
  f.group_no = 0;
  for (int i = 0; i < 4; ++i) f.group_no = (f.group_no << 8) | bytes[3 + i];
  uint16_t len = static_cast<uint16_t>((bytes[7] << 8) | bytes[8]);
  std::size_t payload_bytes = (static_cast<std::size_t>(len) + 7) / 8;
  if (bytes.size() != 9 + payload_bytes + 4)
    throw CorruptFrame("decode_frame: length field disagrees with frame size");
  std::vector<uint8_t> payload(bytes.begin() + 9, bytes.begin() + 9 + payload_bytes);
  f.ciphertext = unpack_msb(payload, len);
  return f;
}

void PadLedger::mark_used(const std::string& owner, uint32_t group_no) {
  if (!used_.insert({owner, group_no}).second)
    throw OtpReuse("channel-key group already consumed: " + owner);
}

bool PadLedger::was_used(const std::string& owner, uint32_t group_no) const {
  return used_.count({owner, group_no}) > 0;
}

KeyGroup ChannelKeyStore::consume_next() {
  if (ready_.empty()) throw std::logic_error("ChannelKeyStore: no group ready");
  KeyGroup g = std::move(ready_.front());
  ready_.pop_front();
  ++consumed_;
  return g;
}

RoundOutput forward_round(const AllocationTable& alloc,
                          const std::map<uint32_t, KeyGroup>& quantum_groups,
                          std::map<std::string, ChannelKeyStore>& stores_a,
                          std::map<std::string, ChannelKeyStore>& stores_b,
                          PadLedger& ledger) {
  RoundOutput out;
  for (const auto& e : alloc.entries) out.pair_ids.push_back({e.a_id, e.b_id});

  // Collect each user's (pair_id, group_no) workload for this round.
  std::map<std::string, std::vector<std::pair<uint16_t, uint32_t>>> work_a, work_b;
  for (std::size_t p = 0; p < alloc.entries.size(); ++p) {
    const auto& e = alloc.entries[p];
    for (uint32_t g : e.group_nos) {
      work_a[e.a_id].push_back({static_cast<uint16_t>(p), g});
      work_b[e.b_id].push_back({static_cast<uint16_t>(p), g});
    }
  }

  auto serve_side = [&](std::map<std::string, std::vector<std::pair<uint16_t, uint32_t>>>& work,
                        std::map<std::string, ChannelKeyStore>& stores,
                        std::vector<ForwardFrame>& frames, std::vector<RoundDelivery>& deliveries,
                        uint8_t version) {
    for (auto& [user, items] : work) {
      auto it = stores.find(user);
      if (it == stores.end() || it->second.ready() < items.size()) {
        out.deferred_users.push_back(user);
        continue;
      }
      // Deterministic pairing: quantum groups in ascending order consume the
      // user's channel groups in arrival order.
      std::sort(items.begin(), items.end(),
                [](const auto& x, const auto& y) { return x.second < y.second; });
      for (const auto& [pair_id, group_no] : items) {
        const KeyGroup& q = quantum_groups.at(group_no);
        KeyGroup pad = it->second.consume_next();
        ledger.mark_used(user, pad.group_no);
        ForwardFrame f;
        f.version = version;
        f.pair_id = pair_id;
        f.group_no = group_no;
        f.ciphertext = otp_encrypt(q, pad);
        frames.push_back(std::move(f));
        deliveries.push_back(RoundDelivery{user, group_no, pair_id});
      }
    }
  };

  serve_side(work_a, stores_a, out.frames_qap1, out.deliveries_qap1, kFrameVersionUnified);
  serve_side(work_b, stores_b, out.frames_qap2, out.deliveries_qap2, kFrameVersionUnified);
  return out;
}

}  // namespace crqkd
