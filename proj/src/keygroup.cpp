#include "crqkd/keygroup.hpp"

#include <stdexcept>

namespace crqkd {

void validate_group_len(std::size_t l_g) {
  if (l_g < 8 || l_g % 8 != 0)
    throw std::invalid_argument("group length must be a multiple of 8, at least 8");
}

std::vector<KeyGroup> segment(const BitString& stream, std::size_t l_g, uint32_t first_no) {
  validate_group_len(l_g);
  std::vector<KeyGroup> out;
  std::size_t n_full = stream.size() / l_g;
  out.reserve(n_full);
  for (std::size_t g = 0; g < n_full; ++g) {
    KeyGroup kg;
    kg.group_no = first_no + static_cast<uint32_t>(g);
    kg.bits.assign(stream.begin() + g * l_g, stream.begin() + (g + 1) * l_g);
    out.push_back(std::move(kg));
  }
  return out;
}

GroupSegmenter::GroupSegmenter(std::size_t l_g, uint32_t first_no)
    : l_g_(l_g), next_no_(first_no) {
  validate_group_len(l_g);
}

std::vector<KeyGroup> GroupSegmenter::push(const BitString& stream) {
  carry_.insert(carry_.end(), stream.begin(), stream.end());
  std::vector<KeyGroup> out = segment(carry_, l_g_, next_no_);
  next_no_ += static_cast<uint32_t>(out.size());
  carry_.erase(carry_.begin(), carry_.begin() + out.size() * l_g_);
  return out;
}

BitString otp_encrypt(const KeyGroup& q, const KeyGroup& c) {
  if (q.bits.size() != c.bits.size())
    throw std::invalid_argument("otp_encrypt: group lengths differ");
  return xor_bits(q.bits, c.bits);
}

void QuantumKeyBuffer::push(KeyGroup g) {
  groups_.push_back(std::move(g));
  ++produced_;
}

KeyGroup QuantumKeyBuffer::take_front() {
  if (groups_.empty()) throw std::logic_error("QuantumKeyBuffer: empty");
  KeyGroup g = std::move(groups_.front());
  groups_.pop_front();
  ++allocated_;
  return g;
}

}  // namespace crqkd
