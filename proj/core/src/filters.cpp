#include "drwps/filters.hpp"

#include <algorithm>
#include <bit>

#include "drwps/errors.hpp"
#include "drwps/text.hpp"

namespace drwps {

namespace {

constexpr std::uint64_t rotl64(std::uint64_t x, int r) {
  return (x << r) | (x >> (64 - r));
}

constexpr std::uint64_t fmix64(std::uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdull;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ull;
  k ^= k >> 33;
  return k;
}

std::uint64_t load64_le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

std::array<std::uint64_t, 2> murmur3_x64_128(std::span<const std::uint8_t> data,
                                             std::uint32_t seed) {
  const std::size_t len = data.size();
  const std::size_t nblocks = len / 16;
  std::uint64_t h1 = seed;
  std::uint64_t h2 = seed;
  constexpr std::uint64_t c1 = 0x87c37b91114253d5ull;
  constexpr std::uint64_t c2 = 0x4cf5ad432745937full;

  const std::uint8_t* p = data.data();
  for (std::size_t i = 0; i < nblocks; ++i) {
    std::uint64_t k1 = load64_le(p + i * 16);
    std::uint64_t k2 = load64_le(p + i * 16 + 8);

    k1 *= c1; k1 = rotl64(k1, 31); k1 *= c2; h1 ^= k1;
    h1 = rotl64(h1, 27); h1 += h2; h1 = h1 * 5 + 0x52dce729ull;

    k2 *= c2; k2 = rotl64(k2, 33); k2 *= c1; h2 ^= k2;
    h2 = rotl64(h2, 31); h2 += h1; h2 = h2 * 5 + 0x38495ab5ull;
  }

  const std::uint8_t* tail = p + nblocks * 16;
  std::uint64_t k1 = 0;
  std::uint64_t k2 = 0;
  switch (len & 15) {
    case 15: k2 ^= static_cast<std::uint64_t>(tail[14]) << 48; [[fallthrough]];
    case 14: k2 ^= static_cast<std::uint64_t>(tail[13]) << 40; [[fallthrough]];
    case 13: k2 ^= static_cast<std::uint64_t>(tail[12]) << 32; [[fallthrough]];
    case 12: k2 ^= static_cast<std::uint64_t>(tail[11]) << 24; [[fallthrough]];
    case 11: k2 ^= static_cast<std::uint64_t>(tail[10]) << 16; [[fallthrough]];
    case 10: k2 ^= static_cast<std::uint64_t>(tail[9]) << 8; [[fallthrough]];
    case 9:
      k2 ^= static_cast<std::uint64_t>(tail[8]);
      k2 *= c2; k2 = rotl64(k2, 33); k2 *= c1; h2 ^= k2;
      [[fallthrough]];
    case 8: k1 ^= static_cast<std::uint64_t>(tail[7]) << 56; [[fallthrough]];
    case 7: k1 ^= static_cast<std::uint64_t>(tail[6]) << 48; [[fallthrough]];
    case 6: k1 ^= static_cast<std::uint64_t>(tail[5]) << 40; [[fallthrough]];
    case 5: k1 ^= static_cast<std::uint64_t>(tail[4]) << 32; [[fallthrough]];
    case 4: k1 ^= static_cast<std::uint64_t>(tail[3]) << 24; [[fallthrough]];
    case 3: k1 ^= static_cast<std::uint64_t>(tail[2]) << 16; [[fallthrough]];
    case 2: k1 ^= static_cast<std::uint64_t>(tail[1]) << 8; [[fallthrough]];
    case 1:
      k1 ^= static_cast<std::uint64_t>(tail[0]);
      k1 *= c1; k1 = rotl64(k1, 31); k1 *= c2; h1 ^= k1;
      break;
    default:
      break;
  }

  h1 ^= static_cast<std::uint64_t>(len);
  h2 ^= static_cast<std::uint64_t>(len);
  h1 += h2;
  h2 += h1;
  h1 = fmix64(h1);
  h2 = fmix64(h2);
  h1 += h2;
  h2 += h1;
  return {h1, h2};
}

std::array<std::uint64_t, 2> murmur3_x64_128(std::string_view data, std::uint32_t seed) {
  return murmur3_x64_128(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(data.data()),
                                    data.size()),
      seed);
}

std::string canonical_attribute(std::string_view name, std::string_view value) {
  std::string out = to_lower(trim(name));
  out += '=';
  out += trim(value);
  return out;
}

std::string canonical_attribute(const AttributePair& attr) {
  return canonical_attribute(attr.first, attr.second);
}

SubscriptionFilter::SubscriptionFilter(std::uint32_t m_bits, std::uint32_t k_hashes)
    : m_(m_bits), k_(k_hashes) {
  if (m_ < 8 || m_ % 8 != 0) {
    throw ParameterError("filter bit count must be a positive multiple of 8");
  }
  if (k_ < 1 || k_ > 16) {
    throw ParameterError("filter hash count must be in [1, 16]");
  }
  bits_.assign(m_ / 8, 0);
}

std::uint32_t SubscriptionFilter::bit_position(std::uint64_t h1, std::uint64_t h2,
                                               std::uint32_t i) const {
  const std::uint64_t stride = h2 | 1ull;  // odd stride, never degenerate
  return static_cast<std::uint32_t>((h1 + static_cast<std::uint64_t>(i) * stride) % m_);
}

void SubscriptionFilter::insert(std::string_view element) {
  const auto [h1, h2] = murmur3_x64_128(element);
  for (std::uint32_t i = 0; i < k_; ++i) {
    const std::uint32_t pos = bit_position(h1, h2, i);
    bits_[pos / 8] |= static_cast<std::uint8_t>(1u << (pos % 8));
  }
  ++inserted_;
}

bool SubscriptionFilter::query(std::string_view element) const {
  const auto [h1, h2] = murmur3_x64_128(element);
  for (std::uint32_t i = 0; i < k_; ++i) {
    const std::uint32_t pos = bit_position(h1, h2, i);
    if ((bits_[pos / 8] & (1u << (pos % 8))) == 0) return false;
  }
  return true;
}

std::uint64_t SubscriptionFilter::popcount() const {
  std::uint64_t total = 0;
  for (std::uint8_t byte : bits_) total += static_cast<std::uint64_t>(std::popcount(byte));
  return total;
}

bool SubscriptionFilter::test_bit(std::uint32_t position) const {
  if (position >= m_) throw ParameterError("bit position out of range");
  return (bits_[position / 8] & (1u << (position % 8))) != 0;
}

namespace {

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t get_u32_le(std::span<const std::uint8_t> bytes, std::size_t at) {
  return static_cast<std::uint32_t>(bytes[at]) |
         static_cast<std::uint32_t>(bytes[at + 1]) << 8 |
         static_cast<std::uint32_t>(bytes[at + 2]) << 16 |
         static_cast<std::uint32_t>(bytes[at + 3]) << 24;
}

}  // namespace

std::vector<std::uint8_t> SubscriptionFilter::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(9 + bits_.size());
  put_u32_le(out, m_);
  out.push_back(static_cast<std::uint8_t>(k_));
  put_u32_le(out, inserted_);
  out.insert(out.end(), bits_.begin(), bits_.end());
  return out;
}

SubscriptionFilter SubscriptionFilter::deserialize(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kHeader = 9;
  if (bytes.size() < kHeader) throw ParseError("filter document truncated");
  const std::uint32_t m = get_u32_le(bytes, 0);
  const std::uint32_t k = bytes[4];
  const std::uint32_t inserted = get_u32_le(bytes, 5);
  if (m < 8 || m % 8 != 0) throw ParseError("filter bit count invalid");
  if (k < 1 || k > 16) throw ParseError("filter hash count invalid");
  if (bytes.size() != kHeader + m / 8) throw ParseError("filter data length mismatch");

  SubscriptionFilter f(m, k);
  f.inserted_ = inserted;
  std::copy(bytes.begin() + kHeader, bytes.end(), f.bits_.begin());
  if (f.popcount() > static_cast<std::uint64_t>(k) * inserted) {
    throw ParseError("filter bit census inconsistent with inserted count");
  }
  return f;
}

SubscriptionFilter make_subscription_filter(std::span<const AttributePair> attrs,
                                            std::uint32_t m_bits, std::uint32_t k_hashes) {
  std::vector<std::string> elements;
  elements.reserve(attrs.size());
  for (const auto& attr : attrs) elements.push_back(canonical_attribute(attr));
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());

  SubscriptionFilter f(m_bits, k_hashes);
  for (const auto& e : elements) f.insert(e);
  return f;
}

namespace {

std::vector<std::string> distinct_canonical(std::span<const AttributePair> attrs) {
  std::vector<std::string> out;
  out.reserve(attrs.size());
  for (const auto& attr : attrs) out.push_back(canonical_attribute(attr));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

MatchDecision match_decision(const SubscriptionFilter& filter,
                             std::span<const AttributePair> sub_attrs,
                             std::span<const AttributePair> note_attrs) {
  const auto note_elements = distinct_canonical(note_attrs);

  std::uint64_t hits = 0;
  for (const auto& e : note_elements) {
    if (filter.query(e)) ++hits;
  }

  MatchDecision d;
  d.filter_match = hits >= filter.inserted();
  d.exact_match = true;
  for (const auto& e : distinct_canonical(sub_attrs)) {
    if (!std::binary_search(note_elements.begin(), note_elements.end(), e)) {
      d.exact_match = false;
      break;
    }
  }
  return d;
}

bool match_subscription(const SubscriptionFilter& filter,
                        std::span<const AttributePair> sub_attrs,
                        std::span<const AttributePair> note_attrs) {
  const MatchDecision d = match_decision(filter, sub_attrs, note_attrs);
  return d.filter_match && d.exact_match;
}

}  // namespace drwps
