#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace drwps {

// One attribute of a subscription or notification, name and value.
using AttributePair = std::pair<std::string, std::string>;

// MurmurHash3 x64 128-bit (Austin Appleby's public-domain function).
// Returns the two 64-bit halves.
std::array<std::uint64_t, 2> murmur3_x64_128(std::span<const std::uint8_t> data,
                                             std::uint32_t seed = 0);
std::array<std::uint64_t, 2> murmur3_x64_128(std::string_view data, std::uint32_t seed = 0);

// Canonical byte string hashed for an attribute pair: name and value trimmed
// of ASCII whitespace, name lowercased (value case preserved), joined as
// "name=value".
std::string canonical_attribute(std::string_view name, std::string_view value);
std::string canonical_attribute(const AttributePair& attr);

// Bloom filter over canonicalized attribute strings.
//
// Bit positions for an element come from double hashing:
//   pos_i = (h1 + i * h2) mod m   for i in [0, k)
// where (h1, h2) are the murmur3_x64_128 halves of the element and h2 is
// forced odd (h2 | 1) so the stride never collapses. Arithmetic wraps mod
// 2^64 before the final reduction.
//
// Wire format, little-endian: u32 bit count m, u8 hash count k, u32 inserted
// count, then m/8 data bytes with bit j stored in byte j/8 at in-byte
// position j%8.
class SubscriptionFilter {
 public:
  static constexpr std::uint32_t kDefaultBits = 1024;
  static constexpr std::uint32_t kDefaultHashes = 7;

  // m must be a multiple of 8 and at least 8; k in [1, 16].
  SubscriptionFilter(std::uint32_t m_bits, std::uint32_t k_hashes);

  void insert(std::string_view element);
  bool query(std::string_view element) const;

  std::uint32_t bit_count() const { return m_; }
  std::uint32_t hash_count() const { return k_; }
  std::uint32_t inserted() const { return inserted_; }

  std::uint64_t popcount() const;
  bool test_bit(std::uint32_t position) const;

  std::vector<std::uint8_t> serialize() const;
  static SubscriptionFilter deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const SubscriptionFilter&, const SubscriptionFilter&) = default;

 private:
  std::uint32_t bit_position(std::uint64_t h1, std::uint64_t h2, std::uint32_t i) const;

  std::uint32_t m_ = 0;
  std::uint32_t k_ = 0;
  std::uint32_t inserted_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Builds the filter for a subscription's attributes. Canonical duplicates
// collapse before insertion, so inserted() counts distinct canonical
// elements; the filter-side match rule below depends on that.
SubscriptionFilter make_subscription_filter(
    std::span<const AttributePair> attrs,
    std::uint32_t m_bits = SubscriptionFilter::kDefaultBits,
    std::uint32_t k_hashes = SubscriptionFilter::kDefaultHashes);

// Conjunctive match decision for one (subscription, notification) pair.
//
// filter_match is what a node holding only the filter can compute: each
// distinct canonicalized notification attribute that passes query() counts
// as a hit, and the pair matches when hits >= inserted(). exact_match is the
// ground truth: every subscription attribute appears (canonicalized) among
// the notification's attributes. filter_match can be a false positive but
// never a false negative relative to exact_match.
struct MatchDecision {
  bool filter_match = false;
  bool exact_match = false;
};

MatchDecision match_decision(const SubscriptionFilter& filter,
                             std::span<const AttributePair> sub_attrs,
                             std::span<const AttributePair> note_attrs);

// Filter-and-exact conjunction, the strictest decision available when both
// sides are known.
bool match_subscription(const SubscriptionFilter& filter,
                        std::span<const AttributePair> sub_attrs,
                        std::span<const AttributePair> note_attrs);

}  // namespace drwps
