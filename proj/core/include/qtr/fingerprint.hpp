#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qtr {

/// Fixed-length bit string. Bit i lives in word i/64 at position i%64.
/// Immutable after construction; all binary operations require equal lengths.
class Fingerprint {
 public:
  // All-zero fingerprint of length fl (fl > 0, multiple of 64).
  explicit Fingerprint(uint32_t fl);

  // Takes ownership of word storage; words.size() must equal fl/64.
  Fingerprint(std::vector<uint64_t> words, uint32_t fl);

  // Parses the hex encoding produced by to_hex().
  static Fingerprint from_hex(std::string_view hex, uint32_t fl);

  uint32_t length() const { return fl_; }
  bool test(uint32_t i) const;
  uint32_t popcount() const;
  bool any() const;

  std::span<const uint64_t> words() const { return words_; }

  // Lowercase hex, fl/4 characters; bit 0 is the most significant bit of
  // the first character.
  std::string to_hex() const;

  friend bool operator==(const Fingerprint& a, const Fingerprint& b) = default;

 private:
  std::vector<uint64_t> words_;
  uint32_t fl_;
};

// true iff every bit set in a is also set in b.
bool is_submask(const Fingerprint& a, const Fingerprint& b);

Fingerprint bit_or(const Fingerprint& a, const Fingerprint& b);

// Number of fingerprints in fps with bit i set.
std::size_t count_ones_at(std::span<const Fingerprint> fps, uint32_t i);

struct FingerprintHash {
  std::size_t operator()(const Fingerprint& f) const;
};

}  // namespace qtr
