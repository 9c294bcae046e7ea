#include "qtr/fingerprint.hpp"

#include <bit>

#include "qtr/error.hpp"

namespace qtr {

namespace {

void check_length(uint32_t fl) {
  if (fl == 0 || fl % 64 != 0)
    throw ContractError("fingerprint length must be a positive multiple of 64, got " +
                        std::to_string(fl));
}

void check_same_length(const Fingerprint& a, const Fingerprint& b) {
  if (a.length() != b.length())
    throw ContractError("fingerprint length mismatch: " + std::to_string(a.length()) +
                        " vs " + std::to_string(b.length()));
}

}  // namespace

Fingerprint::Fingerprint(uint32_t fl) : fl_(fl) {
  check_length(fl);
  words_.assign(fl / 64, 0);
}

Fingerprint::Fingerprint(std::vector<uint64_t> words, uint32_t fl)
    : words_(std::move(words)), fl_(fl) {
  check_length(fl);
  if (words_.size() != fl / 64)
    throw ContractError("fingerprint word count does not match length");
}

Fingerprint Fingerprint::from_hex(std::string_view hex, uint32_t fl) {
  check_length(fl);
  if (hex.size() != fl / 4)
    throw ContractError("hex fingerprint must have fl/4 characters");
  std::vector<uint64_t> words(fl / 64, 0);
  for (uint32_t c = 0; c < hex.size(); ++c) {
    char ch = hex[c];
    uint32_t nibble;
    if (ch >= '0' && ch <= '9') nibble = ch - '0';
    else if (ch >= 'a' && ch <= 'f') nibble = 10 + (ch - 'a');
    else throw ContractError(std::string("invalid hex character '") + ch + "'");
    for (uint32_t k = 0; k < 4; ++k) {
      if (nibble & (8u >> k)) {
        uint32_t i = 4 * c + k;
        words[i >> 6] |= uint64_t{1} << (i & 63);
      }
    }
  }
  return Fingerprint(std::move(words), fl);
}

bool Fingerprint::test(uint32_t i) const {
  if (i >= fl_) throw ContractError("bit index " + std::to_string(i) + " out of range");
  return (words_[i >> 6] >> (i & 63)) & 1;
}

uint32_t Fingerprint::popcount() const {
  uint32_t n = 0;
  for (uint64_t w : words_) n += std::popcount(w);
  return n;
}

bool Fingerprint::any() const {
  for (uint64_t w : words_)
    if (w) return true;
  return false;
}

std::string Fingerprint::to_hex() const {
  static const char digits[] = "0123456789abcdef";
  std::string out(fl_ / 4, '0');
  for (uint32_t c = 0; c < out.size(); ++c) {
    uint32_t nibble = 0;
    for (uint32_t k = 0; k < 4; ++k) {
      uint32_t i = 4 * c + k;
      if ((words_[i >> 6] >> (i & 63)) & 1) nibble |= 8u >> k;
    }
    out[c] = digits[nibble];
  }
  return out;
}

bool is_submask(const Fingerprint& a, const Fingerprint& b) {
  check_same_length(a, b);
  auto aw = a.words(), bw = b.words();
  for (std::size_t i = 0; i < aw.size(); ++i)
    if (aw[i] & ~bw[i]) return false;
  return true;
}

Fingerprint bit_or(const Fingerprint& a, const Fingerprint& b) {
  check_same_length(a, b);
  auto aw = a.words(), bw = b.words();
  std::vector<uint64_t> out(aw.size());
  for (std::size_t i = 0; i < aw.size(); ++i) out[i] = aw[i] | bw[i];
  return Fingerprint(std::move(out), a.length());
}

std::size_t count_ones_at(std::span<const Fingerprint> fps, uint32_t i) {
  std::size_t n = 0;
  for (const auto& f : fps)
    if (f.test(i)) ++n;
  return n;
}

std::size_t FingerprintHash::operator()(const Fingerprint& f) const {
  // FNV-1a over the word array.
  uint64_t h = 0xcbf29ce484222325ull;
  for (uint64_t w : f.words()) {
    for (int b = 0; b < 8; ++b) {
      h ^= (w >> (8 * b)) & 0xff;
      h *= 0x100000001b3ull;
    }
  }
  return static_cast<std::size_t>(h);
}

}  // namespace qtr
