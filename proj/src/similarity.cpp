#include "archnet/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "archnet/text.hpp"

namespace archnet {

namespace {

// Bit-parallel LCS length (Hyyrö). The pattern occupies m bits across
// 64-bit words; V starts all-ones and one update per text character keeps
// the invariant that zero bits of V mark matched pattern positions:
//   U = V & PM[c];  V = (V + U) | (V - U)
// U is a bitwise subset of V, so V - U never borrows across words and
// equals V ^ U per word; the addition carries across words. Bits above the
// pattern length absorb carries without affecting the low region.
class LcsEngine {
 public:
  explicit LcsEngine(std::u32string_view pattern)
      : m_(pattern.size()), words_((m_ + 63) / 64) {
    for (std::size_t i = 0; i < m_; ++i) {
      auto& mask = pm_[pattern[i]];
      if (mask.empty()) mask.assign(words_, 0);
      mask[i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }

  std::size_t run(std::u32string_view text) const {
    if (m_ == 0) return 0;
    std::vector<std::uint64_t> v(words_, ~std::uint64_t{0});
    std::vector<std::uint64_t> u(words_);
    for (char32_t c : text) {
      auto it = pm_.find(c);
      if (it == pm_.end()) continue;
      const auto& pm = it->second;
      bool carry = false;
      for (std::size_t w = 0; w < words_; ++w) {
        u[w] = v[w] & pm[w];
        std::uint64_t sum = v[w] + u[w];
        bool c1 = sum < v[w];
        std::uint64_t sum2 = sum + (carry ? 1 : 0);
        bool c2 = sum2 < sum;
        v[w] = sum2 | (v[w] ^ u[w]);
        carry = c1 || c2;
      }
    }
    std::size_t ones = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t mask = ~std::uint64_t{0};
      if (w == words_ - 1 && m_ % 64 != 0)
        mask = (std::uint64_t{1} << (m_ % 64)) - 1;
      ones += static_cast<std::size_t>(std::popcount(v[w] & mask));
    }
    return m_ - ones;
  }

  std::size_t pattern_length() const { return m_; }

 private:
  std::size_t m_;
  std::size_t words_;
  std::unordered_map<char32_t, std::vector<std::uint64_t>> pm_;
};

double ratio_from_lcs(std::size_t lcs, std::size_t la, std::size_t lb) {
  if (la + lb == 0) return 100.0;
  return 100.0 * 2.0 * static_cast<double>(lcs) /
         static_cast<double>(la + lb);
}

}  // namespace

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
  if (a.empty() || b.empty()) return 0;
  // Index the shorter string so the bit registers stay small.
  if (a.size() > b.size()) std::swap(a, b);
  return LcsEngine(a).run(b);
}

std::size_t lcs_length(std::string_view a, std::string_view b) {
  return lcs_length(decode_utf8(a), decode_utf8(b));
}

double ratio(std::u32string_view a, std::u32string_view b) {
  return ratio_from_lcs(lcs_length(a, b), a.size(), b.size());
}

double ratio(std::string_view a, std::string_view b) {
  return ratio(decode_utf8(a), decode_utf8(b));
}

double partial_ratio(std::u32string_view a, std::u32string_view b) {
  std::u32string_view s = a.size() <= b.size() ? a : b;
  std::u32string_view l = a.size() <= b.size() ? b : a;
  if (s.empty()) return 100.0;
  LcsEngine engine(s);
  std::size_t best = 0;
  for (std::size_t off = 0; off + s.size() <= l.size(); ++off) {
    best = std::max(best, engine.run(l.substr(off, s.size())));
    if (best == s.size()) break;  // a window already matches perfectly
  }
  return ratio_from_lcs(best, s.size(), s.size());
}

double partial_ratio(std::string_view a, std::string_view b) {
  return partial_ratio(decode_utf8(a), decode_utf8(b));
}

}  // namespace archnet
