#pragma once

#include <cstddef>
#include <string_view>

namespace archnet {

// Length of the longest common subsequence, over code points for the
// string_view overload.
std::size_t lcs_length(std::u32string_view a, std::u32string_view b);
std::size_t lcs_length(std::string_view a, std::string_view b);

// Similarity from indel edit distance (substitutions disallowed):
// 100·(1 − indel/(|a|+|b|)) = 100·2·LCS/(|a|+|b|). Two empty strings score
// 100. Symmetric, in [0,100], 100 iff a == b.
double ratio(std::u32string_view a, std::u32string_view b);
double ratio(std::string_view a, std::string_view b);

// Best ratio between the shorter string and any equally long contiguous
// window of the longer one; 100 when the shorter string is empty. Symmetric.
double partial_ratio(std::u32string_view a, std::u32string_view b);
double partial_ratio(std::string_view a, std::string_view b);

}  // namespace archnet
