#pragma once

#include <string>
#include <vector>

namespace ando {

/// Word in the free semigroup on generators 1..n; the empty word is the unit g0.
using Word = std::vector<int>;

Word reversed(const Word& w);
Word concat(const Word& a, const Word& b);
std::string to_string(const Word& w);  // "g0" or "1.2.1"

}  // namespace ando
