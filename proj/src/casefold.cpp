#include "lemkit/casefold.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>

namespace lemkit {

namespace {

struct CasePair {
    std::uint32_t upper;
    std::uint32_t lower;
};

constexpr CasePair kLowerTable[] = {
#include "lowercase_table.inc"
};

}  // namespace

char32_t to_lower_simple(char32_t cp) noexcept {
    const auto* end = std::end(kLowerTable);
    const auto* it = std::lower_bound(
        std::begin(kLowerTable), end, static_cast<std::uint32_t>(cp),
        [](const CasePair& p, std::uint32_t v) { return p.upper < v; });
    if (it != end && it->upper == static_cast<std::uint32_t>(cp))
        return static_cast<char32_t>(it->lower);
    return cp;
}

}  // namespace lemkit
