#pragma once

#include <string_view>

namespace lemkit {

/// Unicode simple (one-to-one) lowercase mapping. Codepoints without a
/// lowercase mapping are returned unchanged.
char32_t to_lower_simple(char32_t cp) noexcept;

}  // namespace lemkit
