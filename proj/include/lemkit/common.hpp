#pragma once

// Shared plumbing: error type, UTF-8 codec, FNV hashing, small string and
// file helpers used across the library.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lemkit {

enum class ErrorCode {
    io,                // file could not be read/written
    parse,             // malformed input data
    invalid_argument,  // caller violated a precondition
    numeric,           // non-finite value where a finite one is required
    state,             // operation not valid for the object's current state
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

// ---- UTF-8 ----------------------------------------------------------------

/// Decode UTF-8 bytes to codepoints. Throws ErrorCode::parse on invalid
/// sequences (overlong forms, surrogates and out-of-range values included).
std::u32string utf8_decode(std::string_view bytes);

std::string utf8_encode(std::u32string_view cps);
std::string utf8_encode_cp(char32_t cp);

/// Whitespace test used for token validation (ASCII controls, the Unicode
/// space separators, and the line/paragraph separators).
bool is_space_cp(char32_t cp) noexcept;

// ---- hashing ---------------------------------------------------------------

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;

std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t seed = kFnvOffset) noexcept;

std::string hex64(std::uint64_t v);

// ---- strings ---------------------------------------------------------------

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string trim(std::string_view s);

/// Fixed-point decimal with `digits` places, non-scientific. Used everywhere
/// a metric value is written to a report so output stays byte-stable.
std::string format_fixed(double v, int digits);

// ---- files -----------------------------------------------------------------

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace lemkit
