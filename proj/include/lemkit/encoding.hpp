#pragma once

// Character vocabulary and model input packing.
//
// Input layout with context (ids):
//
//   phrase ++ SEP ++ left-context ++ LMARK ++ phrase ++ RMARK ++ right-context
//
// where context tokens are joined by single-space codepoints and the phrase
// is repeated between the markers so the model sees it both in isolation
// and in situ. Without context the input is the phrase codepoints alone.
// Targets are lemma codepoints terminated by EOS.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lemkit/corpus.hpp"
#include "lemkit/rng.hpp"

namespace lemkit {

using TokenId = std::int32_t;

// Special ids occupy the bottom of every vocabulary.
inline constexpr TokenId kPad = 0;
inline constexpr TokenId kBos = 1;
inline constexpr TokenId kEos = 2;
inline constexpr TokenId kSep = 3;
inline constexpr TokenId kLeftMark = 4;
inline constexpr TokenId kRightMark = 5;
inline constexpr TokenId kUnk = 6;
inline constexpr TokenId kFirstCharId = 7;

class Vocab {
public:
    Vocab() = default;

    /// Deterministic construction: the distinct codepoints of all document
    /// tokens, orthographic forms and lemmas, sorted by scalar value, get
    /// ids 7, 8, ... U+0020 is always included because the encoder inserts
    /// it between context tokens.
    static Vocab build(const Corpus& corpus);

    TokenId id_of(char32_t cp) const {
        const auto it = id_of_.find(cp);
        return it == id_of_.end() ? kUnk : it->second;
    }

    /// Codepoint for a character id (id >= 7). Throws on out-of-range ids.
    char32_t codepoint_of(TokenId id) const;

    std::size_t size() const { return kFirstCharId + codepoints_.size(); }

    /// Text serialization: a header line naming the 7 specials, then one
    /// `id<TAB>codepoint-hex` line per character. Byte-deterministic.
    std::string serialize() const;
    static Vocab deserialize(const std::string& text);

    void save(const std::string& path) const;
    static Vocab load(const std::string& path);

    /// FNV-1a over the serialized form; stored in checkpoints so a model is
    /// never decoded with the wrong vocabulary.
    std::uint64_t hash() const;

private:
    std::map<char32_t, TokenId> id_of_;
    std::vector<char32_t> codepoints_;  // index i holds codepoint of id 7+i
};

/// How much context accompanies a phrase.
struct ContextPolicy {
    enum class Kind { none, fixed, variable };
    Kind kind = Kind::none;
    std::size_t fixed_k = 0;   // fixed: 1..max_span
    double p_none = 0.0;       // variable: probability of no context
    std::size_t k_min = 0;     // variable: inclusive bounds
    std::size_t k_max = 0;

    static ContextPolicy none();
    static ContextPolicy fixed(std::size_t k);
    static ContextPolicy variable(double p_none, std::size_t k_min,
                                  std::size_t k_max);

    /// Parse "none", "fixed:K" or "variable[:P:KMIN:KMAX]"; the bare
    /// "variable" form uses the 0.30 / 8..64 defaults.
    static ContextPolicy parse(const std::string& text);

    void validate(std::size_t max_span) const;
    std::string to_string() const;
};

/// Draw a context length: none (no context) or a token count. Used both in
/// training and in variable-context evaluation.
std::optional<std::size_t> sample_context_length(const ContextPolicy& policy,
                                                 SplitMix64& rng);

struct EncodedExample {
    std::vector<TokenId> input_ids;
    std::vector<TokenId> target_ids;  // lemma codepoints + EOS
    std::size_t input_len = 0;        // content length before padding
};

/// Pack one sample. `window` must already be truncated to the sampled
/// context length when `with_context` is true; `fixed_input_len` == 0 means
/// no padding. Throws when the content exceeds a requested fixed length or
/// when the resulting input would be empty.
EncodedExample encode_example(const std::string& phrase,
                              const std::string& lemma,
                              const ContextWindow* window, const Vocab& vocab,
                              std::size_t fixed_input_len = 0);

/// Inverse of character encoding. Decoding stops at the first EOS; PAD,
/// BOS and the three marker ids produce no output; UNK renders as U+FFFD.
std::string decode_ids(const std::vector<TokenId>& ids, const Vocab& vocab);

}  // namespace lemkit
