#pragma once

// Reference lemmatizers: identity pass-through, training-lexicon lookup,
// and an edit-tree classifier.
//
// An edit tree is a canonical word-to-lemma transformation rule. Building
// one from (word, lemma) locates the leftmost-longest common substring,
// records how many codepoints the word keeps verbatim on each side of it,
// and recurses on the prefix and suffix residues; a pair with no common
// substring becomes a literal replacement. Because the node stores prefix
// and suffix lengths of the *word* rather than the matched text, the same
// inflection pattern built from different stems yields the same tree
// ("kotem"->"kot" and "plotem"->"plot" produce one rule).

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lemkit {

/// The paper's no-op reference model: output equals input.
std::string identity_lemmatize(const std::string& phrase);

// ---- edit trees -------------------------------------------------------------

struct EditTree {
    enum class Kind { replace, split };
    Kind kind = Kind::replace;

    // replace: the word slot must equal `source`; the result is `target`.
    std::u32string source;
    std::u32string target;

    // split: the word keeps codepoints [prefix_len, size-suffix_len)
    // verbatim; the residues are transformed by the subtrees.
    std::size_t prefix_len = 0;
    std::size_t suffix_len = 0;
    std::unique_ptr<EditTree> left;
    std::unique_ptr<EditTree> right;

    bool operator==(const EditTree& other) const;
    EditTree clone() const;
};

EditTree build_edit_tree(const std::string& word, const std::string& lemma);
EditTree build_edit_tree_u32(const std::u32string& word,
                             const std::u32string& lemma);

/// Apply a tree. Inapplicability is a value, not an error.
std::optional<std::string> apply_edit_tree(const EditTree& tree,
                                           const std::string& word);
std::optional<std::u32string> apply_edit_tree_u32(const EditTree& tree,
                                                  const std::u32string& word);

/// Canonical one-line text form, e.g. (S 0 2 (R "" "") (R "ie" "o")).
/// Doubles as the deterministic tie-break key between trees.
std::string serialize_edit_tree(const EditTree& tree);

/// Leftmost-longest common substring: maximal length, ties broken by the
/// smallest start in `a`, then in `b`. Returns length 0 when disjoint.
struct CommonSubstring {
    std::size_t len = 0;
    std::size_t start_a = 0;
    std::size_t start_b = 0;
};
CommonSubstring longest_common_substring(const std::u32string& a,
                                         const std::u32string& b);

// ---- lexicon baseline --------------------------------------------------------

/// Maps each training orthographic form to its most frequent lemma
/// (ties: smaller lemma). Unseen phrases pass through unchanged.
class Lexicon {
public:
    static Lexicon train(
        const std::vector<std::pair<std::string, std::string>>& pairs);

    std::string predict(const std::string& phrase) const;
    std::size_t size() const { return best_.size(); }

private:
    std::map<std::string, std::string> best_;
};

// ---- edit-tree classifier ----------------------------------------------------

/// Chooses among the trees gathered from training by suffix-conditioned
/// frequency (word suffixes of length 1..5, add-one smoothing). Prediction
/// applies the best applicable tree; identity is the fallback. Multi-token
/// phrases are lemmatized token by token.
class TreeClassifier {
public:
    struct TrainStats {
        std::size_t pairs_used = 0;
        std::size_t phrases_skipped = 0;  // token counts did not match
    };

    static TreeClassifier train(
        const std::vector<std::pair<std::string, std::string>>& pairs,
        TrainStats* stats = nullptr);

    std::string predict(const std::string& phrase) const;

    std::size_t inventory_size() const { return trees_.size(); }

    /// One `count<TAB>serialized-tree` line per inventory entry, most
    /// frequent first (ties by serialized form). For inspection and
    /// golden-file tests.
    std::string dump_inventory() const;

private:
    std::string predict_token(const std::u32string& word) const;

    std::vector<EditTree> trees_;            // by tree id
    std::vector<std::string> serialized_;    // canonical form, by tree id
    std::vector<std::size_t> tree_counts_;   // training frequency, by tree id
    // (suffix -> (tree id -> count)), suffix lengths 1..5 in codepoints
    std::map<std::u32string, std::map<std::size_t, std::size_t>> suffix_counts_;
    std::map<std::u32string, std::size_t> suffix_totals_;
};

inline constexpr std::size_t kClassifierMaxSuffix = 5;

/// Split a phrase/lemma pair into per-token pairs when the token counts
/// match; returns nothing otherwise.
std::optional<std::vector<std::pair<std::string, std::string>>>
split_phrase_pair(const std::string& phrase, const std::string& lemma);

}  // namespace lemkit
