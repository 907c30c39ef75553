#include "lemkit/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "lemkit/common.hpp"

namespace lemkit {

std::string identity_lemmatize(const std::string& phrase) { return phrase; }

bool EditTree::operator==(const EditTree& other) const {
    if (kind != other.kind) return false;
    if (kind == Kind::replace)
        return source == other.source && target == other.target;
    return prefix_len == other.prefix_len && suffix_len == other.suffix_len &&
           *left == *other.left && *right == *other.right;
}

EditTree EditTree::clone() const {
    EditTree t;
    t.kind = kind;
    t.source = source;
    t.target = target;
    t.prefix_len = prefix_len;
    t.suffix_len = suffix_len;
    if (left) t.left = std::make_unique<EditTree>(left->clone());
    if (right) t.right = std::make_unique<EditTree>(right->clone());
    return t;
}

CommonSubstring longest_common_substring(const std::u32string& a,
                                         const std::u32string& b) {
    CommonSubstring best;
    if (a.empty() || b.empty()) return best;
    // dp[j] = length of the common suffix of a[..i] and b[..j] (1-based),
    // rolled over rows of `a`. Scanning i then j visits candidates in
    // ascending (start_a, start_b) order, so a strict > on length keeps the
    // leftmost-longest occurrence.
    std::vector<std::size_t> dp(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = 0;  // dp[j-1] from the previous row
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = dp[j];
            if (a[i - 1] == b[j - 1]) {
                const std::size_t len = diag + 1;
                dp[j] = len;
                if (len > best.len) {
                    best.len = len;
                    best.start_a = i - len;
                    best.start_b = j - len;
                } else if (len == best.len && len > 0) {
                    const std::size_t sa = i - len, sb = j - len;
                    if (sa < best.start_a ||
                        (sa == best.start_a && sb < best.start_b)) {
                        best.start_a = sa;
                        best.start_b = sb;
                    }
                }
            } else {
                dp[j] = 0;
            }
            diag = up;
        }
    }
    return best;
}

EditTree build_edit_tree_u32(const std::u32string& word,
                             const std::u32string& lemma) {
    const CommonSubstring lcs = longest_common_substring(word, lemma);
    EditTree t;
    if (lcs.len == 0) {
        t.kind = EditTree::Kind::replace;
        t.source = word;
        t.target = lemma;
        return t;
    }
    t.kind = EditTree::Kind::split;
    t.prefix_len = lcs.start_a;
    t.suffix_len = word.size() - lcs.start_a - lcs.len;
    t.left = std::make_unique<EditTree>(build_edit_tree_u32(
        word.substr(0, lcs.start_a), lemma.substr(0, lcs.start_b)));
    t.right = std::make_unique<EditTree>(
        build_edit_tree_u32(word.substr(lcs.start_a + lcs.len),
                            lemma.substr(lcs.start_b + lcs.len)));
    return t;
}

EditTree build_edit_tree(const std::string& word, const std::string& lemma) {
    return build_edit_tree_u32(utf8_decode(word), utf8_decode(lemma));
}

std::optional<std::u32string> apply_edit_tree_u32(const EditTree& tree,
                                                  const std::u32string& word) {
    if (tree.kind == EditTree::Kind::replace) {
        if (word != tree.source) return std::nullopt;
        return tree.target;
    }
    if (word.size() < tree.prefix_len + tree.suffix_len) return std::nullopt;
    const std::u32string prefix = word.substr(0, tree.prefix_len);
    const std::u32string middle = word.substr(
        tree.prefix_len, word.size() - tree.prefix_len - tree.suffix_len);
    const std::u32string suffix = word.substr(word.size() - tree.suffix_len);
    const auto lp = apply_edit_tree_u32(*tree.left, prefix);
    if (!lp) return std::nullopt;
    const auto rp = apply_edit_tree_u32(*tree.right, suffix);
    if (!rp) return std::nullopt;
    return *lp + middle + *rp;
}

std::optional<std::string> apply_edit_tree(const EditTree& tree,
                                           const std::string& word) {
    const auto result = apply_edit_tree_u32(tree, utf8_decode(word));
    if (!result) return std::nullopt;
    return utf8_encode(*result);
}

namespace {

std::string quote_u32(const std::u32string& s) {
    std::string out = "\"";
    for (char32_t cp : s) {
        if (cp == U'"' || cp == U'\\') out += '\\';
        out += utf8_encode_cp(cp);
    }
    out += '"';
    return out;
}

}  // namespace

std::string serialize_edit_tree(const EditTree& tree) {
    if (tree.kind == EditTree::Kind::replace)
        return "(R " + quote_u32(tree.source) + " " + quote_u32(tree.target) +
               ")";
    return "(S " + std::to_string(tree.prefix_len) + " " +
           std::to_string(tree.suffix_len) + " " +
           serialize_edit_tree(*tree.left) + " " +
           serialize_edit_tree(*tree.right) + ")";
}

std::optional<std::vector<std::pair<std::string, std::string>>>
split_phrase_pair(const std::string& phrase, const std::string& lemma) {
    const auto words = split(phrase, ' ');
    const auto lemmas = split(lemma, ' ');
    if (words.size() != lemmas.size()) return std::nullopt;
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i)
        out.emplace_back(words[i], lemmas[i]);
    return out;
}

Lexicon Lexicon::train(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
    if (pairs.empty())
        fail(ErrorCode::invalid_argument, "lexicon: empty training set");
    std::map<std::string, std::map<std::string, std::size_t>> counts;
    for (const auto& [phrase, lemma] : pairs) ++counts[phrase][lemma];
    Lexicon lex;
    for (const auto& [phrase, lemma_counts] : counts) {
        // Highest count wins; the map order gives the lexicographically
        // smallest lemma on ties.
        std::string best;
        std::size_t best_count = 0;
        for (const auto& [lemma, count] : lemma_counts) {
            if (count > best_count) {
                best = lemma;
                best_count = count;
            }
        }
        lex.best_.emplace(phrase, best);
    }
    return lex;
}

std::string Lexicon::predict(const std::string& phrase) const {
    const auto it = best_.find(phrase);
    return it == best_.end() ? phrase : it->second;
}

TreeClassifier TreeClassifier::train(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    TrainStats* stats) {
    if (pairs.empty())
        fail(ErrorCode::invalid_argument, "tree classifier: empty training set");
    TreeClassifier model;
    TrainStats local;
    std::map<std::string, std::size_t> id_by_serial;
    for (const auto& [phrase, lemma] : pairs) {
        const auto token_pairs = split_phrase_pair(phrase, lemma);
        if (!token_pairs) {
            ++local.phrases_skipped;
            continue;
        }
        for (const auto& [word_s, lemma_s] : *token_pairs) {
            const std::u32string word = utf8_decode(word_s);
            const std::u32string lem = utf8_decode(lemma_s);
            EditTree tree = build_edit_tree_u32(word, lem);
            std::string serial = serialize_edit_tree(tree);
            const auto [it, inserted] =
                id_by_serial.emplace(std::move(serial), model.trees_.size());
            if (inserted) {
                model.serialized_.push_back(it->first);
                model.trees_.push_back(std::move(tree));
                model.tree_counts_.push_back(0);
            }
            const std::size_t tree_id = it->second;
            ++model.tree_counts_[tree_id];
            ++local.pairs_used;
            const std::size_t max_k =
                std::min(kClassifierMaxSuffix, word.size());
            for (std::size_t k = 1; k <= max_k; ++k) {
                const std::u32string suffix = word.substr(word.size() - k);
                ++model.suffix_counts_[suffix][tree_id];
                ++model.suffix_totals_[suffix];
            }
        }
    }
    if (local.pairs_used == 0)
        fail(ErrorCode::invalid_argument,
             "tree classifier: no usable (word, lemma) pairs");
    if (stats) *stats = local;
    return model;
}

std::string TreeClassifier::predict_token(const std::u32string& word) const {
    const std::size_t inventory = trees_.size();
    double best_score = 0.0;
    std::size_t best_id = inventory;  // sentinel: nothing applicable yet
    std::optional<std::u32string> best_result;
    for (std::size_t id = 0; id < inventory; ++id) {
        auto result = apply_edit_tree_u32(trees_[id], word);
        if (!result) continue;
        double score = 0.0;
        const std::size_t max_k = std::min(kClassifierMaxSuffix, word.size());
        for (std::size_t k = 1; k <= max_k; ++k) {
            const std::u32string suffix = word.substr(word.size() - k);
            std::size_t c = 0, total = 0;
            const auto ts = suffix_totals_.find(suffix);
            if (ts != suffix_totals_.end()) {
                total = ts->second;
                const auto& per_tree = suffix_counts_.at(suffix);
                const auto ct = per_tree.find(id);
                if (ct != per_tree.end()) c = ct->second;
            }
            score += std::log(static_cast<double>(c + 1) /
                              static_cast<double>(total + inventory));
        }
        const bool better =
            best_id == inventory || score > best_score ||
            (score == best_score && serialized_[id] < serialized_[best_id]);
        if (better) {
            best_score = score;
            best_id = id;
            best_result = std::move(result);
        }
    }
    if (best_id == inventory) return utf8_encode(word);  // identity fallback
    return utf8_encode(*best_result);
}

std::string TreeClassifier::predict(const std::string& phrase) const {
    const auto words = split(phrase, ' ');
    std::vector<std::string> out;
    out.reserve(words.size());
    for (const std::string& w : words)
        out.push_back(predict_token(utf8_decode(w)));
    return join(out, " ");
}

std::string TreeClassifier::dump_inventory() const {
    std::vector<std::size_t> order(trees_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
        if (tree_counts_[a] != tree_counts_[b])
            return tree_counts_[a] > tree_counts_[b];
        return serialized_[a] < serialized_[b];
    });
    std::string out;
    for (std::size_t id : order) {
        out += std::to_string(tree_counts_[id]);
        out += '\t';
        out += serialized_[id];
        out += '\n';
    }
    return out;
}

}  // namespace lemkit
