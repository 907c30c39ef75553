#include "lemkit/toygen.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <set>

#include "lemkit/common.hpp"
#include "lemkit/rng.hpp"

namespace lemkit {

namespace {

// The toy inflection language. Stems end in a consonant and every suffix
// starts with a vowel, so surfaces decompose uniquely. 'p' and 'n' are
// reserved for the trigger tokens and appear nowhere else.
const std::array<const char*, 16> kConsonants = {
    "b", "c", "d", "f", "g", "k", "l", "m",
    "r", "s", "t", "w", "z", "ł", "ż", "ś"};
const std::array<const char*, 7> kVowels = {"a", "e", "i", "o", "u", "ą", "ó"};

struct SuffixRule {
    const char* surface;
    const char* lemma;
};

// Unambiguous single-token declensions.
const std::array<SuffixRule, 7> kPlainRules = {{
    {"em", ""}, {"ami", "a"}, {"ach", "a"}, {"owi", ""},
    {"ą", "a"}, {"ie", "o"}, {"u", ""},
}};

// Two-token phrases: inflected adjective + noun, both unambiguous.
constexpr SuffixRule kAdjRule = {"ego", "y"};
constexpr SuffixRule kNounRule = {"a", ""};

// The ambiguous declension: surface "<stem>y" lemmatizes to "<stem>a" when
// the trigger "pod" is nearby and to "<stem>o" when "nad" is. The triggers
// start with the reserved characters, so the disambiguating evidence is a
// character the model sees nowhere else.
constexpr const char* kAmbiguousSurfaceSuffix = "y";
constexpr const char* kTriggerA = "pod";
constexpr const char* kTriggerB = "nad";
constexpr const char* kLemmaSuffixA = "a";
constexpr const char* kLemmaSuffixB = "o";

std::string make_stem(SplitMix64& rng) {
    // C V C or C V C V C, always consonant-final.
    std::string s;
    const bool long_form = rng.bernoulli(0.5);
    const int syllables = long_form ? 2 : 1;
    for (int i = 0; i < syllables; ++i) {
        s += kConsonants[rng.uniform_below(kConsonants.size())];
        s += kVowels[rng.uniform_below(kVowels.size())];
    }
    s += kConsonants[rng.uniform_below(kConsonants.size())];
    return s;
}

std::vector<std::string> make_pool(SplitMix64& rng, std::size_t size,
                                   const std::set<std::string>& reserved) {
    std::set<std::string> seen;
    std::vector<std::string> pool;
    while (pool.size() < size) {
        std::string s = make_stem(rng);
        if (reserved.count(s) || !seen.insert(s).second) continue;
        pool.push_back(std::move(s));
    }
    return pool;
}

std::string capitalize_ascii(const std::string& s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') {
        std::string out = s;
        out[0] = static_cast<char>(out[0] - 'a' + 'A');
        return out;
    }
    return s;
}

// surface -> (context condition -> lemma); "" is the unconditional slot.
// A surface may be either unconditional or trigger-dependent, never both.
class ConflictRegistry {
public:
    void record(const std::string& surface, const std::string& condition,
                const std::string& lemma) {
        auto& slots = map_[surface];
        if (!condition.empty() && slots.count(""))
            conflict(surface, "both context-free and trigger-dependent");
        if (condition.empty() && slots.size() > (slots.count("") ? 1u : 0u))
            conflict(surface, "both context-free and trigger-dependent");
        const auto [it, inserted] = slots.emplace(condition, lemma);
        if (!inserted && it->second != lemma)
            conflict(surface, "maps to '" + it->second + "' and '" + lemma +
                                  "' under the same context");
    }

private:
    [[noreturn]] void conflict(const std::string& surface,
                               const std::string& detail) {
        fail(ErrorCode::invalid_argument,
             "toy rule conflict on surface '" + surface + "': " + detail);
    }
    std::map<std::string, std::map<std::string, std::string>> map_;
};

struct SplitContext {
    const std::vector<std::string>* stems;
    const std::vector<std::string>* ambiguous_stems;
    const std::vector<std::string>* fillers;
    std::string id_prefix;
};

void generate_split(Corpus& corpus, const ToySpec& spec,
                    const SplitContext& ctx, std::size_t count,
                    SplitMix64 rng, ConflictRegistry& registry) {
    const auto pick = [&rng](const std::vector<std::string>& v) {
        return v[rng.uniform_below(v.size())];
    };
    for (std::size_t idx = 0; idx < count; ++idx) {
        const double roll = rng.next_real();
        const bool ambiguous = roll < spec.ambiguous_fraction;
        const bool multi =
            !ambiguous &&
            roll < spec.ambiguous_fraction + spec.multi_token_fraction;

        std::vector<std::string> phrase_tokens;
        std::string lemma;
        std::string kind;
        std::string trigger;

        if (ambiguous) {
            kind = "amb";
            // A small dedicated stem pool: ambiguous surfaces recur with
            // both triggers, so surface memorization cannot resolve them
            // and the context is genuinely load-bearing.
            const std::string stem = pick(*ctx.ambiguous_stems);
            const bool use_a = rng.bernoulli(0.5);
            trigger = use_a ? kTriggerA : kTriggerB;
            phrase_tokens = {stem + kAmbiguousSurfaceSuffix};
            lemma = stem + (use_a ? kLemmaSuffixA : kLemmaSuffixB);
            // The defining property of this population: swapping the
            // trigger must flip the gold lemma.
            const std::string other =
                stem + (use_a ? kLemmaSuffixB : kLemmaSuffixA);
            if (other == lemma)
                fail(ErrorCode::internal,
                     "toy generator: ambiguous lemma does not flip with its "
                     "trigger");
            registry.record(phrase_tokens[0], kTriggerA, stem + kLemmaSuffixA);
            registry.record(phrase_tokens[0], kTriggerB, stem + kLemmaSuffixB);
        } else if (multi) {
            kind = "mul";
            const std::string adj_stem = pick(*ctx.stems);
            const std::string noun_stem = pick(*ctx.stems);
            phrase_tokens = {adj_stem + kAdjRule.surface,
                             noun_stem + kNounRule.surface};
            lemma = adj_stem + kAdjRule.lemma + " " + noun_stem +
                    kNounRule.lemma;
            registry.record(phrase_tokens[0] + " " + phrase_tokens[1], "",
                            lemma);
        } else {
            kind = "una";
            const std::string stem = pick(*ctx.stems);
            const SuffixRule& rule =
                kPlainRules[rng.uniform_below(kPlainRules.size())];
            std::string surface = stem + rule.surface;
            lemma = stem + rule.lemma;
            if (rng.next_real() < 0.05) {  // occasional proper-noun casing
                surface = capitalize_ascii(surface);
                lemma = capitalize_ascii(lemma);
            }
            phrase_tokens = {surface};
            registry.record(surface, "", lemma);
        }

        std::size_t left_len = rng.uniform_below(11);
        std::size_t right_len = rng.uniform_below(11);
        std::size_t trigger_side = 0, trigger_dist = 0;
        if (ambiguous) {
            trigger_dist = static_cast<std::size_t>(
                rng.uniform_int(1,
                                static_cast<std::int64_t>(
                                    spec.max_trigger_distance)));
            trigger_side = rng.bernoulli(0.5) ? 0 : 1;  // 0 = left, 1 = right
            if (trigger_side == 0 && left_len < trigger_dist)
                left_len = trigger_dist;
            if (trigger_side == 1 && right_len < trigger_dist)
                right_len = trigger_dist;
        }

        Document doc;
        char id_buf[32];
        std::snprintf(id_buf, sizeof(id_buf), "%s%06zu-%s",
                      ctx.id_prefix.c_str(), idx, kind.c_str());
        doc.id = id_buf;
        for (std::size_t i = 0; i < left_len; ++i)
            doc.tokens.push_back(pick(*ctx.fillers));
        const std::size_t span_start = doc.tokens.size();
        for (const std::string& t : phrase_tokens) doc.tokens.push_back(t);
        const std::size_t span_end = doc.tokens.size();
        for (std::size_t i = 0; i < right_len; ++i)
            doc.tokens.push_back(pick(*ctx.fillers));
        if (ambiguous) {
            const std::size_t pos = trigger_side == 0
                                        ? span_start - trigger_dist
                                        : span_end + trigger_dist - 1;
            doc.tokens[pos] = trigger;
        }

        LemmaSample sample;
        sample.doc_id = doc.id;
        sample.doc_index = corpus.documents.size();
        sample.start = span_start;
        sample.end = span_end;
        sample.orthographic = join(phrase_tokens, " ");
        sample.lemma = lemma;

        corpus.doc_index.emplace(doc.id, corpus.documents.size());
        corpus.documents.push_back(std::move(doc));
        corpus.samples.push_back(std::move(sample));
    }
}

}  // namespace

void ToySpec::validate() const {
    if (train_count == 0 || dev_count == 0 || test_count == 0)
        fail(ErrorCode::invalid_argument, "toy split sizes must be positive");
    if (ambiguous_fraction < 0.0 || ambiguous_fraction > 1.0)
        fail(ErrorCode::invalid_argument,
             "ambiguous_fraction must lie in [0,1]");
    if (multi_token_fraction < 0.0 ||
        ambiguous_fraction + multi_token_fraction > 1.0)
        fail(ErrorCode::invalid_argument,
             "ambiguous_fraction + multi_token_fraction must not exceed 1");
    if (max_trigger_distance < 1 || max_trigger_distance > 8)
        fail(ErrorCode::invalid_argument,
             "max_trigger_distance must lie in 1..8");
}

ToyCorpus generate_toy_corpus(const ToySpec& spec) {
    spec.validate();
    SplitMix64 root(spec.seed);
    const std::set<std::string> reserved = {kTriggerA, kTriggerB};

    SplitMix64 stem_rng = root.derive(11);
    SplitMix64 filler_rng = root.derive(12);
    SplitMix64 amb_rng = root.derive(13);
    const std::size_t pool_size = spec.held_out_stems ? 360 : 240;
    const std::size_t amb_pool_size = spec.held_out_stems ? 36 : 24;
    const std::vector<std::string> all_stems =
        make_pool(stem_rng, pool_size, reserved);
    const std::vector<std::string> all_amb_stems =
        make_pool(amb_rng, amb_pool_size, reserved);
    const std::vector<std::string> fillers =
        make_pool(filler_rng, 150, reserved);

    auto split3 = [](const std::vector<std::string>& pool, bool disjoint)
        -> std::array<std::vector<std::string>, 3> {
        if (!disjoint) return {pool, pool, pool};
        const std::size_t third = pool.size() / 3;
        const auto begin = pool.begin();
        return {std::vector<std::string>(begin, begin + static_cast<std::ptrdiff_t>(third)),
                std::vector<std::string>(begin + static_cast<std::ptrdiff_t>(third),
                                         begin + static_cast<std::ptrdiff_t>(2 * third)),
                std::vector<std::string>(begin + static_cast<std::ptrdiff_t>(2 * third), pool.end())};
    };
    const auto stems = split3(all_stems, spec.held_out_stems);
    const auto amb_stems = split3(all_amb_stems, spec.held_out_stems);

    ConflictRegistry registry;
    ToyCorpus out;
    generate_split(out.train, spec, {&stems[0], &amb_stems[0], &fillers, "tr"},
                   spec.train_count, root.derive(21), registry);
    generate_split(out.dev, spec, {&stems[1], &amb_stems[1], &fillers, "dv"},
                   spec.dev_count, root.derive(22), registry);
    generate_split(out.test, spec, {&stems[2], &amb_stems[2], &fillers, "te"},
                   spec.test_count, root.derive(23), registry);
    return out;
}

void write_toy_corpus(const ToySpec& spec) {
    if (spec.out_dir.empty())
        fail(ErrorCode::invalid_argument, "toy generator needs an output dir");
    const ToyCorpus corpus = generate_toy_corpus(spec);
    std::filesystem::create_directories(spec.out_dir);
    write_corpus_file(corpus.train, spec.out_dir + "/train.tsv");
    write_corpus_file(corpus.dev, spec.out_dir + "/dev.tsv");
    write_corpus_file(corpus.test, spec.out_dir + "/test.tsv");
}

bool is_ambiguous_sample_id(const std::string& doc_id) {
    return doc_id.size() >= 4 &&
           doc_id.compare(doc_id.size() - 4, 4, "-amb") == 0;
}

}  // namespace lemkit
