#pragma once

// Synthetic corpus generator.
//
// The generated language separates two sample populations:
//  - unambiguous samples: the surface form is stem + inflection suffix and
//    the lemma is stem + base suffix -- solvable from the phrase alone;
//  - ambiguous samples: one surface suffix maps to two different lemma
//    suffixes, and the correct one is determined solely by a trigger token
//    placed a few positions away in the document. Without context these
//    samples are irreducibly ambiguous, which is exactly the phenomenon a
//    context window is supposed to resolve.
//
// Stems end in a consonant and all suffixes start with a vowel, so every
// emitted surface decomposes uniquely; a conflict checker verifies that no
// surface form maps to two lemmas under the same context condition.

#include <cstdint>
#include <string>

#include "lemkit/corpus.hpp"

namespace lemkit {

struct ToySpec {
    std::size_t train_count = 1000;
    std::size_t dev_count = 200;
    std::size_t test_count = 200;
    std::uint64_t seed = 0;
    double ambiguous_fraction = 0.30;
    double multi_token_fraction = 0.10;  // two-token phrases, unambiguous
    bool held_out_stems = false;  // disjoint stem inventories per split
    std::size_t max_trigger_distance = 4;  // tokens between trigger and phrase
    std::string out_dir;

    void validate() const;
};

struct ToyCorpus {
    Corpus train;
    Corpus dev;
    Corpus test;
};

/// Document ids carry the sample population as a suffix: `-amb` for
/// trigger-dependent samples, `-una` for single-token unambiguous ones and
/// `-mul` for two-token phrases.
ToyCorpus generate_toy_corpus(const ToySpec& spec);

/// Generate and write `train.tsv`, `dev.tsv`, `test.tsv` under
/// spec.out_dir. Byte-deterministic for a given spec.
void write_toy_corpus(const ToySpec& spec);

/// True when the sample is of the trigger-dependent population.
bool is_ambiguous_sample_id(const std::string& doc_id);

}  // namespace lemkit
