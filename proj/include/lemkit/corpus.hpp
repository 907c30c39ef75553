#pragma once

// Corpus loading and context extraction.
//
// Corpus files are UTF-8, newline-delimited, tab-separated records:
//
//   D<TAB>doc_id<TAB>token1 token2 ... tokenN
//   S<TAB>doc_id<TAB>start<TAB>end<TAB>orthographic<TAB>lemma
//
// A `D` record declares a document as a pre-tokenized token sequence
// (tokens are space-separated and may not contain whitespace). An `S`
// record declares a lemma sample: a half-open token span [start, end)
// inside a previously declared document, the surface phrase (which must
// equal the space-join of the span tokens) and its gold lemma. Lines
// starting with `#` are comments; blank lines are ignored. Field counts
// are exact.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace lemkit {

struct Document {
    std::string id;
    std::vector<std::string> tokens;
};

struct LemmaSample {
    std::string doc_id;
    std::size_t start = 0;    // token index, inclusive
    std::size_t end = 0;      // token index, exclusive
    std::string orthographic; // space-join of tokens[start..end)
    std::string lemma;
    std::size_t doc_index = 0; // index into Corpus::documents
};

struct Corpus {
    std::vector<Document> documents;
    std::vector<LemmaSample> samples;
    std::unordered_map<std::string, std::size_t> doc_index;

    const Document& document_of(const LemmaSample& s) const {
        return documents[s.doc_index];
    }
};

/// Bounded context around a phrase. `left` holds at most `max_span` tokens
/// immediately preceding the span (document order preserved), `right` at
/// most `max_span` tokens immediately following it. No padding happens at
/// this layer; document boundaries simply leave a side short.
struct ContextWindow {
    std::vector<std::string> left;
    std::vector<std::string> right;
    std::size_t max_span = 0;
};

/// Parse a corpus stream. Reports the offending line number on malformed
/// records, out-of-bounds spans, orthographic mismatches, duplicate
/// document ids and references to unknown documents (a document's D record
/// must precede its S records).
Corpus parse_corpus(std::istream& in);

Corpus parse_corpus_file(const std::string& path);

/// Canonical serialization: all D records in document order, then all S
/// records in sample order. parse(serialize(parse(x))) == parse(x).
std::string serialize_corpus(const Corpus& corpus);

void write_corpus_file(const Corpus& corpus, const std::string& path);

ContextWindow extract_context(const Document& doc, const LemmaSample& sample,
                              std::size_t max_span);

/// Keep the k tokens nearest the phrase: the last k of `left`, the first k
/// of `right`. k greater than max_span is an error.
ContextWindow truncate_window(const ContextWindow& w, std::size_t k);

}  // namespace lemkit
