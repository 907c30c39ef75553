#include "lemkit/corpus.hpp"

#include <fstream>
#include <sstream>

#include "lemkit/common.hpp"

namespace lemkit {

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& msg) {
    fail(ErrorCode::parse, "line " + std::to_string(line_no) + ": " + msg);
}

void validate_token(const std::string& tok, std::size_t line_no) {
    if (tok.empty()) parse_fail(line_no, "empty token");
    for (char32_t cp : utf8_decode(tok)) {
        if (is_space_cp(cp))
            parse_fail(line_no, "token contains whitespace: '" + tok + "'");
    }
}

std::size_t parse_index(const std::string& field, std::size_t line_no,
                        const char* what) {
    if (field.empty()) parse_fail(line_no, std::string("empty ") + what);
    std::size_t value = 0;
    for (char c : field) {
        if (c < '0' || c > '9')
            parse_fail(line_no,
                       std::string("non-numeric ") + what + ": '" + field + "'");
        value = value * 10 + static_cast<std::size_t>(c - '0');
    }
    return value;
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        const std::vector<std::string> fields = split(line, '\t');
        if (fields[0] == "D") {
            if (fields.size() != 3)
                parse_fail(line_no, "D record needs exactly 3 fields, got " +
                                        std::to_string(fields.size()));
            Document doc;
            doc.id = fields[1];
            if (doc.id.empty()) parse_fail(line_no, "empty document id");
            if (corpus.doc_index.count(doc.id))
                parse_fail(line_no, "duplicate document id '" + doc.id + "'");
            doc.tokens = split(fields[2], ' ');
            if (fields[2].empty()) doc.tokens.clear();
            if (doc.tokens.empty())
                parse_fail(line_no, "document '" + doc.id + "' has no tokens");
            for (const auto& tok : doc.tokens) validate_token(tok, line_no);
            corpus.doc_index.emplace(doc.id, corpus.documents.size());
            corpus.documents.push_back(std::move(doc));
        } else if (fields[0] == "S") {
            if (fields.size() != 6)
                parse_fail(line_no, "S record needs exactly 6 fields, got " +
                                        std::to_string(fields.size()));
            LemmaSample s;
            s.doc_id = fields[1];
            const auto it = corpus.doc_index.find(s.doc_id);
            if (it == corpus.doc_index.end())
                parse_fail(line_no, "unknown document id '" + s.doc_id +
                                        "' (D record must come first)");
            s.doc_index = it->second;
            s.start = parse_index(fields[2], line_no, "span start");
            s.end = parse_index(fields[3], line_no, "span end");
            const Document& doc = corpus.documents[s.doc_index];
            if (s.start >= s.end || s.end > doc.tokens.size())
                parse_fail(line_no,
                           "span [" + fields[2] + "," + fields[3] +
                               ") out of bounds for document '" + s.doc_id +
                               "' with " + std::to_string(doc.tokens.size()) +
                               " tokens");
            s.orthographic = fields[4];
            s.lemma = fields[5];
            std::string joined;
            for (std::size_t i = s.start; i < s.end; ++i) {
                if (i > s.start) joined += ' ';
                joined += doc.tokens[i];
            }
            if (joined != s.orthographic)
                parse_fail(line_no, "orthographic field '" + s.orthographic +
                                        "' does not match span text '" +
                                        joined + "'");
            if (s.lemma.empty()) parse_fail(line_no, "empty lemma");
            corpus.samples.push_back(std::move(s));
        } else {
            parse_fail(line_no, "unknown record tag '" + fields[0] + "'");
        }
    }
    return corpus;
}

Corpus parse_corpus_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open corpus file: " + path);
    return parse_corpus(in);
}

std::string serialize_corpus(const Corpus& corpus) {
    std::string out;
    for (const Document& doc : corpus.documents) {
        out += "D\t";
        out += doc.id;
        out += '\t';
        out += join(doc.tokens, " ");
        out += '\n';
    }
    for (const LemmaSample& s : corpus.samples) {
        out += "S\t";
        out += s.doc_id;
        out += '\t';
        out += std::to_string(s.start);
        out += '\t';
        out += std::to_string(s.end);
        out += '\t';
        out += s.orthographic;
        out += '\t';
        out += s.lemma;
        out += '\n';
    }
    return out;
}

void write_corpus_file(const Corpus& corpus, const std::string& path) {
    write_file(path, serialize_corpus(corpus));
}

ContextWindow extract_context(const Document& doc, const LemmaSample& sample,
                              std::size_t max_span) {
    if (sample.end > doc.tokens.size() || sample.start >= sample.end)
        fail(ErrorCode::invalid_argument, "sample span does not fit document");
    ContextWindow w;
    w.max_span = max_span;
    const std::size_t left_begin =
        sample.start > max_span ? sample.start - max_span : 0;
    w.left.assign(doc.tokens.begin() + static_cast<std::ptrdiff_t>(left_begin),
                  doc.tokens.begin() + static_cast<std::ptrdiff_t>(sample.start));
    const std::size_t right_end =
        std::min(doc.tokens.size(), sample.end + max_span);
    w.right.assign(doc.tokens.begin() + static_cast<std::ptrdiff_t>(sample.end),
                   doc.tokens.begin() + static_cast<std::ptrdiff_t>(right_end));
    return w;
}

ContextWindow truncate_window(const ContextWindow& w, std::size_t k) {
    if (k > w.max_span)
        fail(ErrorCode::invalid_argument,
             "truncation length " + std::to_string(k) + " exceeds max_span " +
                 std::to_string(w.max_span));
    ContextWindow out;
    out.max_span = w.max_span;
    const std::size_t nl = std::min(k, w.left.size());
    out.left.assign(w.left.end() - static_cast<std::ptrdiff_t>(nl),
                    w.left.end());
    const std::size_t nr = std::min(k, w.right.size());
    out.right.assign(w.right.begin(),
                     w.right.begin() + static_cast<std::ptrdiff_t>(nr));
    return out;
}

}  // namespace lemkit
