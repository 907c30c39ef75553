#include <doctest.h>

#include <sstream>

#include "lemkit/common.hpp"
#include "lemkit/corpus.hpp"
#include "lemkit/rng.hpp"

using namespace lemkit;

namespace {

Corpus parse(const std::string& text) {
    std::istringstream in(text);
    return parse_corpus(in);
}

bool docs_equal(const Corpus& a, const Corpus& b) {
    if (a.documents.size() != b.documents.size() ||
        a.samples.size() != b.samples.size())
        return false;
    for (std::size_t i = 0; i < a.documents.size(); ++i)
        if (a.documents[i].id != b.documents[i].id ||
            a.documents[i].tokens != b.documents[i].tokens)
            return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const LemmaSample& x = a.samples[i];
        const LemmaSample& y = b.samples[i];
        if (x.doc_id != y.doc_id || x.start != y.start || x.end != y.end ||
            x.orthographic != y.orthographic || x.lemma != y.lemma)
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("parse_corpus accepts a minimal well-formed record") {
    const Corpus c = parse(
        "D\td1\tw ministerstwie kultury\n"
        "S\td1\t1\t3\tministerstwie kultury\tministerstwo kultury\n");
    REQUIRE(c.documents.size() == 1);
    REQUIRE(c.samples.size() == 1);
    CHECK(c.documents[0].id == "d1");
    CHECK(c.documents[0].tokens ==
          std::vector<std::string>{"w", "ministerstwie", "kultury"});
    CHECK(c.samples[0].start == 1);
    CHECK(c.samples[0].end == 3);
    CHECK(c.samples[0].orthographic == "ministerstwie kultury");
    CHECK(c.samples[0].lemma == "ministerstwo kultury");
    CHECK(c.document_of(c.samples[0]).id == "d1");
}

TEST_CASE("parse_corpus rejects out-of-bounds spans with the line number") {
    const std::string text =
        "D\td1\ta b c\n"
        "S\td1\t2\t5\tc\tc\n";
    try {
        parse(text);
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parse);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        CHECK(std::string(e.what()).find("out of bounds") != std::string::npos);
    }
}

TEST_CASE("parse_corpus rejects an orthographic mismatch") {
    const std::string text =
        "D\td1\tw ministerstwie kultury\n"
        "S\td1\t1\t3\tministerstwa kultury\tministerstwo kultury\n";
    CHECK_THROWS_WITH_AS(parse(text),
                         doctest::Contains("does not match"), Error);
}

TEST_CASE("parse_corpus error paths") {
    CHECK_THROWS_AS(parse("D\td1\ta\nD\td1\tb\n"), Error);  // duplicate id
    CHECK_THROWS_AS(parse("S\td1\t0\t1\ta\ta\n"), Error);   // S before D
    CHECK_THROWS_AS(parse("X\td1\ta\n"), Error);            // unknown tag
    CHECK_THROWS_AS(parse("D\td1\n"), Error);               // missing field
    CHECK_THROWS_AS(parse("D\td1\ta\textra\n"), Error);     // extra field
    CHECK_THROWS_AS(parse("D\td1\ta  b\n"), Error);         // empty token
    CHECK_THROWS_AS(parse("D\td1\ta\nS\td1\t0\tx\ta\ta\n"), Error);
    CHECK_THROWS_AS(parse("D\td1\ta\nS\td1\t0\t0\t\ta\n"), Error);  // empty span
    // comments and blank lines are fine, CRLF tolerated
    const Corpus ok = parse("# comment\r\n\nD\td1\ta\r\nS\td1\t0\t1\ta\tb\n");
    CHECK(ok.samples.size() == 1);
}

TEST_CASE("extract_context truncates at document boundaries") {
    Document doc;
    doc.id = "d";
    for (int i = 0; i < 10; ++i) doc.tokens.push_back("t" + std::to_string(i));

    LemmaSample s;
    s.doc_id = "d";
    s.start = 3;
    s.end = 5;

    SUBCASE("max_span larger than the document") {
        const ContextWindow w = extract_context(doc, s, 64);
        CHECK(w.left == std::vector<std::string>{"t0", "t1", "t2"});
        REQUIRE(w.right.size() == 5);
        CHECK(w.right.front() == "t5");
        CHECK(w.right.back() == "t9");
    }
    SUBCASE("span at the document start") {
        s.start = 0;
        s.end = 2;
        const ContextWindow w = extract_context(doc, s, 8);
        CHECK(w.left.empty());
        REQUIRE(w.right.size() == 8);
        CHECK(w.right.front() == "t2");
    }
    SUBCASE("max_span zero") {
        const ContextWindow w = extract_context(doc, s, 0);
        CHECK(w.left.empty());
        CHECK(w.right.empty());
    }
}

TEST_CASE("truncate_window keeps the tokens nearest the phrase") {
    ContextWindow w;
    w.max_span = 64;
    w.left = {"a", "b", "c"};
    w.right = {"d", "e"};

    const ContextWindow t2 = truncate_window(w, 2);
    CHECK(t2.left == std::vector<std::string>{"b", "c"});
    CHECK(t2.right == std::vector<std::string>{"d", "e"});

    const ContextWindow t0 = truncate_window(w, 0);
    CHECK(t0.left.empty());
    CHECK(t0.right.empty());

    ContextWindow single;
    single.max_span = 64;
    single.left = {"a"};
    const ContextWindow t64 = truncate_window(single, 64);
    CHECK(t64.left == std::vector<std::string>{"a"});
    CHECK(t64.right.empty());

    CHECK_THROWS_AS(truncate_window(w, 65), Error);
}

TEST_CASE("context windows are contiguous document slices") {
    SplitMix64 rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        Document doc;
        doc.id = "d";
        const std::size_t n = 1 + rng.uniform_below(30);
        for (std::size_t i = 0; i < n; ++i)
            doc.tokens.push_back("w" + std::to_string(i));
        LemmaSample s;
        s.start = rng.uniform_below(n);
        s.end = s.start + 1 + rng.uniform_below(n - s.start);
        const std::size_t max_span = rng.uniform_below(10);
        const ContextWindow w = extract_context(doc, s, max_span);
        CHECK(w.left.size() <= max_span);
        CHECK(w.right.size() <= max_span);
        // left ++ span ++ right must be a contiguous slice of the document
        std::vector<std::string> rebuilt = w.left;
        for (std::size_t i = s.start; i < s.end; ++i)
            rebuilt.push_back(doc.tokens[i]);
        rebuilt.insert(rebuilt.end(), w.right.begin(), w.right.end());
        const std::size_t begin = s.start - w.left.size();
        REQUIRE(begin + rebuilt.size() <= doc.tokens.size());
        for (std::size_t i = 0; i < rebuilt.size(); ++i)
            CHECK(rebuilt[i] == doc.tokens[begin + i]);
    }
}

TEST_CASE("truncation composes as the minimum of the lengths") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        ContextWindow w;
        w.max_span = 16;
        const std::size_t nl = rng.uniform_below(17);
        const std::size_t nr = rng.uniform_below(17);
        for (std::size_t i = 0; i < nl; ++i)
            w.left.push_back("l" + std::to_string(i));
        for (std::size_t i = 0; i < nr; ++i)
            w.right.push_back("r" + std::to_string(i));
        const std::size_t k1 = rng.uniform_below(17);
        const std::size_t k2 = rng.uniform_below(17);
        const ContextWindow a = truncate_window(truncate_window(w, k1), k2);
        const ContextWindow b = truncate_window(w, std::min(k1, k2));
        CHECK(a.left == b.left);
        CHECK(a.right == b.right);
    }
}

TEST_CASE("parse / serialize round trip is a fixed point") {
    const std::string text =
        "# mixed-order corpus\n"
        "D\tdoc-a\tala ma kota\n"
        "S\tdoc-a\t2\t3\tkota\tkot\n"
        "D\tdoc-b\tdwa psy szczekały głośno\n"
        "S\tdoc-b\t1\t2\tpsy\tpies\n"
        "S\tdoc-a\t0\t2\tala ma\tala mieć\n";
    const Corpus c1 = parse(text);
    const std::string s1 = serialize_corpus(c1);
    const Corpus c2 = parse(s1);
    CHECK(docs_equal(c1, c2));
    CHECK(serialize_corpus(c2) == s1);
}
