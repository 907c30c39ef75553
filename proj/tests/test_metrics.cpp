#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lemkit/casefold.hpp"
#include "lemkit/common.hpp"
#include "lemkit/metrics.hpp"
#include "lemkit/rng.hpp"

using namespace lemkit;

namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

// n pairs with exactly `cs` case-sensitive and `ci` case-insensitive
// matches (cs <= ci <= n). Case-only differences use an ASCII letter.
Pairs synthetic_pairs(std::size_t n, std::size_t cs, std::size_t ci) {
    Pairs pairs;
    for (std::size_t i = 0; i < cs; ++i) pairs.emplace_back("kot", "kot");
    for (std::size_t i = cs; i < ci; ++i) pairs.emplace_back("Kot", "kot");
    for (std::size_t i = ci; i < n; ++i) pairs.emplace_back("pies", "kot");
    return pairs;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("match_cs compares codepoint sequences exactly") {
    CHECK(match_cs("ministerstwo kultury", "ministerstwo kultury"));
    CHECK_FALSE(match_cs("Warszawa", "warszawa"));
    CHECK_FALSE(match_cs("kot ", "kot"));  // whitespace is a character
    CHECK(match_cs("", ""));
}

TEST_CASE("simple lowercase mappings match the Unicode data table") {
    // The Polish uppercase letters used by the case-insensitive matcher.
    CHECK(to_lower_simple(U'Ł') == U'ł');  // U+0141 -> U+0142
    CHECK(to_lower_simple(0x141) == 0x142);
    CHECK(to_lower_simple(0xD3) == 0xF3);    // Ó -> ó
    CHECK(to_lower_simple(0x179) == 0x17A);  // Ź -> ź
    CHECK(to_lower_simple(0x104) == 0x105);  // Ą -> ą
    CHECK(to_lower_simple(0x106) == 0x107);  // Ć -> ć
    CHECK(to_lower_simple(0x118) == 0x119);  // Ę -> ę
    CHECK(to_lower_simple(0x143) == 0x144);  // Ń -> ń
    CHECK(to_lower_simple(0x15A) == 0x15B);  // Ś -> ś
    CHECK(to_lower_simple(0x17B) == 0x17C);  // Ż -> ż
    CHECK(to_lower_simple(U'A') == U'a');
    CHECK(to_lower_simple(U'a') == U'a');    // already lowercase
    CHECK(to_lower_simple(U'7') == U'7');    // no mapping
    CHECK(to_lower_simple(0x130) == 0x69);   // İ simple-lowercases to i
}

TEST_CASE("match_ci folds case per codepoint") {
    CHECK(match_ci("Warszawa", "warszawa"));
    CHECK(match_ci("ŁÓDŹ", "łódź"));
    CHECK_FALSE(match_ci("kota", "kot"));  // different lengths
    CHECK(match_ci("", ""));
    CHECK_FALSE(match_ci("a", ""));
}

TEST_CASE("evaluate reproduces the published arithmetic") {
    SUBCASE("no-context baseline row") {
        const Metrics m = evaluate(synthetic_pairs(10000, 5035, 5173));
        CHECK(m.acc_cs == doctest::Approx(0.5035).epsilon(1e-12));
        CHECK(m.acc_ci == doctest::Approx(0.5173).epsilon(1e-12));
        CHECK(m.score == doctest::Approx(0.51454).epsilon(1e-12));
    }
    SUBCASE("best fixed-64 row") {
        const Metrics m = evaluate(synthetic_pairs(10000, 9039, 9216));
        CHECK(m.score == doctest::Approx(0.91806).epsilon(1e-12));
    }
    SUBCASE("perfect predictions") {
        const Metrics m = evaluate(synthetic_pairs(50, 50, 50));
        CHECK(m.acc_cs == 1.0);
        CHECK(m.acc_ci == 1.0);
        CHECK(m.score == 1.0);
    }
    CHECK_THROWS_AS(evaluate({}), Error);
}

TEST_CASE("case-sensitive match implies case-insensitive match") {
    SplitMix64 rng(31337);
    const std::u32string alphabet = U"aAbBłŁóÓźŹ ";
    auto random_string = [&] {
        std::u32string s;
        const std::size_t len = rng.uniform_below(6);
        for (std::size_t i = 0; i < len; ++i)
            s.push_back(alphabet[rng.uniform_below(alphabet.size())]);
        return utf8_encode(s);
    };
    std::size_t cs_seen = 0;
    for (int i = 0; i < 5000; ++i) {
        const std::string a = random_string();
        const std::string b = rng.bernoulli(0.3) ? a : random_string();
        if (match_cs(a, b)) {
            ++cs_seen;
            CHECK(match_ci(a, b));
        }
        // both matchers are symmetric
        CHECK(match_cs(a, b) == match_cs(b, a));
        CHECK(match_ci(a, b) == match_ci(b, a));
        // and reflexive
        CHECK(match_cs(a, a));
        CHECK(match_ci(a, a));
    }
    CHECK(cs_seen > 100);  // the generator actually produced matches
}

TEST_CASE("matchers are transitive over sampled triples") {
    SplitMix64 rng(99);
    const std::vector<std::string> pool = {"kot", "Kot", "KOT", "kOt",
                                           "łódź", "Łódź", "ŁÓDŹ", "pies"};
    for (int i = 0; i < 2000; ++i) {
        const std::string& a = pool[rng.uniform_below(pool.size())];
        const std::string& b = pool[rng.uniform_below(pool.size())];
        const std::string& c = pool[rng.uniform_below(pool.size())];
        if (match_ci(a, b) && match_ci(b, c)) CHECK(match_ci(a, c));
        if (match_cs(a, b) && match_cs(b, c)) CHECK(match_cs(a, c));
    }
}

TEST_CASE("evaluate is permutation-invariant and score is bounded") {
    SplitMix64 rng(5);
    Pairs pairs = synthetic_pairs(200, 73, 131);
    const Metrics before = evaluate(pairs);
    rng.shuffle(pairs);
    const Metrics after = evaluate(pairs);
    CHECK(before.acc_cs == after.acc_cs);
    CHECK(before.acc_ci == after.acc_ci);
    CHECK(before.score == after.score);
    CHECK(before.score >= std::min(before.acc_cs, before.acc_ci));
    CHECK(before.score <= std::max(before.acc_cs, before.acc_ci));
    CHECK(before.acc_ci >= before.acc_cs);
}

TEST_CASE("scorer joins prediction and gold files by id") {
    const std::string pred_path = temp_path("lemkit_test_pred.tsv");
    const std::string gold_path = temp_path("lemkit_test_gold.tsv");
    write_file(pred_path,
               "s0\tkot\ns1\tPies\ns2\tdom\n");
    write_file(gold_path,
               "# gold\ns1\tpies\ns0\tkot\ns2\tdach\n");
    const Metrics m = score_files(pred_path, gold_path);
    CHECK(m.n == 3);
    CHECK(m.acc_cs == doctest::Approx(1.0 / 3));
    CHECK(m.acc_ci == doctest::Approx(2.0 / 3));
    CHECK(metrics_csv_line(m) == "3,0.333333,0.666667,0.600000");

    write_file(pred_path, "s0\tkot\n");
    CHECK_THROWS_AS(score_files(pred_path, gold_path), Error);  // missing ids
    write_file(pred_path, "s0\tkot\ns0\tkot\ns1\tpies\ns2\tdach\n");
    CHECK_THROWS_AS(score_files(pred_path, gold_path), Error);  // duplicate
    write_file(pred_path, "sX\tkot\ns1\tpies\ns2\tdach\n");
    CHECK_THROWS_AS(score_files(pred_path, gold_path), Error);  // unknown id
    std::filesystem::remove(pred_path);
    std::filesystem::remove(gold_path);
}
