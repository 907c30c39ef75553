#pragma once

// Exact-match evaluation. A prediction is correct only when every
// codepoint matches the gold string; the case-insensitive variant compares
// the simple-lowercase folding of each codepoint. The combined score
// weights the two accuracies 0.2 / 0.8.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lemkit {

struct Metrics {
    double acc_cs = 0.0;
    double acc_ci = 0.0;
    double score = 0.0;  // 0.2 * acc_cs + 0.8 * acc_ci
    std::size_t n = 0;
};

inline constexpr double kScoreWeightCS = 0.2;
inline constexpr double kScoreWeightCI = 0.8;

/// True iff the codepoint sequences are identical.
bool match_cs(std::string_view prediction, std::string_view gold);

/// True iff the per-codepoint simple lowercase foldings are identical.
bool match_ci(std::string_view prediction, std::string_view gold);

/// Aggregate over (prediction, gold) pairs. Throws on an empty input.
Metrics evaluate(const std::vector<std::pair<std::string, std::string>>& pairs);

double combined_score(double acc_cs, double acc_ci);

/// Scorer over files of `id<TAB>text` lines. Every id must appear in both
/// files exactly once. Returns the metrics over the joined pairs.
Metrics score_files(const std::string& predictions_path,
                    const std::string& gold_path);

/// One-line CSV `n,acc_cs,acc_ci,score` with 6 decimal places.
std::string metrics_csv_line(const Metrics& m);

}  // namespace lemkit
