#include "lemkit/metrics.hpp"

#include <map>

#include "lemkit/casefold.hpp"
#include "lemkit/common.hpp"

namespace lemkit {

bool match_cs(std::string_view prediction, std::string_view gold) {
    return prediction == gold;
}

bool match_ci(std::string_view prediction, std::string_view gold) {
    const std::u32string a = utf8_decode(prediction);
    const std::u32string b = utf8_decode(gold);
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (to_lower_simple(a[i]) != to_lower_simple(b[i])) return false;
    }
    return true;
}

double combined_score(double acc_cs, double acc_ci) {
    return kScoreWeightCS * acc_cs + kScoreWeightCI * acc_ci;
}

Metrics evaluate(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
    if (pairs.empty())
        fail(ErrorCode::invalid_argument, "evaluate: no prediction/gold pairs");
    std::size_t cs = 0, ci = 0;
    for (const auto& [pred, gold] : pairs) {
        if (match_cs(pred, gold)) ++cs;
        if (match_ci(pred, gold)) ++ci;
    }
    Metrics m;
    m.n = pairs.size();
    m.acc_cs = static_cast<double>(cs) / static_cast<double>(m.n);
    m.acc_ci = static_cast<double>(ci) / static_cast<double>(m.n);
    m.score = combined_score(m.acc_cs, m.acc_ci);
    return m;
}

namespace {

// id -> text, insertion order preserved for deterministic error messages.
std::vector<std::pair<std::string, std::string>> read_id_text_file(
    const std::string& path) {
    const std::string bytes = read_file(path);
    std::vector<std::pair<std::string, std::string>> rows;
    std::size_t line_no = 0;
    for (const std::string& raw : split(bytes, '\n')) {
        ++line_no;
        std::string line = raw;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line, '\t');
        if (fields.size() != 2)
            fail(ErrorCode::parse, path + " line " + std::to_string(line_no) +
                                       ": expected id<TAB>text");
        rows.emplace_back(fields[0], fields[1]);
    }
    return rows;
}

}  // namespace

Metrics score_files(const std::string& predictions_path,
                    const std::string& gold_path) {
    const auto preds = read_id_text_file(predictions_path);
    const auto golds = read_id_text_file(gold_path);
    std::map<std::string, std::string> gold_by_id;
    for (const auto& [id, text] : golds) {
        if (!gold_by_id.emplace(id, text).second)
            fail(ErrorCode::parse, gold_path + ": duplicate id '" + id + "'");
    }
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(preds.size());
    std::map<std::string, bool> seen;
    for (const auto& [id, text] : preds) {
        const auto it = gold_by_id.find(id);
        if (it == gold_by_id.end())
            fail(ErrorCode::parse,
                 "prediction id '" + id + "' has no gold entry");
        if (!seen.emplace(id, true).second)
            fail(ErrorCode::parse,
                 predictions_path + ": duplicate id '" + id + "'");
        pairs.emplace_back(text, it->second);
    }
    if (pairs.size() != gold_by_id.size())
        fail(ErrorCode::parse, "gold file has ids missing from predictions (" +
                                   std::to_string(gold_by_id.size()) + " vs " +
                                   std::to_string(pairs.size()) + ")");
    return evaluate(pairs);
}

std::string metrics_csv_line(const Metrics& m) {
    return std::to_string(m.n) + "," + format_fixed(m.acc_cs, 6) + "," +
           format_fixed(m.acc_ci, 6) + "," + format_fixed(m.score, 6);
}

}  // namespace lemkit
