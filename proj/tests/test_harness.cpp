#include <doctest.h>

#include <filesystem>
#include <set>

#include "lemkit/common.hpp"
#include "lemkit/harness.hpp"
#include "lemkit/toygen.hpp"

using namespace lemkit;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

ToySpec small_toy(const std::string& out_dir) {
    ToySpec spec;
    spec.train_count = 120;
    spec.dev_count = 30;
    spec.test_count = 40;
    spec.seed = 21;
    spec.out_dir = out_dir;
    return spec;
}

KeyValueConfig baseline_config(const std::string& toy_dir,
                               const std::string& out_dir) {
    KeyValueConfig kv(ExperimentSpec::config_keys());
    kv.set("train_corpus", toy_dir + "/train.tsv");
    kv.set("dev_corpus", toy_dir + "/dev.tsv");
    kv.set("test_corpus", toy_dir + "/test.tsv");
    kv.set("models", "identity,lexicon,edit_tree");
    kv.set("eval_contexts", "none,fixed:8,fixed:64,variable");
    kv.set("seed", "9");
    kv.set("out_dir", out_dir);
    return kv;
}

}  // namespace

TEST_CASE("toy corpus generation is byte-deterministic") {
    TempDir dir("lemkit_toy_det");
    ToySpec spec = small_toy(dir.str());
    const ToyCorpus a = generate_toy_corpus(spec);
    const ToyCorpus b = generate_toy_corpus(spec);
    CHECK(serialize_corpus(a.train) == serialize_corpus(b.train));
    CHECK(serialize_corpus(a.dev) == serialize_corpus(b.dev));
    CHECK(serialize_corpus(a.test) == serialize_corpus(b.test));

    write_toy_corpus(spec);
    write_toy_corpus(spec);  // regenerating over the same files
    const Corpus reparsed = parse_corpus_file(dir.str() + "/train.tsv");
    CHECK(serialize_corpus(reparsed) == serialize_corpus(a.train));
}

TEST_CASE("ambiguous fraction zero produces no trigger-dependent samples") {
    TempDir dir("lemkit_toy_unamb");
    ToySpec spec = small_toy(dir.str());
    spec.ambiguous_fraction = 0.0;
    const ToyCorpus toy = generate_toy_corpus(spec);
    for (const LemmaSample& s : toy.train.samples)
        CHECK_FALSE(is_ambiguous_sample_id(s.doc_id));
}

TEST_CASE("ambiguous gold lemmas flip with the trigger token") {
    TempDir dir("lemkit_toy_amb");
    ToySpec spec = small_toy(dir.str());
    spec.ambiguous_fraction = 0.5;
    const ToyCorpus toy = generate_toy_corpus(spec);
    std::size_t checked = 0;
    for (const LemmaSample& s : toy.test.samples) {
        if (!is_ambiguous_sample_id(s.doc_id)) continue;
        const Document& doc = toy.test.document_of(s);
        const ContextWindow w = extract_context(doc, s, spec.max_trigger_distance);
        std::string trigger;
        for (const auto& side : {w.left, w.right})
            for (const std::string& tok : side)
                if (tok == "pod" || tok == "nad") trigger = tok;
        REQUIRE_FALSE(trigger.empty());
        // generator contract: surface <stem>y maps to <stem>a under "pod"
        // and <stem>o under "nad"
        REQUIRE(s.orthographic.back() == 'y');
        const std::string stem =
            s.orthographic.substr(0, s.orthographic.size() - 1);
        const std::string expected = stem + (trigger == "pod" ? "a" : "o");
        const std::string flipped = stem + (trigger == "pod" ? "o" : "a");
        CHECK(s.lemma == expected);
        CHECK(s.lemma != flipped);
        ++checked;
    }
    CHECK(checked > 5);
}

TEST_CASE("toy documents parse and round trip through the corpus format") {
    TempDir dir("lemkit_toy_rt");
    ToySpec spec = small_toy(dir.str());
    write_toy_corpus(spec);
    for (const char* name : {"train.tsv", "dev.tsv", "test.tsv"}) {
        const Corpus c = parse_corpus_file(dir.str() + "/" + name);
        CHECK(c.samples.size() > 0);
        for (const LemmaSample& s : c.samples) {
            CHECK(s.end <= c.document_of(s).tokens.size());
        }
    }
}

TEST_CASE("toy spec validation") {
    ToySpec spec;
    spec.out_dir = "x";
    spec.ambiguous_fraction = 1.5;
    CHECK_THROWS_AS(generate_toy_corpus(spec), Error);
    spec.ambiguous_fraction = 0.95;
    spec.multi_token_fraction = 0.10;
    CHECK_THROWS_AS(generate_toy_corpus(spec), Error);
    spec.multi_token_fraction = 0.05;
    spec.max_trigger_distance = 12;
    CHECK_THROWS_AS(generate_toy_corpus(spec), Error);
}

TEST_CASE("experiment spec: defaults, mandatory seed, unknown values") {
    KeyValueConfig kv(ExperimentSpec::config_keys());
    kv.set("train_corpus", "a.tsv");
    kv.set("dev_corpus", "b.tsv");
    CHECK_THROWS_AS(ExperimentSpec::from_config(kv), Error);  // no seed
    kv.set("seed", "7");
    const ExperimentSpec spec = ExperimentSpec::from_config(kv);
    CHECK(spec.models.size() == 4);
    CHECK(spec.eval_contexts.size() == 6);
    CHECK(spec.train.d == 32);
    CHECK(spec.train.h == 64);
    CHECK(spec.train_policy.kind == ContextPolicy::Kind::none);

    kv.set("models", "identity,transformer");
    CHECK_THROWS_AS(ExperimentSpec::from_config(kv), Error);
    kv.set("models", "identity");
    kv.set("report_formats", "xml");
    CHECK_THROWS_AS(ExperimentSpec::from_config(kv), Error);

    CHECK_THROWS_AS(kv.set("unknown_key", "1"), Error);
}

TEST_CASE("bare variable evaluation inherits the training distribution") {
    KeyValueConfig kv(ExperimentSpec::config_keys());
    kv.set("train_corpus", "a.tsv");
    kv.set("dev_corpus", "b.tsv");
    kv.set("seed", "7");
    kv.set("train_policy", "variable:0.5:4:16");
    kv.set("eval_contexts", "none,variable");
    const ExperimentSpec spec = ExperimentSpec::from_config(kv);
    REQUIRE(spec.eval_contexts.size() == 2);
    CHECK(spec.eval_contexts[1].p_none == doctest::Approx(0.5));
    CHECK(spec.eval_contexts[1].k_min == 4);
    CHECK(spec.eval_contexts[1].k_max == 16);
}

TEST_CASE("config hash changes iff a field changes") {
    KeyValueConfig kv(ExperimentSpec::config_keys());
    kv.set("train_corpus", "a.tsv");
    kv.set("dev_corpus", "b.tsv");
    kv.set("seed", "7");
    const std::uint64_t base = ExperimentSpec::from_config(kv).config_hash();
    CHECK(ExperimentSpec::from_config(kv).config_hash() == base);  // stable

    const std::vector<std::pair<std::string, std::string>> tweaks = {
        {"train_corpus", "other.tsv"}, {"dev_corpus", "other.tsv"},
        {"test_corpus", "t.tsv"},      {"models", "identity"},
        {"train_policy", "fixed:8"},   {"eval_contexts", "none"},
        {"embed_dim", "16"},           {"hidden_dim", "128"},
        {"learning_rate", "0.01"},     {"beta1", "0.85"},
        {"beta2", "0.95"},             {"epsilon", "1e-7"},
        {"batch_size", "4"},           {"epochs", "5"},
        {"seed", "8"},                 {"grad_clip", "1.0"},
        {"max_decode_len_factor", "3"},{"fixed_input_len", "128"},
        {"max_span", "128"},           {"out_dir", "elsewhere"},
        {"report_formats", "tsv"},
    };
    for (const auto& [key, value] : tweaks) {
        KeyValueConfig kv2(ExperimentSpec::config_keys());
        kv2.set("train_corpus", "a.tsv");
        kv2.set("dev_corpus", "b.tsv");
        kv2.set("seed", "7");
        kv2.set(key, value);
        CHECK_MESSAGE(ExperimentSpec::from_config(kv2).config_hash() != base,
                      "hash unchanged after setting ", key);
    }
}

TEST_CASE("baseline sweep: row counts, identity invariance, artifacts") {
    TempDir toy_dir("lemkit_sweep_toy");
    TempDir out_dir("lemkit_sweep_out");
    write_toy_corpus(small_toy(toy_dir.str()));

    KeyValueConfig kv = baseline_config(toy_dir.str(), out_dir.str());
    kv.set("report_formats", "csv,tsv,markdown");
    const ExperimentSpec spec = ExperimentSpec::from_config(kv);
    const SweepReport report = run_experiment(spec);

    CHECK(report.rows.size() == spec.models.size() * spec.eval_contexts.size());

    // identity ignores context, so its rows are identical
    std::set<std::string> identity_metrics;
    for (const ReportRow& r : report.rows)
        if (r.model == "identity")
            identity_metrics.insert(metrics_csv_line(r.metrics));
    CHECK(identity_metrics.size() == 1);

    for (const char* name :
         {"report.csv", "report.tsv", "report.md", "vocab.tsv", "gold.tsv",
          "tree_inventory.txt", "plot_identity.csv", "plot_lexicon.csv",
          "plot_edit_tree.csv", "preds/identity_none.tsv",
          "preds/edit_tree_fixed64.tsv"})
        CHECK_MESSAGE(fs::exists(out_dir.path / name), "missing ", name);

    const std::string markdown = read_file(out_dir.str() + "/report.md");
    std::size_t tables = 0, pos = 0;
    while ((pos = markdown.find("\n## ", pos)) != std::string::npos) {
        ++tables;
        pos += 4;
    }
    CHECK(tables == spec.models.size());  // one table per model

    // scorer agrees with the report rows
    const Metrics rescored = score_files(
        out_dir.str() + "/preds/edit_tree_none.tsv", out_dir.str() + "/gold.tsv");
    for (const ReportRow& r : report.rows)
        if (r.model == "edit_tree" && r.eval_context == "none")
            CHECK(metrics_csv_line(rescored) == metrics_csv_line(r.metrics));
}

TEST_CASE("sweep reruns are byte-identical") {
    TempDir toy_dir("lemkit_sweep_det_toy");
    TempDir out_dir("lemkit_sweep_det_out");
    write_toy_corpus(small_toy(toy_dir.str()));
    const ExperimentSpec spec = ExperimentSpec::from_config(
        baseline_config(toy_dir.str(), out_dir.str()));

    run_experiment(spec);
    const std::string report1 = read_file(out_dir.str() + "/report.csv");
    const std::string plot1 = read_file(out_dir.str() + "/plot_lexicon.csv");
    run_experiment(spec);
    CHECK(read_file(out_dir.str() + "/report.csv") == report1);
    CHECK(read_file(out_dir.str() + "/plot_lexicon.csv") == plot1);
}

TEST_CASE("plot data lists none as length zero plus a variable record") {
    SweepReport report;
    report.rows.push_back({"m", "-", "none", Metrics{0.89, 0.90, 0.8977, 100}});
    report.rows.push_back({"m", "-", "fixed:64", Metrics{0.91, 0.92, 0.9180, 100}});
    report.rows.push_back({"m", "-", "variable", Metrics{0.90, 0.91, 0.9120, 100}});
    const std::string plot = render_plot_data(report, "m");
    CHECK(plot ==
          "context_length,score\n"
          "0,0.897700\n"
          "64,0.918000\n"
          "variable,0.912000\n");
}

TEST_CASE("emit_report refuses an empty eval-context list before writing") {
    TempDir out_dir("lemkit_emit_empty");
    ExperimentSpec spec;
    spec.out_dir = out_dir.str() + "/sub";
    SweepReport report;
    CHECK_THROWS_AS(emit_report(report, spec), Error);
    CHECK_FALSE(fs::exists(spec.out_dir + "/report.csv"));
}

TEST_CASE("a failing sweep still flushes a marked partial report") {
    TempDir toy_dir("lemkit_sweep_fail_toy");
    TempDir out_dir("lemkit_sweep_fail_out");
    write_toy_corpus(small_toy(toy_dir.str()));
    KeyValueConfig kv = baseline_config(toy_dir.str(), out_dir.str());
    // identity rows succeed, then seq2seq dies immediately: every encoded
    // input overflows a 2-id fixed input length
    kv.set("models", "identity,seq2seq");
    kv.set("fixed_input_len", "2");
    kv.set("epochs", "1");
    kv.set("embed_dim", "4");
    kv.set("hidden_dim", "4");
    CHECK_THROWS_AS(run_experiment(ExperimentSpec::from_config(kv)), Error);
    const std::string report = read_file(out_dir.str() + "/report.csv");
    CHECK(report.find("FAILED:") != std::string::npos);
    CHECK(report.find("identity") != std::string::npos);  // partial rows kept
}

TEST_CASE("run_training writes the tree inventory dump") {
    TempDir toy_dir("lemkit_train_toy");
    TempDir out_dir("lemkit_train_out");
    write_toy_corpus(small_toy(toy_dir.str()));
    KeyValueConfig kv(ExperimentSpec::config_keys());
    kv.set("train_corpus", toy_dir.str() + "/train.tsv");
    kv.set("dev_corpus", toy_dir.str() + "/dev.tsv");
    kv.set("models", "edit_tree");
    kv.set("seed", "3");
    kv.set("out_dir", out_dir.str());
    const TrainArtifacts artifacts =
        run_training(ExperimentSpec::from_config(kv));
    CHECK(fs::exists(artifacts.inventory_path));
    const std::string dump = read_file(artifacts.inventory_path);
    CHECK(dump.find("(S ") != std::string::npos);

    kv.set("models", "identity");
    CHECK_THROWS_AS(run_training(ExperimentSpec::from_config(kv)), Error);
}

TEST_CASE("sample ids are stable ordinals") {
    CHECK(sample_id(0) == "s000000");
    CHECK(sample_id(123456) == "s123456");
}
