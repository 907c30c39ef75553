#include "lemkit/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <sstream>

#include "lemkit/common.hpp"

namespace lemkit {

namespace {

class IdentityLemmatizer final : public Lemmatizer {
public:
    std::string lemmatize(const std::string& phrase,
                          const ContextWindow*) override {
        return identity_lemmatize(phrase);
    }
};

class LexiconLemmatizer final : public Lemmatizer {
public:
    explicit LexiconLemmatizer(Lexicon lex) : lex_(std::move(lex)) {}
    std::string lemmatize(const std::string& phrase,
                          const ContextWindow*) override {
        return lex_.predict(phrase);
    }

private:
    Lexicon lex_;
};

class TreeLemmatizer final : public Lemmatizer {
public:
    explicit TreeLemmatizer(TreeClassifier model) : model_(std::move(model)) {}
    std::string lemmatize(const std::string& phrase,
                          const ContextWindow*) override {
        return model_.predict(phrase);
    }

private:
    TreeClassifier model_;
};

class Seq2SeqLemmatizer final : public Lemmatizer {
public:
    Seq2SeqLemmatizer(ModelParams params, Vocab vocab, TrainConfig config)
        : params_(std::move(params)),
          vocab_(std::move(vocab)),
          config_(config) {}

    std::string lemmatize(const std::string& phrase,
                          const ContextWindow* window) override {
        const PredictOutcome out =
            predict(params_, phrase, window, vocab_, config_);
        if (out.truncated) ++truncated_;
        return out.text;
    }

    std::size_t truncated_decodes() const override { return truncated_; }

private:
    ModelParams params_;
    Vocab vocab_;
    TrainConfig config_;
    std::size_t truncated_ = 0;
};

std::vector<std::pair<std::string, std::string>> training_pairs(
    const Corpus& corpus) {
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(corpus.samples.size());
    for (const LemmaSample& s : corpus.samples)
        pairs.emplace_back(s.orthographic, s.lemma);
    return pairs;
}

std::string context_slug(const std::string& name) {
    std::string slug;
    for (char c : name)
        if (c != ':' && c != '.') slug += c;
    return slug;
}

std::string format_double_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

}  // namespace

std::unique_ptr<Lemmatizer> make_identity_lemmatizer() {
    return std::make_unique<IdentityLemmatizer>();
}

std::unique_ptr<Lemmatizer> make_lexicon_lemmatizer(const Corpus& train) {
    return std::make_unique<LexiconLemmatizer>(
        Lexicon::train(training_pairs(train)));
}

std::unique_ptr<Lemmatizer> make_tree_lemmatizer(
    const Corpus& train, TreeClassifier::TrainStats* stats) {
    return std::make_unique<TreeLemmatizer>(
        TreeClassifier::train(training_pairs(train), stats));
}

std::unique_ptr<Lemmatizer> make_seq2seq_lemmatizer(ModelParams params,
                                                    Vocab vocab,
                                                    TrainConfig config) {
    return std::make_unique<Seq2SeqLemmatizer>(std::move(params),
                                               std::move(vocab), config);
}

const std::vector<std::string>& ExperimentSpec::config_keys() {
    static const std::vector<std::string> keys = {
        "train_corpus", "dev_corpus", "test_corpus", "models", "train_policy",
        "eval_contexts", "embed_dim", "hidden_dim", "learning_rate", "beta1",
        "beta2", "epsilon", "batch_size", "epochs", "seed", "grad_clip",
        "max_decode_len_factor", "fixed_input_len", "max_span", "out_dir",
        "report_formats"};
    return keys;
}

ExperimentSpec ExperimentSpec::from_config(const KeyValueConfig& kv) {
    ExperimentSpec spec;
    spec.train_corpus = kv.get("train_corpus");
    spec.dev_corpus = kv.get("dev_corpus");
    spec.test_corpus = kv.get_or("test_corpus", "");
    spec.models = split(
        kv.get_or("models", "identity,lexicon,edit_tree,seq2seq"), ',');
    for (const std::string& m : spec.models)
        if (m != "identity" && m != "lexicon" && m != "edit_tree" &&
            m != "seq2seq")
            fail(ErrorCode::invalid_argument, "unknown model '" + m + "'");
    spec.out_dir = kv.get_or("out_dir", "");
    spec.report_formats = split(kv.get_or("report_formats", "csv"), ',');
    for (const std::string& f : spec.report_formats)
        if (f != "csv" && f != "tsv" && f != "markdown")
            fail(ErrorCode::invalid_argument,
                 "unknown report format '" + f + "'");

    TrainConfig& t = spec.train;
    t.d = static_cast<std::size_t>(kv.has("embed_dim") ? kv.get_uint("embed_dim") : 32);
    t.h = static_cast<std::size_t>(kv.has("hidden_dim") ? kv.get_uint("hidden_dim") : 64);
    t.learning_rate = kv.has("learning_rate") ? kv.get_double("learning_rate") : 0.002;
    t.beta1 = kv.has("beta1") ? kv.get_double("beta1") : 0.9;
    t.beta2 = kv.has("beta2") ? kv.get_double("beta2") : 0.999;
    t.epsilon = kv.has("epsilon") ? kv.get_double("epsilon") : 1e-8;
    t.batch_size = static_cast<std::size_t>(kv.has("batch_size") ? kv.get_uint("batch_size") : 8);
    t.epochs = static_cast<std::size_t>(kv.has("epochs") ? kv.get_uint("epochs") : 20);
    t.gradient_clip_norm = kv.has("grad_clip") ? kv.get_double("grad_clip") : 5.0;
    t.max_decode_len_factor =
        kv.has("max_decode_len_factor") ? kv.get_double("max_decode_len_factor") : 2.0;
    t.fixed_input_len = static_cast<std::size_t>(
        kv.has("fixed_input_len") ? kv.get_uint("fixed_input_len") : 0);
    t.max_span = static_cast<std::size_t>(kv.has("max_span") ? kv.get_uint("max_span") : 64);
    // No wall-clock fallback: training without a pinned seed is not
    // reproducible, so the key is mandatory.
    t.seed = kv.get_uint("seed");
    t.validate();

    spec.train_policy = ContextPolicy::parse(kv.get_or("train_policy", "none"));
    spec.train_policy.validate(t.max_span);

    const std::string contexts =
        kv.get_or("eval_contexts", "none,fixed:8,fixed:16,fixed:32,fixed:64,variable");
    for (const std::string& name : split(contexts, ',')) {
        ContextPolicy p = ContextPolicy::parse(name);
        // A bare "variable" evaluation reuses the training distribution.
        if (p.kind == ContextPolicy::Kind::variable && name == "variable" &&
            spec.train_policy.kind == ContextPolicy::Kind::variable)
            p = spec.train_policy;
        p.validate(t.max_span);
        spec.eval_contexts.push_back(p);
        spec.eval_context_names.push_back(name);
    }
    if (spec.eval_contexts.empty())
        fail(ErrorCode::invalid_argument, "eval_contexts must not be empty");
    return spec;
}

std::string ExperimentSpec::canonical() const {
    // Every effective field, defaults included, in sorted key order.
    std::map<std::string, std::string> kv;
    kv["train_corpus"] = train_corpus;
    kv["dev_corpus"] = dev_corpus;
    kv["test_corpus"] = test_corpus;
    kv["models"] = join(models, ",");
    kv["train_policy"] = train_policy.to_string();
    kv["eval_contexts"] = join(eval_context_names, ",");
    kv["embed_dim"] = std::to_string(train.d);
    kv["hidden_dim"] = std::to_string(train.h);
    kv["learning_rate"] = format_double_exact(train.learning_rate);
    kv["beta1"] = format_double_exact(train.beta1);
    kv["beta2"] = format_double_exact(train.beta2);
    kv["epsilon"] = format_double_exact(train.epsilon);
    kv["batch_size"] = std::to_string(train.batch_size);
    kv["epochs"] = std::to_string(train.epochs);
    kv["seed"] = std::to_string(train.seed);
    kv["grad_clip"] = format_double_exact(train.gradient_clip_norm);
    kv["max_decode_len_factor"] =
        format_double_exact(train.max_decode_len_factor);
    kv["fixed_input_len"] = std::to_string(train.fixed_input_len);
    kv["max_span"] = std::to_string(train.max_span);
    kv["out_dir"] = out_dir;
    kv["report_formats"] = join(report_formats, ",");
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::uint64_t ExperimentSpec::config_hash() const { return fnv1a(canonical()); }

std::string sample_id(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%06zu", index);
    return std::string(buf);
}

PredictionRun predict_corpus(Lemmatizer& model, const Corpus& corpus,
                             const ContextPolicy& eval_context,
                             std::size_t max_span, std::uint64_t row_seed) {
    PredictionRun run;
    run.id_and_prediction.reserve(corpus.samples.size());
    SplitMix64 rng(row_seed);
    const std::size_t truncated_before = model.truncated_decodes();
    for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
        const LemmaSample& s = corpus.samples[i];
        const auto k = sample_context_length(eval_context, rng);
        std::string pred;
        if (k) {
            const ContextWindow full =
                extract_context(corpus.document_of(s), s, max_span);
            const ContextWindow w = truncate_window(full, *k);
            pred = model.lemmatize(s.orthographic, &w);
        } else {
            pred = model.lemmatize(s.orthographic, nullptr);
        }
        run.id_and_prediction.emplace_back(sample_id(i), std::move(pred));
    }
    run.truncated = model.truncated_decodes() - truncated_before;
    return run;
}

namespace {

std::string render_id_text_file(
    const std::vector<std::pair<std::string, std::string>>& rows) {
    std::string out;
    for (const auto& [id, text] : rows) {
        out += id;
        out += '\t';
        out += text;
        out += '\n';
    }
    return out;
}

void append_rows_for_model(const ExperimentSpec& spec, SweepReport& report,
                           Lemmatizer& model, const std::string& model_name,
                           const std::string& policy_name,
                           const Corpus& test) {
    for (std::size_t ci = 0; ci < spec.eval_contexts.size(); ++ci) {
        const std::string& ctx_name = spec.eval_context_names[ci];
        const std::uint64_t row_seed =
            fnv1a(model_name + "|" + ctx_name, kFnvOffset ^ spec.train.seed);
        PredictionRun run = predict_corpus(model, test, spec.eval_contexts[ci],
                                           spec.train.max_span, row_seed);
        write_file(spec.out_dir + "/preds/" + model_name + "_" +
                       context_slug(ctx_name) + ".tsv",
                   render_id_text_file(run.id_and_prediction));
        std::vector<std::pair<std::string, std::string>> pairs;
        pairs.reserve(test.samples.size());
        for (std::size_t i = 0; i < test.samples.size(); ++i)
            pairs.emplace_back(run.id_and_prediction[i].second,
                               test.samples[i].lemma);
        ReportRow row;
        row.model = model_name;
        row.train_policy = policy_name;
        row.eval_context = ctx_name;
        row.metrics = evaluate(pairs);
        report.rows.push_back(row);
        if (run.truncated > 0)
            report.notes.push_back(model_name + " " + ctx_name + ": " +
                                   std::to_string(run.truncated) +
                                   " decode(s) hit the length cap");
    }
}

std::string render_train_log(const TrainResult& result) {
    std::string out = "epoch\ttrain_loss\tdev_acc_cs\tdev_acc_ci\tdev_score\n";
    for (const EpochLog& e : result.log) {
        out += std::to_string(e.epoch);
        out += '\t';
        out += format_fixed(e.train_loss, 6);
        out += '\t';
        out += format_fixed(e.dev.acc_cs, 6);
        out += '\t';
        out += format_fixed(e.dev.acc_ci, 6);
        out += '\t';
        out += format_fixed(e.dev.score, 6);
        out += '\n';
    }
    return out;
}

}  // namespace

SweepReport run_experiment(const ExperimentSpec& spec) {
    if (spec.test_corpus.empty())
        fail(ErrorCode::invalid_argument, "sweep needs a test_corpus");
    if (spec.out_dir.empty())
        fail(ErrorCode::invalid_argument, "sweep needs an out_dir");
    if (spec.models.empty())
        fail(ErrorCode::invalid_argument, "sweep needs at least one model");

    const std::string train_bytes = read_file(spec.train_corpus);
    const std::string dev_bytes = read_file(spec.dev_corpus);
    const std::string test_bytes = read_file(spec.test_corpus);

    SweepReport report;
    report.seed = spec.train.seed;
    report.config_hash = spec.config_hash();
    report.corpus_hash =
        fnv1a(test_bytes, fnv1a(dev_bytes, fnv1a(train_bytes)));

    std::istringstream train_in(train_bytes), dev_in(dev_bytes),
        test_in(test_bytes);
    const Corpus train_corpus = parse_corpus(train_in);
    const Corpus dev_corpus = parse_corpus(dev_in);
    const Corpus test_corpus = parse_corpus(test_in);

    std::filesystem::create_directories(spec.out_dir + "/preds");

    const Vocab vocab = Vocab::build(train_corpus);
    vocab.save(spec.out_dir + "/vocab.tsv");

    std::vector<std::pair<std::string, std::string>> gold;
    for (std::size_t i = 0; i < test_corpus.samples.size(); ++i)
        gold.emplace_back(sample_id(i), test_corpus.samples[i].lemma);
    write_file(spec.out_dir + "/gold.tsv", render_id_text_file(gold));

    try {
        for (const std::string& model_name : spec.models) {
            std::unique_ptr<Lemmatizer> model;
            std::string policy_name = "-";
            if (model_name == "identity") {
                model = make_identity_lemmatizer();
            } else if (model_name == "lexicon") {
                model = make_lexicon_lemmatizer(train_corpus);
            } else if (model_name == "edit_tree") {
                TreeClassifier::TrainStats stats;
                TreeClassifier classifier =
                    TreeClassifier::train(training_pairs(train_corpus), &stats);
                write_file(spec.out_dir + "/tree_inventory.txt",
                           classifier.dump_inventory());
                if (stats.phrases_skipped > 0)
                    report.notes.push_back(
                        "edit_tree: skipped " +
                        std::to_string(stats.phrases_skipped) +
                        " phrase(s) with mismatched token counts");
                model = std::make_unique<TreeLemmatizer>(std::move(classifier));
            } else if (model_name == "seq2seq") {
                policy_name = spec.train_policy.to_string();
                TrainResult trained = train(train_corpus, dev_corpus, vocab,
                                            spec.train_policy, spec.train);
                save_checkpoint(spec.out_dir + "/seq2seq.ckpt", trained.params,
                                vocab.hash());
                write_file(spec.out_dir + "/train_log.tsv",
                           render_train_log(trained));
                report.notes.push_back(
                    "seq2seq: best dev score at epoch " +
                    std::to_string(trained.best_epoch));
                model = make_seq2seq_lemmatizer(std::move(trained.params),
                                                vocab, spec.train);
            } else {
                fail(ErrorCode::invalid_argument,
                     "unknown model '" + model_name + "'");
            }
            append_rows_for_model(spec, report, *model, model_name,
                                  policy_name, test_corpus);
        }
    } catch (const std::exception& e) {
        // Flush whatever was computed, marked as a failed run.
        report.notes.push_back(std::string("FAILED: ") + e.what());
        try {
            emit_report(report, spec);
        } catch (...) {
        }
        throw;
    }

    emit_report(report, spec);
    return report;
}

TrainArtifacts run_training(const ExperimentSpec& spec) {
    if (spec.out_dir.empty())
        fail(ErrorCode::invalid_argument, "train needs an out_dir");
    if (spec.models.size() != 1)
        fail(ErrorCode::invalid_argument, "train expects exactly one model");
    const std::string& model_name = spec.models[0];
    std::filesystem::create_directories(spec.out_dir);

    const Corpus train_corpus = parse_corpus_file(spec.train_corpus);
    TrainArtifacts artifacts;
    if (model_name == "seq2seq") {
        const Corpus dev_corpus = parse_corpus_file(spec.dev_corpus);
        const Vocab vocab = Vocab::build(train_corpus);
        artifacts.vocab_path = spec.out_dir + "/vocab.tsv";
        vocab.save(artifacts.vocab_path);
        const TrainResult result = train(train_corpus, dev_corpus, vocab,
                                         spec.train_policy, spec.train);
        artifacts.checkpoint_path = spec.out_dir + "/seq2seq.ckpt";
        save_checkpoint(artifacts.checkpoint_path, result.params,
                        vocab.hash());
        artifacts.log_path = spec.out_dir + "/train_log.tsv";
        write_file(artifacts.log_path, render_train_log(result));
        artifacts.best_epoch = result.best_epoch;
    } else if (model_name == "edit_tree") {
        TreeClassifier::TrainStats stats;
        const TreeClassifier classifier =
            TreeClassifier::train(training_pairs(train_corpus), &stats);
        artifacts.inventory_path = spec.out_dir + "/tree_inventory.txt";
        write_file(artifacts.inventory_path, classifier.dump_inventory());
    } else {
        fail(ErrorCode::invalid_argument,
             "train supports the seq2seq and edit_tree models, not '" +
                 model_name + "'");
    }
    return artifacts;
}

namespace {

std::string provenance_lines(const SweepReport& report,
                             const std::string& prefix) {
    std::string out;
    out += prefix + " seed=" + std::to_string(report.seed) + "\n";
    out += prefix + " config_hash=" + hex64(report.config_hash) + "\n";
    out += prefix + " corpus_hash=" + hex64(report.corpus_hash) + "\n";
    for (const std::string& note : report.notes)
        out += prefix + " note: " + note + "\n";
    return out;
}

}  // namespace

std::string render_report(const SweepReport& report,
                          const std::string& format) {
    if (format == "csv" || format == "tsv") {
        const char sep = format == "csv" ? ',' : '\t';
        std::string out = provenance_lines(report, "#");
        out += std::string("model") + sep + "train_policy" + sep +
               "eval_context" + sep + "n" + sep + "acc_cs" + sep + "acc_ci" +
               sep + "score\n";
        for (const ReportRow& r : report.rows) {
            out += r.model;
            out += sep;
            out += r.train_policy;
            out += sep;
            out += r.eval_context;
            out += sep;
            out += std::to_string(r.metrics.n);
            out += sep;
            out += format_fixed(r.metrics.acc_cs, 6);
            out += sep;
            out += format_fixed(r.metrics.acc_ci, 6);
            out += sep;
            out += format_fixed(r.metrics.score, 6);
            out += '\n';
        }
        return out;
    }
    if (format == "markdown") {
        std::string out = "# Sweep report\n\n";
        out += "- seed: " + std::to_string(report.seed) + "\n";
        out += "- config hash: `" + hex64(report.config_hash) + "`\n";
        out += "- corpus hash: `" + hex64(report.corpus_hash) + "`\n";
        for (const std::string& note : report.notes)
            out += "- note: " + note + "\n";
        std::vector<std::string> seen;
        for (const ReportRow& r : report.rows) {
            if (std::find(seen.begin(), seen.end(), r.model) != seen.end())
                continue;
            seen.push_back(r.model);
            out += "\n## " + r.model + " (train policy: " + r.train_policy +
                   ")\n\n";
            out += "| eval_context | n | acc_cs | acc_ci | score |\n";
            out += "|---|---:|---:|---:|---:|\n";
            for (const ReportRow& row : report.rows) {
                if (row.model != r.model) continue;
                out += "| " + row.eval_context + " | " +
                       std::to_string(row.metrics.n) + " | " +
                       format_fixed(row.metrics.acc_cs, 6) + " | " +
                       format_fixed(row.metrics.acc_ci, 6) + " | " +
                       format_fixed(row.metrics.score, 6) + " |\n";
            }
        }
        return out;
    }
    fail(ErrorCode::invalid_argument, "unknown report format '" + format + "'");
}

std::string render_plot_data(const SweepReport& report,
                             const std::string& model) {
    // Fixed-context points by ascending length, none as length 0, variable
    // as a trailing record of its own.
    std::vector<std::pair<std::size_t, double>> points;
    std::optional<double> variable_score;
    for (const ReportRow& r : report.rows) {
        if (r.model != model) continue;
        const ContextPolicy p = ContextPolicy::parse(r.eval_context);
        switch (p.kind) {
            case ContextPolicy::Kind::none:
                points.emplace_back(0, r.metrics.score);
                break;
            case ContextPolicy::Kind::fixed:
                points.emplace_back(p.fixed_k, r.metrics.score);
                break;
            case ContextPolicy::Kind::variable:
                variable_score = r.metrics.score;
                break;
        }
    }
    std::sort(points.begin(), points.end());
    std::string out = "context_length,score\n";
    for (const auto& [k, score] : points)
        out += std::to_string(k) + "," + format_fixed(score, 6) + "\n";
    if (variable_score)
        out += "variable," + format_fixed(*variable_score, 6) + "\n";
    return out;
}

void emit_report(const SweepReport& report, const ExperimentSpec& spec) {
    if (spec.eval_contexts.empty())
        fail(ErrorCode::invalid_argument,
             "refusing to emit a report with no eval contexts");
    std::filesystem::create_directories(spec.out_dir);
    for (const std::string& format : spec.report_formats) {
        const char* ext = format == "markdown" ? "md" : format.c_str();
        write_file(spec.out_dir + "/report." + ext,
                   render_report(report, format));
    }
    std::vector<std::string> seen;
    for (const ReportRow& r : report.rows) {
        if (std::find(seen.begin(), seen.end(), r.model) != seen.end())
            continue;
        seen.push_back(r.model);
        write_file(spec.out_dir + "/plot_" + r.model + ".csv",
                   render_plot_data(report, r.model));
    }
}

}  // namespace lemkit
