#pragma once

// Experiment driver: trains the requested models, evaluates each under a
// list of context settings, and writes the report, plot data and model
// artifacts into the output directory.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lemkit/baselines.hpp"
#include "lemkit/config.hpp"
#include "lemkit/corpus.hpp"
#include "lemkit/encoding.hpp"
#include "lemkit/metrics.hpp"
#include "lemkit/seq2seq.hpp"

namespace lemkit {

/// Uniform prediction interface over baselines and the neural model.
class Lemmatizer {
public:
    virtual ~Lemmatizer() = default;
    /// `window` is null for no-context evaluation. Baselines ignore it.
    virtual std::string lemmatize(const std::string& phrase,
                                  const ContextWindow* window) = 0;
    virtual std::size_t truncated_decodes() const { return 0; }
};

std::unique_ptr<Lemmatizer> make_identity_lemmatizer();
std::unique_ptr<Lemmatizer> make_lexicon_lemmatizer(const Corpus& train);
std::unique_ptr<Lemmatizer> make_tree_lemmatizer(
    const Corpus& train, TreeClassifier::TrainStats* stats = nullptr);
std::unique_ptr<Lemmatizer> make_seq2seq_lemmatizer(ModelParams params,
                                                    Vocab vocab,
                                                    TrainConfig config);

struct ExperimentSpec {
    std::string train_corpus;
    std::string dev_corpus;
    std::string test_corpus;
    std::vector<std::string> models;         // identity|lexicon|edit_tree|seq2seq
    ContextPolicy train_policy;
    std::vector<ContextPolicy> eval_contexts;
    std::vector<std::string> eval_context_names;  // as requested, e.g. "fixed:8"
    TrainConfig train;
    std::string out_dir;
    std::vector<std::string> report_formats;  // csv|tsv|markdown

    /// Config keys accepted by `from_config` and the CLI.
    static const std::vector<std::string>& config_keys();
    static ExperimentSpec from_config(const KeyValueConfig& kv);

    /// Canonical key=value rendering of every effective field (defaults
    /// materialized); hashing this yields the provenance config hash.
    std::string canonical() const;
    std::uint64_t config_hash() const;
};

struct ReportRow {
    std::string model;
    std::string train_policy;   // "-" for models that do not train with one
    std::string eval_context;
    Metrics metrics;
};

struct SweepReport {
    std::vector<ReportRow> rows;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t corpus_hash = 0;
    std::vector<std::string> notes;  // free-form provenance lines
};

/// Sample ids used in prediction/gold files: s000000, s000001, ... in
/// corpus sample order.
std::string sample_id(std::size_t index);

struct PredictionRun {
    std::vector<std::pair<std::string, std::string>> id_and_prediction;
    std::size_t truncated = 0;
};

/// Predict every sample of `corpus` under one evaluation context. For
/// variable contexts each sample draws its own length from `row_seed`.
PredictionRun predict_corpus(Lemmatizer& model, const Corpus& corpus,
                             const ContextPolicy& eval_context,
                             std::size_t max_span, std::uint64_t row_seed);

SweepReport run_experiment(const ExperimentSpec& spec);

struct TrainArtifacts {
    std::string checkpoint_path;  // seq2seq only
    std::string vocab_path;       // seq2seq only
    std::string log_path;         // seq2seq only
    std::string inventory_path;   // edit_tree only
    std::size_t best_epoch = 0;
};

/// Standalone training for spec.models[0] ("seq2seq" or "edit_tree"),
/// writing the model artifacts into out_dir.
TrainArtifacts run_training(const ExperimentSpec& spec);

/// Render the report table. `format` is csv, tsv or markdown.
std::string render_report(const SweepReport& report, const std::string& format);

/// Plot data for one model: `context_length,score` rows for the none (0)
/// and fixed points plus a trailing `variable` record when present.
std::string render_plot_data(const SweepReport& report,
                             const std::string& model);

/// Write the report in every requested format plus per-model plot data.
/// Throws on an empty eval-context list before touching any file.
void emit_report(const SweepReport& report, const ExperimentSpec& spec);

}  // namespace lemkit
