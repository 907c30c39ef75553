// lemkit command-line driver. Talks to the core exclusively through the
// public C API in lemkit.h.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lemkit.h"

namespace {

struct ConfigDeleter {
    void operator()(lemkit_config* c) const { lemkit_config_free(c); }
};
using ConfigPtr = std::unique_ptr<lemkit_config, ConfigDeleter>;

struct ModelDeleter {
    void operator()(lemkit_model* m) const { lemkit_model_free(m); }
};
using ModelPtr = std::unique_ptr<lemkit_model, ModelDeleter>;

[[noreturn]] void die(lemkit_status status) {
    std::fprintf(stderr, "error: %s\n", lemkit_last_error());
    std::exit(status == LEMKIT_OK ? 1 : static_cast<int>(status));
}

void check(lemkit_status status) {
    if (status != LEMKIT_OK) die(status);
}

// The config keys accepted by train/sweep; each becomes a CLI flag that
// overrides the value from --config.
const std::vector<std::string> kExperimentKeys = {
    "train_corpus", "dev_corpus", "test_corpus", "models", "train_policy",
    "eval_contexts", "embed_dim", "hidden_dim", "learning_rate", "beta1",
    "beta2", "epsilon", "batch_size", "epochs", "seed", "grad_clip",
    "max_decode_len_factor", "fixed_input_len", "max_span", "out_dir",
    "report_formats"};

struct ExperimentArgs {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;

    void register_on(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value config file");
        overrides.reserve(kExperimentKeys.size());
        for (const std::string& key : kExperimentKeys) {
            overrides.emplace_back(key, "");
            auto& slot = overrides.back().second;
            cmd->add_option("--" + key, slot, "override config key " + key);
        }
    }

    ConfigPtr build() const {
        lemkit_config* raw = nullptr;
        check(lemkit_config_new(&raw));
        ConfigPtr config(raw);
        if (!config_path.empty())
            check(lemkit_config_load(config.get(), config_path.c_str()));
        for (const auto& [key, value] : overrides)
            if (!value.empty())
                check(lemkit_config_set(config.get(), key.c_str(),
                                        value.c_str()));
        return config;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lemkit — context-aware lemmatization toolkit"};
    app.require_subcommand(1);

    // ---- prepare ----
    auto* prepare = app.add_subcommand(
        "prepare", "validate a corpus file and optionally re-serialize it");
    std::string prepare_input, prepare_output;
    prepare->add_option("--input", prepare_input, "corpus file")->required();
    prepare->add_option("--output", prepare_output,
                        "write the canonical serialization here");
    prepare->callback([&] {
        lemkit_corpus* corpus = nullptr;
        check(lemkit_corpus_open(prepare_input.c_str(), &corpus));
        std::printf("documents\t%zu\nsamples\t%zu\n",
                    lemkit_corpus_document_count(corpus),
                    lemkit_corpus_sample_count(corpus));
        if (!prepare_output.empty())
            check(lemkit_corpus_write(corpus, prepare_output.c_str()));
        lemkit_corpus_free(corpus);
    });

    // ---- gen-toy ----
    auto* gen = app.add_subcommand("gen-toy",
                                   "generate the synthetic train/dev/test corpus");
    std::string gen_out_dir;
    std::uint64_t gen_seed = 0;
    std::size_t gen_train = 1000, gen_dev = 200, gen_test = 200;
    double gen_amb = 0.30, gen_multi = 0.10;
    bool gen_held_out = false;
    std::size_t gen_trigger_dist = 4;
    gen->add_option("--out-dir", gen_out_dir, "output directory")->required();
    gen->add_option("--seed", gen_seed, "generator seed")->required();
    gen->add_option("--train-count", gen_train, "training samples");
    gen->add_option("--dev-count", gen_dev, "dev samples");
    gen->add_option("--test-count", gen_test, "test samples");
    gen->add_option("--ambiguous-fraction", gen_amb,
                    "fraction of trigger-dependent samples");
    gen->add_option("--multi-token-fraction", gen_multi,
                    "fraction of two-token phrases");
    gen->add_flag("--held-out-stems", gen_held_out,
                  "disjoint stem inventories across splits");
    gen->add_option("--max-trigger-distance", gen_trigger_dist,
                    "max tokens between trigger and phrase (1..8)");
    gen->callback([&] {
        lemkit_config* raw = nullptr;
        check(lemkit_config_new(&raw));
        ConfigPtr config(raw);
        auto set = [&](const char* key, const std::string& value) {
            check(lemkit_config_set(config.get(), key, value.c_str()));
        };
        set("out_dir", gen_out_dir);
        set("seed", std::to_string(gen_seed));
        set("train_count", std::to_string(gen_train));
        set("dev_count", std::to_string(gen_dev));
        set("test_count", std::to_string(gen_test));
        set("ambiguous_fraction", std::to_string(gen_amb));
        set("multi_token_fraction", std::to_string(gen_multi));
        set("held_out_stems", gen_held_out ? "true" : "false");
        set("max_trigger_distance", std::to_string(gen_trigger_dist));
        check(lemkit_toy_generate(config.get()));
        std::printf("wrote %s/{train,dev,test}.tsv\n", gen_out_dir.c_str());
    });

    // ---- train ----
    auto* train_cmd = app.add_subcommand(
        "train", "train one model (seq2seq or edit_tree) and save artifacts");
    ExperimentArgs train_args;
    train_args.register_on(train_cmd);
    train_cmd->callback([&] {
        const ConfigPtr config = train_args.build();
        check(lemkit_train(config.get()));
        std::printf("training artifacts written\n");
    });

    // ---- predict ----
    auto* predict = app.add_subcommand(
        "predict", "lemmatize a corpus file or a single phrase");
    std::string pr_checkpoint, pr_vocab, pr_model, pr_train_corpus;
    std::string pr_input, pr_output, pr_gold_out, pr_context = "none";
    std::string pr_phrase, pr_left, pr_right;
    std::uint64_t pr_seed = 0;
    double pr_decode_factor = 0.0;
    predict->add_option("--checkpoint", pr_checkpoint, "seq2seq checkpoint");
    predict->add_option("--vocab", pr_vocab, "vocab file for the checkpoint");
    predict->add_option("--model", pr_model,
                        "baseline kind: identity, lexicon or edit_tree");
    predict->add_option("--train-corpus", pr_train_corpus,
                        "training corpus for lexicon/edit_tree");
    predict->add_option("--input", pr_input, "corpus file to lemmatize");
    predict->add_option("--output", pr_output, "predictions file (id<TAB>text)");
    predict->add_option("--gold-out", pr_gold_out,
                        "also write the gold file for scoring");
    predict->add_option("--eval-context", pr_context,
                        "none, fixed:K or variable[:P:KMIN:KMAX]");
    predict->add_option("--seed", pr_seed, "seed for variable contexts");
    predict->add_option("--max-decode-len-factor", pr_decode_factor,
                        "decode length cap factor (default 2.0)");
    predict->add_option("--phrase", pr_phrase, "single phrase to lemmatize");
    predict->add_option("--left", pr_left, "left context tokens (spaces)");
    predict->add_option("--right", pr_right, "right context tokens (spaces)");
    predict->callback([&] {
        ModelPtr model;
        if (!pr_checkpoint.empty() || !pr_vocab.empty()) {
            lemkit_model* raw = nullptr;
            check(lemkit_model_open(pr_checkpoint.c_str(), pr_vocab.c_str(),
                                    pr_decode_factor, &raw));
            model.reset(raw);
        } else if (!pr_model.empty()) {
            lemkit_model* raw = nullptr;
            check(lemkit_baseline_open(
                pr_model.c_str(),
                pr_train_corpus.empty() ? nullptr : pr_train_corpus.c_str(),
                &raw));
            model.reset(raw);
        } else {
            std::fprintf(stderr,
                         "error: predict needs --checkpoint/--vocab or "
                         "--model\n");
            std::exit(1);
        }
        if (pr_phrase.empty() && pr_input.empty()) {
            std::fprintf(stderr, "error: predict needs --phrase or --input\n");
            std::exit(1);
        }
        if (!pr_phrase.empty()) {
            char* lemma = nullptr;
            check(lemkit_model_lemmatize(
                model.get(), pr_phrase.c_str(),
                pr_left.empty() ? nullptr : pr_left.c_str(),
                pr_right.empty() ? nullptr : pr_right.c_str(), &lemma));
            std::printf("%s\n", lemma);
            lemkit_string_free(lemma);
            return;
        }
        if (pr_output.empty()) {
            std::fprintf(stderr, "error: --input needs --output\n");
            std::exit(1);
        }
        check(lemkit_model_predict_file(
            model.get(), pr_input.c_str(), pr_context.c_str(), pr_seed,
            pr_output.c_str(),
            pr_gold_out.empty() ? nullptr : pr_gold_out.c_str()));
        std::printf("predictions written to %s\n", pr_output.c_str());
    });

    // ---- score ----
    auto* score = app.add_subcommand(
        "score", "exact-match metrics over prediction and gold files");
    std::string sc_pred, sc_gold, sc_output;
    score->add_option("--pred", sc_pred, "predictions file")->required();
    score->add_option("--gold", sc_gold, "gold file")->required();
    score->add_option("--output", sc_output, "write the CSV line here");
    score->callback([&] {
        char* csv = nullptr;
        check(lemkit_score_files(sc_pred.c_str(), sc_gold.c_str(), &csv));
        std::printf("%s\n", csv);
        if (!sc_output.empty()) {
            std::string line = std::string(csv) + "\n";
            FILE* f = std::fopen(sc_output.c_str(), "wb");
            if (f == nullptr) {
                std::fprintf(stderr, "error: cannot write %s\n",
                             sc_output.c_str());
                lemkit_string_free(csv);
                std::exit(1);
            }
            std::fwrite(line.data(), 1, line.size(), f);
            std::fclose(f);
        }
        lemkit_string_free(csv);
    });

    // ---- sweep ----
    auto* sweep = app.add_subcommand(
        "sweep", "train/evaluate every requested model under every context");
    ExperimentArgs sweep_args;
    sweep_args.register_on(sweep);
    sweep->callback([&] {
        const ConfigPtr config = sweep_args.build();
        check(lemkit_sweep(config.get()));
        std::printf("sweep report written\n");
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}
