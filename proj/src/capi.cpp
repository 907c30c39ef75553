// extern "C" surface over the C++ core. Exceptions stop here: every entry
// point catches, stores the message in a thread-local slot and returns a
// status code.

#include "lemkit.h"

#include <cstring>
#include <memory>
#include <string>

#include "lemkit/common.hpp"
#include "lemkit/config.hpp"
#include "lemkit/corpus.hpp"
#include "lemkit/harness.hpp"
#include "lemkit/metrics.hpp"
#include "lemkit/seq2seq.hpp"
#include "lemkit/toygen.hpp"

namespace {

thread_local std::string g_last_error;

lemkit_status to_status(lemkit::ErrorCode code) {
    switch (code) {
        case lemkit::ErrorCode::io: return LEMKIT_ERR_IO;
        case lemkit::ErrorCode::parse: return LEMKIT_ERR_PARSE;
        case lemkit::ErrorCode::invalid_argument: return LEMKIT_ERR_INVALID_ARGUMENT;
        case lemkit::ErrorCode::numeric: return LEMKIT_ERR_NUMERIC;
        case lemkit::ErrorCode::state: return LEMKIT_ERR_STATE;
        case lemkit::ErrorCode::internal: return LEMKIT_ERR_INTERNAL;
    }
    return LEMKIT_ERR_INTERNAL;
}

template <typename Fn>
lemkit_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return LEMKIT_OK;
    } catch (const lemkit::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return LEMKIT_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return LEMKIT_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

lemkit_status require(bool ok, const char* what) {
    if (ok) return LEMKIT_OK;
    g_last_error = std::string("null argument: ") + what;
    return LEMKIT_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct lemkit_corpus {
    lemkit::Corpus corpus;
};

struct lemkit_config {
    lemkit::KeyValueConfig kv{{}};
};

struct lemkit_model {
    std::unique_ptr<lemkit::Lemmatizer> impl;
    std::size_t max_span = 64;
};

extern "C" {

const char* lemkit_version(void) { return "1.0.0"; }

const char* lemkit_last_error(void) { return g_last_error.c_str(); }

void lemkit_string_free(char* s) { std::free(s); }

lemkit_status lemkit_corpus_open(const char* path, lemkit_corpus** out) {
    if (auto st = require(path && out, "path/out")) return st;
    return guarded([&] {
        auto handle = std::make_unique<lemkit_corpus>();
        handle->corpus = lemkit::parse_corpus_file(path);
        *out = handle.release();
    });
}

size_t lemkit_corpus_document_count(const lemkit_corpus* corpus) {
    return corpus ? corpus->corpus.documents.size() : 0;
}

size_t lemkit_corpus_sample_count(const lemkit_corpus* corpus) {
    return corpus ? corpus->corpus.samples.size() : 0;
}

lemkit_status lemkit_corpus_write(const lemkit_corpus* corpus,
                                  const char* path) {
    if (auto st = require(corpus && path, "corpus/path")) return st;
    return guarded([&] { lemkit::write_corpus_file(corpus->corpus, path); });
}

void lemkit_corpus_free(lemkit_corpus* corpus) { delete corpus; }

lemkit_status lemkit_config_new(lemkit_config** out) {
    if (auto st = require(out != nullptr, "out")) return st;
    return guarded([&] { *out = new lemkit_config(); });
}

lemkit_status lemkit_config_load(lemkit_config* config, const char* path) {
    if (auto st = require(config && path, "config/path")) return st;
    return guarded([&] { config->kv.load_file(path); });
}

lemkit_status lemkit_config_set(lemkit_config* config, const char* key,
                                const char* value) {
    if (auto st = require(config && key && value, "config/key/value"))
        return st;
    return guarded([&] { config->kv.set(key, value); });
}

void lemkit_config_free(lemkit_config* config) { delete config; }

lemkit_status lemkit_model_open(const char* checkpoint_path,
                                const char* vocab_path,
                                double max_decode_len_factor,
                                lemkit_model** out) {
    if (auto st = require(checkpoint_path && vocab_path && out,
                          "checkpoint/vocab/out"))
        return st;
    return guarded([&] {
        lemkit::Checkpoint ckpt = lemkit::load_checkpoint(checkpoint_path);
        lemkit::Vocab vocab = lemkit::Vocab::load(vocab_path);
        if (vocab.hash() != ckpt.vocab_hash)
            lemkit::fail(lemkit::ErrorCode::state,
                         "vocabulary file does not match the checkpoint "
                         "(hash mismatch)");
        if (vocab.size() != ckpt.params.vocab)
            lemkit::fail(lemkit::ErrorCode::state,
                         "vocabulary size does not match the checkpoint");
        lemkit::TrainConfig config;
        config.d = ckpt.params.d;
        config.h = ckpt.params.h;
        if (max_decode_len_factor > 0.0)
            config.max_decode_len_factor = max_decode_len_factor;
        auto handle = std::make_unique<lemkit_model>();
        handle->impl = lemkit::make_seq2seq_lemmatizer(
            std::move(ckpt.params), std::move(vocab), config);
        *out = handle.release();
    });
}

lemkit_status lemkit_baseline_open(const char* kind,
                                   const char* train_corpus_path,
                                   lemkit_model** out) {
    if (auto st = require(kind && out, "kind/out")) return st;
    return guarded([&] {
        auto handle = std::make_unique<lemkit_model>();
        const std::string k = kind;
        if (k == "identity") {
            handle->impl = lemkit::make_identity_lemmatizer();
        } else {
            if (train_corpus_path == nullptr)
                lemkit::fail(lemkit::ErrorCode::invalid_argument,
                             "baseline '" + k + "' needs a training corpus");
            const lemkit::Corpus train =
                lemkit::parse_corpus_file(train_corpus_path);
            if (k == "lexicon")
                handle->impl = lemkit::make_lexicon_lemmatizer(train);
            else if (k == "edit_tree")
                handle->impl = lemkit::make_tree_lemmatizer(train);
            else
                lemkit::fail(lemkit::ErrorCode::invalid_argument,
                             "unknown baseline kind '" + k + "'");
        }
        *out = handle.release();
    });
}

lemkit_status lemkit_model_lemmatize(lemkit_model* model, const char* phrase,
                                     const char* left_context,
                                     const char* right_context,
                                     char** lemma_out) {
    if (auto st = require(model && phrase && lemma_out, "model/phrase/out"))
        return st;
    return guarded([&] {
        auto tokens_of = [](const char* text) {
            std::vector<std::string> out;
            if (text == nullptr) return out;
            for (std::string& tok : lemkit::split(text, ' '))
                if (!tok.empty()) out.push_back(std::move(tok));
            return out;
        };
        std::vector<std::string> left = tokens_of(left_context);
        std::vector<std::string> right = tokens_of(right_context);
        std::string result;
        if (!left.empty() || !right.empty()) {
            lemkit::ContextWindow w;
            w.max_span = model->max_span;
            w.left = std::move(left);
            w.right = std::move(right);
            if (w.left.size() > w.max_span || w.right.size() > w.max_span)
                lemkit::fail(lemkit::ErrorCode::invalid_argument,
                             "context longer than the 64-token span");
            result = model->impl->lemmatize(phrase, &w);
        } else {
            result = model->impl->lemmatize(phrase, nullptr);
        }
        *lemma_out = dup_string(result);
        if (*lemma_out == nullptr)
            lemkit::fail(lemkit::ErrorCode::internal, "allocation failed");
    });
}

lemkit_status lemkit_model_predict_file(lemkit_model* model,
                                        const char* corpus_path,
                                        const char* eval_context,
                                        uint64_t seed,
                                        const char* predictions_path,
                                        const char* gold_path) {
    if (auto st = require(model && corpus_path && eval_context &&
                              predictions_path,
                          "model/corpus/eval_context/predictions"))
        return st;
    return guarded([&] {
        const lemkit::Corpus corpus = lemkit::parse_corpus_file(corpus_path);
        lemkit::ContextPolicy ctx = lemkit::ContextPolicy::parse(eval_context);
        ctx.validate(model->max_span);
        lemkit::PredictionRun run = lemkit::predict_corpus(
            *model->impl, corpus, ctx, model->max_span, seed);
        std::string preds;
        for (const auto& [id, text] : run.id_and_prediction)
            preds += id + "\t" + text + "\n";
        lemkit::write_file(predictions_path, preds);
        if (gold_path != nullptr) {
            std::string gold;
            for (std::size_t i = 0; i < corpus.samples.size(); ++i)
                gold += lemkit::sample_id(i) + "\t" +
                        corpus.samples[i].lemma + "\n";
            lemkit::write_file(gold_path, gold);
        }
    });
}

void lemkit_model_free(lemkit_model* model) { delete model; }

namespace {

lemkit::ExperimentSpec spec_from_handle(const lemkit_config* config) {
    lemkit::KeyValueConfig kv(lemkit::ExperimentSpec::config_keys());
    for (const auto& [key, value] : config->kv.entries()) kv.set(key, value);
    return lemkit::ExperimentSpec::from_config(kv);
}

}  // namespace

lemkit_status lemkit_train(const lemkit_config* config) {
    if (auto st = require(config != nullptr, "config")) return st;
    return guarded([&] {
        const lemkit::ExperimentSpec spec = spec_from_handle(config);
        if (spec.models.size() != 1)
            lemkit::fail(lemkit::ErrorCode::invalid_argument,
                         "train expects exactly one model");
        lemkit::run_training(spec);
    });
}

lemkit_status lemkit_sweep(const lemkit_config* config) {
    if (auto st = require(config != nullptr, "config")) return st;
    return guarded([&] { lemkit::run_experiment(spec_from_handle(config)); });
}

lemkit_status lemkit_toy_generate(const lemkit_config* config) {
    if (auto st = require(config != nullptr, "config")) return st;
    return guarded([&] {
        const lemkit::KeyValueConfig& kv = config->kv;
        lemkit::ToySpec spec;
        spec.out_dir = kv.get("out_dir");
        spec.seed = kv.get_uint("seed");
        if (kv.has("train_count"))
            spec.train_count = static_cast<std::size_t>(kv.get_uint("train_count"));
        if (kv.has("dev_count"))
            spec.dev_count = static_cast<std::size_t>(kv.get_uint("dev_count"));
        if (kv.has("test_count"))
            spec.test_count = static_cast<std::size_t>(kv.get_uint("test_count"));
        if (kv.has("ambiguous_fraction"))
            spec.ambiguous_fraction = kv.get_double("ambiguous_fraction");
        if (kv.has("multi_token_fraction"))
            spec.multi_token_fraction = kv.get_double("multi_token_fraction");
        if (kv.has("held_out_stems"))
            spec.held_out_stems = kv.get_bool("held_out_stems");
        if (kv.has("max_trigger_distance"))
            spec.max_trigger_distance =
                static_cast<std::size_t>(kv.get_uint("max_trigger_distance"));
        lemkit::write_toy_corpus(spec);
    });
}

lemkit_status lemkit_score_files(const char* predictions_path,
                                 const char* gold_path, char** csv_out) {
    if (auto st = require(predictions_path && gold_path && csv_out,
                          "predictions/gold/out"))
        return st;
    return guarded([&] {
        const lemkit::Metrics m =
            lemkit::score_files(predictions_path, gold_path);
        *csv_out = dup_string(lemkit::metrics_csv_line(m));
        if (*csv_out == nullptr)
            lemkit::fail(lemkit::ErrorCode::internal, "allocation failed");
    });
}

}  // extern "C"
