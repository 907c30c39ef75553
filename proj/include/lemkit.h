/* lemkit — context-aware lemmatization toolkit, public C API.
 *
 * Every object is an opaque handle created and destroyed by the library.
 * Functions return LEMKIT_OK on success; on failure they return an error
 * code and leave a human-readable message retrievable (on the same thread)
 * via lemkit_last_error(). Strings returned through char** out-parameters
 * are heap-allocated by the library and must be released with
 * lemkit_string_free().
 */

#ifndef LEMKIT_H
#define LEMKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LEMKIT_API __declspec(dllexport)
#else
#define LEMKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lemkit_status {
    LEMKIT_OK = 0,
    LEMKIT_ERR_IO = 1,
    LEMKIT_ERR_PARSE = 2,
    LEMKIT_ERR_INVALID_ARGUMENT = 3,
    LEMKIT_ERR_NUMERIC = 4,
    LEMKIT_ERR_STATE = 5,
    LEMKIT_ERR_INTERNAL = 6,
} lemkit_status;

LEMKIT_API const char* lemkit_version(void);

/* Message from the most recent failing call on this thread ("" if none). */
LEMKIT_API const char* lemkit_last_error(void);

LEMKIT_API void lemkit_string_free(char* s);

/* ---- corpus ------------------------------------------------------------ */

typedef struct lemkit_corpus lemkit_corpus;

LEMKIT_API lemkit_status lemkit_corpus_open(const char* path,
                                            lemkit_corpus** out);
LEMKIT_API size_t lemkit_corpus_document_count(const lemkit_corpus* corpus);
LEMKIT_API size_t lemkit_corpus_sample_count(const lemkit_corpus* corpus);
/* Canonical re-serialization (D records, then S records). */
LEMKIT_API lemkit_status lemkit_corpus_write(const lemkit_corpus* corpus,
                                             const char* path);
LEMKIT_API void lemkit_corpus_free(lemkit_corpus* corpus);

/* ---- configuration ------------------------------------------------------ */

/* Flat key=value configuration; the same keys the CLI accepts
 * (train_corpus, dev_corpus, test_corpus, models, train_policy,
 * eval_contexts, embed_dim, hidden_dim, learning_rate, beta1, beta2,
 * epsilon, batch_size, epochs, seed, grad_clip, max_decode_len_factor,
 * fixed_input_len, max_span, out_dir, report_formats). */

typedef struct lemkit_config lemkit_config;

LEMKIT_API lemkit_status lemkit_config_new(lemkit_config** out);
LEMKIT_API lemkit_status lemkit_config_load(lemkit_config* config,
                                            const char* path);
LEMKIT_API lemkit_status lemkit_config_set(lemkit_config* config,
                                           const char* key, const char* value);
LEMKIT_API void lemkit_config_free(lemkit_config* config);

/* ---- models -------------------------------------------------------------- */

typedef struct lemkit_model lemkit_model;

/* Load a trained neural lemmatizer: checkpoint plus the vocabulary it was
 * trained with (the checkpoint records the vocab hash and the pair is
 * verified). max_decode_len_factor <= 0 selects the default (2.0). */
LEMKIT_API lemkit_status lemkit_model_open(const char* checkpoint_path,
                                           const char* vocab_path,
                                           double max_decode_len_factor,
                                           lemkit_model** out);

/* Build a baseline from a training corpus; kind is "identity", "lexicon"
 * or "edit_tree". */
LEMKIT_API lemkit_status lemkit_baseline_open(const char* kind,
                                              const char* train_corpus_path,
                                              lemkit_model** out);

/* Lemmatize one phrase. Contexts are space-separated token strings in
 * document order; pass NULL (or "") for no context on either side. */
LEMKIT_API lemkit_status lemkit_model_lemmatize(lemkit_model* model,
                                                const char* phrase,
                                                const char* left_context,
                                                const char* right_context,
                                                char** lemma_out);

/* Predict every sample of a corpus file under an evaluation context
 * ("none", "fixed:K" or "variable[:P:KMIN:KMAX]"); writes
 * `id<TAB>prediction` lines to predictions_path and, when gold_path is not
 * NULL, matching `id<TAB>gold` lines. */
LEMKIT_API lemkit_status lemkit_model_predict_file(lemkit_model* model,
                                                   const char* corpus_path,
                                                   const char* eval_context,
                                                   uint64_t seed,
                                                   const char* predictions_path,
                                                   const char* gold_path);

LEMKIT_API void lemkit_model_free(lemkit_model* model);

/* ---- operations ----------------------------------------------------------- */

/* Train per the config (model, corpora, policy, hyperparameters, out_dir);
 * artifacts land in out_dir. */
LEMKIT_API lemkit_status lemkit_train(const lemkit_config* config);

/* Full experiment sweep: train the requested models, evaluate each under
 * every eval context, write report + plot data + artifacts to out_dir. */
LEMKIT_API lemkit_status lemkit_sweep(const lemkit_config* config);

/* Generate the synthetic corpus (keys: out_dir, seed, train_count,
 * dev_count, test_count, ambiguous_fraction, multi_token_fraction,
 * held_out_stems, max_trigger_distance). */
LEMKIT_API lemkit_status lemkit_toy_generate(const lemkit_config* config);

/* Score a predictions file against a gold file (both `id<TAB>text`).
 * csv_out receives the one-line CSV `n,acc_cs,acc_ci,score`. */
LEMKIT_API lemkit_status lemkit_score_files(const char* predictions_path,
                                            const char* gold_path,
                                            char** csv_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LEMKIT_H */
