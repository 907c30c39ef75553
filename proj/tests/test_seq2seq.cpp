#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "lemkit/common.hpp"
#include "lemkit/seq2seq.hpp"
#include "lemkit/toygen.hpp"

using namespace lemkit;

namespace {

Corpus parse(const std::string& text) {
    std::istringstream in(text);
    return parse_corpus(in);
}

// Max relative error between analytic gradients and central finite
// differences over every parameter element.
double gradcheck(std::size_t vocab, std::size_t d, std::size_t h,
                 const std::vector<TokenId>& input,
                 const std::vector<TokenId>& target, std::uint64_t seed) {
    ModelParams params = init_params(vocab, d, h, seed);
    ModelParams grads = ModelParams::zeros(vocab, d, h);
    const ForwardResult fwd = forward(params, input, target);
    backward(params, *fwd.cache, grads);

    const double eps = 1e-5;
    double worst = 0.0;
    auto pviews = param_views(params);
    auto gviews = param_views(grads);
    for (std::size_t k = 0; k < pviews.size(); ++k) {
        for (std::size_t i = 0; i < pviews[k].size; ++i) {
            double& slot = pviews[k].data[i];
            const double saved = slot;
            slot = saved + eps;
            const double up = forward(params, input, target).loss;
            slot = saved - eps;
            const double down = forward(params, input, target).loss;
            slot = saved;
            const double fd = (up - down) / (2.0 * eps);
            const double an = gviews[k].data[i];
            const double rel = std::abs(an - fd) /
                               std::max({std::abs(an), std::abs(fd), 1e-8});
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

std::vector<TokenId> random_ids(SplitMix64& rng, std::size_t len,
                                std::size_t vocab) {
    std::vector<TokenId> ids;
    for (std::size_t i = 0; i < len; ++i)
        ids.push_back(static_cast<TokenId>(
            kFirstCharId + rng.uniform_below(vocab - kFirstCharId)));
    return ids;
}

// Ten single-token documents with a deterministic suffix rule.
Corpus memorization_corpus() {
    static const char* words[10][2] = {
        {"kota", "kot"},   {"psa", "pies"},    {"domu", "dom"},
        {"lasu", "las"},   {"ryby", "ryba"},   {"oka", "oko"},
        {"nogi", "noga"},  {"ręki", "ręka"},   {"wody", "woda"},
        {"mleka", "mleko"},
    };
    std::string text;
    for (int i = 0; i < 10; ++i) {
        const std::string id = "d" + std::to_string(i);
        text += "D\t" + id + "\t" + words[i][0] + "\n";
        text += "S\t" + id + "\t0\t1\t" + std::string(words[i][0]) + "\t" +
                words[i][1] + "\n";
    }
    return parse(text);
}

}  // namespace

TEST_CASE("init_params is deterministic, zero-biased and range-bounded") {
    ModelParams a = init_params(11, 4, 5, 99);
    ModelParams b = init_params(11, 4, 5, 99);
    ModelParams c = init_params(11, 4, 5, 100);
    auto va = param_views(a), vb = param_views(b), vc = param_views(c);
    bool all_equal = true, any_diff_seed = false;
    for (std::size_t k = 0; k < va.size(); ++k)
        for (std::size_t i = 0; i < va[k].size; ++i) {
            all_equal = all_equal && va[k].data[i] == vb[k].data[i];
            any_diff_seed = any_diff_seed || va[k].data[i] != vc[k].data[i];
        }
    CHECK(all_equal);
    CHECK(any_diff_seed);

    for (double v : a.enc.bz) CHECK(v == 0.0);
    for (double v : a.dec.bn) CHECK(v == 0.0);
    for (double v : a.out_b) CHECK(v == 0.0);

    auto check_bound = [](const Tensor2& t) {
        const double s = std::sqrt(6.0 / double(t.rows + t.cols));
        for (double v : t.data) CHECK(std::abs(v) <= s);
    };
    check_bound(a.embed);
    check_bound(a.enc.wn);
    check_bound(a.dec.uz);
    check_bound(a.att_w);
    check_bound(a.out_w);

    CHECK_THROWS_AS(init_params(0, 4, 5, 1), Error);
}

TEST_CASE("forward loss on an untrained model is near ln(vocab)") {
    const std::size_t vocab = 9;
    SplitMix64 rng(3);
    double total = 0.0;
    int count = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const ModelParams params = init_params(vocab, 4, 5, seed);
        for (int trial = 0; trial < 4; ++trial) {
            const auto input = random_ids(rng, 5, vocab);
            auto target = random_ids(rng, 4, vocab);
            target.push_back(kEos);
            total += forward(params, input, target).loss;
            ++count;
        }
    }
    const double mean = total / count;
    CHECK(mean == doctest::Approx(std::log(double(vocab))).epsilon(0.20));
}

TEST_CASE("attention weights are a distribution at every decode step") {
    const ModelParams params = init_params(9, 4, 5, 7);
    SplitMix64 rng(8);
    const auto input = random_ids(rng, 6, 9);
    auto target = random_ids(rng, 3, 9);
    target.push_back(kEos);
    const ForwardResult fwd = forward(params, input, target);
    REQUIRE(fwd.cache->dec_alpha.size() == target.size());
    for (const Vec& alpha : fwd.cache->dec_alpha) {
        REQUIRE(alpha.size() == input.size());
        double sum = 0.0;
        for (double a : alpha) {
            CHECK(a >= 0.0);
            sum += a;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("forward handles the minimal single-character case") {
    const ModelParams params = init_params(9, 4, 5, 11);
    const ForwardResult fwd = forward(params, {7}, {kEos});
    CHECK(std::isfinite(fwd.loss));
}

TEST_CASE("forward validates its inputs") {
    const ModelParams params = init_params(9, 4, 5, 11);
    CHECK_THROWS_AS(forward(params, {}, {kEos}), Error);
    CHECK_THROWS_AS(forward(params, {7}, {}), Error);
    CHECK_THROWS_AS(forward(params, {7}, {8}), Error);   // no EOS
    CHECK_THROWS_AS(forward(params, {42}, {kEos}), Error);  // id out of range
}

TEST_CASE("analytic gradients match central finite differences") {
    // Fixed seeds keep every gradient element well above the oracle's own
    // noise floor (~2e-11 absolute for central differences at 1e-5 on a
    // loss near ln 9); near-zero gradients cannot be resolved at rel 1e-4.
    SplitMix64 rng(12);
    const std::size_t vocab = 9;
    const auto input = random_ids(rng, 3, vocab);
    auto target = random_ids(rng, 2, vocab);
    target.push_back(kEos);
    const double worst = gradcheck(vocab, 4, 5, input, target, 377);
    CHECK(worst < 1e-4);
}

TEST_CASE("summing the loss over two identical examples doubles gradients") {
    SplitMix64 rng(5);
    const std::size_t vocab = 9;
    const ModelParams params = init_params(vocab, 4, 5, 21);
    const auto input = random_ids(rng, 4, vocab);
    auto target = random_ids(rng, 3, vocab);
    target.push_back(kEos);

    ModelParams once = ModelParams::zeros(vocab, 4, 5);
    ModelParams twice = ModelParams::zeros(vocab, 4, 5);
    const ForwardResult fwd = forward(params, input, target);
    backward(params, *fwd.cache, once);
    backward(params, *fwd.cache, twice);
    backward(params, *fwd.cache, twice);

    auto v1 = param_views(once), v2 = param_views(twice);
    for (std::size_t k = 0; k < v1.size(); ++k)
        for (std::size_t i = 0; i < v1[k].size; ++i)
            CHECK(v2[k].data[i] == doctest::Approx(2.0 * v1[k].data[i])
                                       .epsilon(1e-12));
}

TEST_CASE("gradients of unused embedding rows are zero") {
    const std::size_t vocab = 9;
    const ModelParams params = init_params(vocab, 4, 5, 31);
    ModelParams grads = ModelParams::zeros(vocab, 4, 5);
    // uses ids 7 and 8 plus BOS/EOS; row 3 (SEP) is untouched
    const ForwardResult fwd = forward(params, {7, 8}, {7, kEos});
    backward(params, *fwd.cache, grads);
    for (std::size_t c = 0; c < grads.embed.cols; ++c) {
        CHECK(grads.embed.at(kSep, c) == 0.0);
        CHECK(grads.embed.at(kPad, c) == 0.0);
    }
}

TEST_CASE("adam_step behaviour") {
    TrainConfig config;
    config.d = 4;
    config.h = 5;
    config.learning_rate = 0.01;
    config.seed = 1;

    SUBCASE("zero gradients leave parameters unchanged") {
        ModelParams params = init_params(9, 4, 5, 1);
        const ModelParams before = params;
        ModelParams grads = ModelParams::zeros(9, 4, 5);
        AdamState state = AdamState::zeros_like(params);
        adam_step(params, grads, state, config);
        CHECK(state.t == 1);
        auto va = param_views(params);
        ModelParams before_copy = before;
        auto vb = param_views(before_copy);
        for (std::size_t k = 0; k < va.size(); ++k)
            for (std::size_t i = 0; i < va[k].size; ++i)
                CHECK(va[k].data[i] == vb[k].data[i]);
    }

    SUBCASE("first step moves by about -lr * sign(g)") {
        ModelParams params = ModelParams::zeros(9, 4, 5);
        ModelParams grads = ModelParams::zeros(9, 4, 5);
        AdamState state = AdamState::zeros_like(params);
        config.gradient_clip_norm = 1e9;  // keep clipping out of the picture
        grads.att_v[0] = 3.0;
        grads.att_v[1] = -0.5;
        adam_step(params, grads, state, config);
        CHECK(params.att_v[0] ==
              doctest::Approx(-config.learning_rate).epsilon(1e-6));
        CHECK(params.att_v[1] ==
              doctest::Approx(config.learning_rate).epsilon(1e-6));
    }

    SUBCASE("global-norm clipping rescales the gradient") {
        ModelParams params = ModelParams::zeros(9, 4, 5);
        ModelParams grads = ModelParams::zeros(9, 4, 5);
        AdamState state = AdamState::zeros_like(params);
        config.gradient_clip_norm = 1.0;
        config.beta1 = 0.9;
        grads.att_v[0] = 6.0;
        grads.att_v[1] = 8.0;  // global norm 10, so scale = 0.1
        adam_step(params, grads, state, config);
        std::size_t att_v_index = 0;
        auto views = param_views(params);
        for (std::size_t k = 0; k < views.size(); ++k)
            if (std::string(views[k].name) == "att_v") att_v_index = k;
        // first moment after one step is (1 - beta1) * clipped gradient
        CHECK(state.m[att_v_index][0] ==
              doctest::Approx(0.1 * 6.0 * 0.1).epsilon(1e-12));
        CHECK(state.m[att_v_index][1] ==
              doctest::Approx(0.1 * 8.0 * 0.1).epsilon(1e-12));
    }

    SUBCASE("non-finite gradients are rejected") {
        ModelParams params = ModelParams::zeros(9, 4, 5);
        ModelParams grads = ModelParams::zeros(9, 4, 5);
        AdamState state = AdamState::zeros_like(params);
        grads.att_v[0] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(adam_step(params, grads, state, config), Error);
    }
}

TEST_CASE("train config validation rejects unusable settings") {
    TrainConfig config;
    config.seed = 1;
    CHECK_NOTHROW(config.validate());
    config.teacher_forcing = false;
    CHECK_THROWS_AS(config.validate(), Error);
    config.teacher_forcing = true;
    config.beta1 = 1.0;
    CHECK_THROWS_AS(config.validate(), Error);
    config.beta1 = 0.9;
    config.batch_size = 0;
    CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("a tiny model memorizes ten pairs") {
    const Corpus corpus = memorization_corpus();
    const Vocab vocab = Vocab::build(corpus);
    TrainConfig config;
    config.d = 16;
    config.h = 32;
    config.learning_rate = 0.01;
    config.batch_size = 2;
    config.epochs = 120;
    config.seed = 3;
    const TrainResult result =
        train(corpus, corpus, vocab, ContextPolicy::none(), config);
    CHECK(result.log.back().train_loss < 0.01);
    CHECK(result.log.back().train_loss <
          result.log.front().train_loss);  // it actually descended

    for (const LemmaSample& s : corpus.samples) {
        const PredictOutcome out =
            predict(result.params, s.orthographic, nullptr, vocab, config);
        CHECK(out.text == s.lemma);
        CHECK_FALSE(out.truncated);
    }
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
    const Corpus corpus = memorization_corpus();
    const Vocab vocab = Vocab::build(corpus);
    TrainConfig config;
    config.d = 8;
    config.h = 12;
    config.learning_rate = 0.01;
    config.batch_size = 4;
    config.epochs = 3;
    config.seed = 17;
    const std::string p1 =
        (std::filesystem::temp_directory_path() / "lemkit_ckpt_a.bin").string();
    const std::string p2 =
        (std::filesystem::temp_directory_path() / "lemkit_ckpt_b.bin").string();

    const TrainResult r1 =
        train(corpus, corpus, vocab, ContextPolicy::none(), config);
    save_checkpoint(p1, r1.params, vocab.hash());
    const TrainResult r2 =
        train(corpus, corpus, vocab, ContextPolicy::none(), config);
    save_checkpoint(p2, r2.params, vocab.hash());

    REQUIRE(r1.log.size() == r2.log.size());
    for (std::size_t i = 0; i < r1.log.size(); ++i) {
        CHECK(r1.log[i].train_loss == r2.log[i].train_loss);
        CHECK(r1.log[i].dev.score == r2.log[i].dev.score);
    }
    CHECK(read_file(p1) == read_file(p2));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("greedy decoding is deterministic and handles empty phrases") {
    const Corpus corpus = memorization_corpus();
    const Vocab vocab = Vocab::build(corpus);
    TrainConfig config;
    config.d = 8;
    config.h = 12;
    config.seed = 5;
    const ModelParams params = init_params(vocab.size(), 8, 12, 5);
    const PredictOutcome a = predict(params, "kota", nullptr, vocab, config);
    const PredictOutcome b = predict(params, "kota", nullptr, vocab, config);
    CHECK(a.text == b.text);
    CHECK(a.truncated == b.truncated);

    const PredictOutcome empty = predict(params, "", nullptr, vocab, config);
    CHECK(empty.text.empty());
    CHECK_FALSE(empty.truncated);
}

TEST_CASE("checkpoints round trip byte-exactly") {
    const ModelParams params = init_params(13, 6, 7, 123);
    const std::string path =
        (std::filesystem::temp_directory_path() / "lemkit_ckpt_rt.bin")
            .string();
    save_checkpoint(path, params, 0xDEADBEEFCAFEF00DULL);
    const std::string bytes1 = read_file(path);
    const Checkpoint loaded = load_checkpoint(path);
    CHECK(loaded.vocab_hash == 0xDEADBEEFCAFEF00DULL);
    CHECK(loaded.params.vocab == 13);
    CHECK(loaded.params.d == 6);
    CHECK(loaded.params.h == 7);
    save_checkpoint(path, loaded.params, loaded.vocab_hash);
    CHECK(read_file(path) == bytes1);

    ModelParams original = params;
    ModelParams reloaded = loaded.params;
    auto va = param_views(original), vb = param_views(reloaded);
    for (std::size_t k = 0; k < va.size(); ++k)
        for (std::size_t i = 0; i < va[k].size; ++i)
            CHECK(va[k].data[i] == vb[k].data[i]);

    write_file(path, "not a checkpoint");
    CHECK_THROWS_AS(load_checkpoint(path), Error);
    const std::string truncated = bytes1.substr(0, bytes1.size() - 9);
    write_file(path, truncated);
    CHECK_THROWS_AS(load_checkpoint(path), Error);
    std::filesystem::remove(path);
}

TEST_CASE("no-context training solves a fully deterministic toy corpus") {
    ToySpec spec;
    spec.train_count = 500;
    spec.dev_count = 100;
    spec.test_count = 50;
    spec.seed = 5;
    spec.ambiguous_fraction = 0.0;  // every sample solvable from the phrase
    const ToyCorpus toy = generate_toy_corpus(spec);
    const Vocab vocab = Vocab::build(toy.train);
    TrainConfig config;
    config.d = 32;
    config.h = 64;
    config.learning_rate = 0.003;
    config.batch_size = 8;
    config.epochs = 25;
    config.seed = 7;
    const TrainResult result =
        train(toy.train, toy.dev, vocab, ContextPolicy::none(), config);
    double best = 0.0;
    for (const EpochLog& e : result.log) best = std::max(best, e.dev.acc_ci);
    CHECK(best >= 0.90);
}
