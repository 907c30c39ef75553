#include "lemkit/seq2seq.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "lemkit/common.hpp"

namespace lemkit {

ModelParams ModelParams::zeros(std::size_t vocab, std::size_t d,
                               std::size_t h) {
    ModelParams p;
    p.vocab = vocab;
    p.d = d;
    p.h = h;
    p.embed = Tensor2(vocab, d);
    auto make_gru = [&](std::size_t input) {
        GruWeights g;
        g.wz = Tensor2(h, input);
        g.wr = Tensor2(h, input);
        g.wn = Tensor2(h, input);
        g.uz = Tensor2(h, h);
        g.ur = Tensor2(h, h);
        g.un = Tensor2(h, h);
        g.bz.assign(h, 0.0);
        g.br.assign(h, 0.0);
        g.bn.assign(h, 0.0);
        return g;
    };
    p.enc = make_gru(d);
    p.dec = make_gru(d + h);
    p.att_w = Tensor2(h, h);
    p.att_u = Tensor2(h, h);
    p.att_v.assign(h, 0.0);
    p.out_w = Tensor2(vocab, 2 * h);
    p.out_b.assign(vocab, 0.0);
    return p;
}

std::vector<ParamView> param_views(ModelParams& p) {
    std::vector<ParamView> v;
    auto add_t = [&](const char* name, Tensor2& t) {
        v.push_back({name, t.data.data(), t.data.size()});
    };
    auto add_v = [&](const char* name, Vec& x) {
        v.push_back({name, x.data(), x.size()});
    };
    add_t("embed", p.embed);
    add_t("enc_wz", p.enc.wz);
    add_t("enc_wr", p.enc.wr);
    add_t("enc_wn", p.enc.wn);
    add_t("enc_uz", p.enc.uz);
    add_t("enc_ur", p.enc.ur);
    add_t("enc_un", p.enc.un);
    add_v("enc_bz", p.enc.bz);
    add_v("enc_br", p.enc.br);
    add_v("enc_bn", p.enc.bn);
    add_t("dec_wz", p.dec.wz);
    add_t("dec_wr", p.dec.wr);
    add_t("dec_wn", p.dec.wn);
    add_t("dec_uz", p.dec.uz);
    add_t("dec_ur", p.dec.ur);
    add_t("dec_un", p.dec.un);
    add_v("dec_bz", p.dec.bz);
    add_v("dec_br", p.dec.br);
    add_v("dec_bn", p.dec.bn);
    add_t("att_w", p.att_w);
    add_t("att_u", p.att_u);
    add_v("att_v", p.att_v);
    add_t("out_w", p.out_w);
    add_v("out_b", p.out_b);
    return v;
}

void TrainConfig::validate() const {
    if (d == 0 || h == 0) fail(ErrorCode::invalid_argument, "d and h must be positive");
    if (learning_rate <= 0.0) fail(ErrorCode::invalid_argument, "learning_rate must be positive");
    if (beta1 <= 0.0 || beta1 >= 1.0 || beta2 <= 0.0 || beta2 >= 1.0)
        fail(ErrorCode::invalid_argument, "beta1 and beta2 must lie in (0,1)");
    if (epsilon <= 0.0) fail(ErrorCode::invalid_argument, "epsilon must be positive");
    if (batch_size == 0) fail(ErrorCode::invalid_argument, "batch_size must be positive");
    if (epochs == 0) fail(ErrorCode::invalid_argument, "epochs must be positive");
    if (gradient_clip_norm <= 0.0)
        fail(ErrorCode::invalid_argument, "gradient_clip_norm must be positive");
    if (!teacher_forcing)
        fail(ErrorCode::invalid_argument,
             "scheduled sampling is not supported; teacher_forcing must stay "
             "on");
    if (max_decode_len_factor <= 0.0)
        fail(ErrorCode::invalid_argument, "max_decode_len_factor must be positive");
    if (max_span == 0) fail(ErrorCode::invalid_argument, "max_span must be positive");
}

AdamState AdamState::zeros_like(ModelParams& p) {
    AdamState s;
    for (const ParamView& view : param_views(p)) {
        s.m.emplace_back(view.size, 0.0);
        s.v.emplace_back(view.size, 0.0);
    }
    s.t = 0;
    return s;
}

ModelParams init_params(std::size_t vocab, std::size_t d, std::size_t h,
                        std::uint64_t seed) {
    if (vocab == 0 || d == 0 || h == 0)
        fail(ErrorCode::invalid_argument, "init_params: sizes must be positive");
    ModelParams p = ModelParams::zeros(vocab, d, h);
    SplitMix64 rng(seed);
    auto fill = [&](Tensor2& t) {
        const double s =
            std::sqrt(6.0 / static_cast<double>(t.rows + t.cols));
        for (double& w : t.data) w = rng.uniform_real(-s, s);
    };
    // Draw order matches param_views; biases stay zero.
    fill(p.embed);
    fill(p.enc.wz); fill(p.enc.wr); fill(p.enc.wn);
    fill(p.enc.uz); fill(p.enc.ur); fill(p.enc.un);
    fill(p.dec.wz); fill(p.dec.wr); fill(p.dec.wn);
    fill(p.dec.uz); fill(p.dec.ur); fill(p.dec.un);
    fill(p.att_w);
    fill(p.att_u);
    {
        const double s = std::sqrt(6.0 / static_cast<double>(h + 1));
        for (double& w : p.att_v) w = rng.uniform_real(-s, s);
    }
    fill(p.out_w);
    return p;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool all_finite(const Vec& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return std::isfinite(acc);
}

// One GRU step:
//   z = sigma(Wz x + Uz h_prev + bz)
//   r = sigma(Wr x + Ur h_prev + br)
//   m = Un h_prev                      (cached for backward)
//   g = tanh(Wn x + r . m + bn)
//   h = (1 - z) . g + z . h_prev
void gru_forward(const GruWeights& w, const double* x, const Vec& h_prev,
                 Vec& z, Vec& r, Vec& g, Vec& m, Vec& h_out) {
    const std::size_t h = h_prev.size();
    z.assign(w.bz.begin(), w.bz.end());
    matvec_acc(w.wz, x, z.data());
    matvec_acc(w.uz, h_prev.data(), z.data());
    r.assign(w.br.begin(), w.br.end());
    matvec_acc(w.wr, x, r.data());
    matvec_acc(w.ur, h_prev.data(), r.data());
    m.assign(h, 0.0);
    matvec_acc(w.un, h_prev.data(), m.data());
    g.assign(w.bn.begin(), w.bn.end());
    matvec_acc(w.wn, x, g.data());
    h_out.resize(h);
    for (std::size_t i = 0; i < h; ++i) {
        z[i] = sigmoid(z[i]);
        r[i] = sigmoid(r[i]);
        g[i] = std::tanh(g[i] + r[i] * m[i]);
        h_out[i] = (1.0 - z[i]) * g[i] + z[i] * h_prev[i];
    }
}

// Reverse of gru_forward. `dh` is the incoming gradient of h_out;
// gradients accumulate into `gw` (weights), `dx` (input) and `dh_prev`.
void gru_backward(const GruWeights& w, GruWeights& gw, const double* x,
                  const Vec& h_prev, const Vec& z, const Vec& r, const Vec& g,
                  const Vec& m, const Vec& dh, double* dx, Vec& dh_prev) {
    const std::size_t h = h_prev.size();
    Vec dzh(h), dgh(h), drh(h), dm(h);
    for (std::size_t i = 0; i < h; ++i) {
        const double dz_raw = dh[i] * (h_prev[i] - g[i]);
        const double dg_raw = dh[i] * (1.0 - z[i]);
        dh_prev[i] += dh[i] * z[i];
        const double dg_pre = dg_raw * (1.0 - g[i] * g[i]);
        dgh[i] = dg_pre;
        drh[i] = dg_pre * m[i] * r[i] * (1.0 - r[i]);
        dm[i] = dg_pre * r[i];
        dzh[i] = dz_raw * z[i] * (1.0 - z[i]);
    }
    for (std::size_t i = 0; i < h; ++i) {
        gw.bn[i] += dgh[i];
        gw.br[i] += drh[i];
        gw.bz[i] += dzh[i];
    }
    outer_acc(gw.wn, dgh.data(), x);
    matvec_transpose_acc(w.wn, dgh.data(), dx);
    outer_acc(gw.un, dm.data(), h_prev.data());
    matvec_transpose_acc(w.un, dm.data(), dh_prev.data());
    outer_acc(gw.wr, drh.data(), x);
    matvec_transpose_acc(w.wr, drh.data(), dx);
    outer_acc(gw.ur, drh.data(), h_prev.data());
    matvec_transpose_acc(w.ur, drh.data(), dh_prev.data());
    outer_acc(gw.wz, dzh.data(), x);
    matvec_transpose_acc(w.wz, dzh.data(), dx);
    outer_acc(gw.uz, dzh.data(), h_prev.data());
    matvec_transpose_acc(w.uz, dzh.data(), dh_prev.data());
}

void softmax_inplace(Vec& v) {
    const double mx = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double& x : v) {
        x = std::exp(x - mx);
        sum += x;
    }
    for (double& x : v) x /= sum;
}

}  // namespace

namespace {

void check_ids(const std::vector<TokenId>& ids, std::size_t vocab,
               const char* what) {
    if (ids.empty())
        fail(ErrorCode::invalid_argument,
             std::string(what) + " ids must be non-empty");
    for (TokenId id : ids)
        if (id < 0 || static_cast<std::size_t>(id) >= vocab)
            fail(ErrorCode::invalid_argument,
                 std::string(what) + " id " + std::to_string(id) +
                     " outside vocabulary of size " + std::to_string(vocab));
}

// Attention + one decoder step, shared by training forward and greedy
// decode. Returns the new state and fills the per-step activations.
struct DecStep {
    Vec q, alpha, ctx, z, r, g, m, s;
    Tensor2 tanh_rows;  // T x h
};

void decoder_step(const ModelParams& p, const std::vector<Vec>& enc_h,
                  const std::vector<Vec>& att_uh, const Vec& s_prev,
                  TokenId prev_id, DecStep& out) {
    const std::size_t h = p.h;
    const std::size_t big_t = enc_h.size();
    out.q.assign(h, 0.0);
    matvec_acc(p.att_w, s_prev.data(), out.q.data());
    out.tanh_rows = Tensor2(big_t, h);
    Vec scores(big_t);
    for (std::size_t j = 0; j < big_t; ++j) {
        double* row = out.tanh_rows.row(j);
        const Vec& uh = att_uh[j];
        double score = 0.0;
        for (std::size_t i = 0; i < h; ++i) {
            const double w = std::tanh(out.q[i] + uh[i]);
            row[i] = w;
            score += p.att_v[i] * w;
        }
        scores[j] = score;
    }
    softmax_inplace(scores);
    out.alpha = std::move(scores);
    out.ctx.assign(h, 0.0);
    for (std::size_t j = 0; j < big_t; ++j)
        axpy(out.ctx, out.alpha[j], enc_h[j]);
    // decoder GRU input: [embed(prev) ; ctx]
    Vec xi(p.d + h);
    const double* e = p.embed.row(static_cast<std::size_t>(prev_id));
    std::copy(e, e + p.d, xi.begin());
    std::copy(out.ctx.begin(), out.ctx.end(), xi.begin() + static_cast<std::ptrdiff_t>(p.d));
    gru_forward(p.dec, xi.data(), s_prev, out.z, out.r, out.g, out.m, out.s);
}

void output_logits(const ModelParams& p, const Vec& s, const Vec& ctx,
                   Vec& logits) {
    const std::size_t h = p.h;
    Vec concat(2 * h);
    std::copy(s.begin(), s.end(), concat.begin());
    std::copy(ctx.begin(), ctx.end(), concat.begin() + static_cast<std::ptrdiff_t>(h));
    logits.assign(p.out_b.begin(), p.out_b.end());
    matvec_acc(p.out_w, concat.data(), logits.data());
}

}  // namespace

ForwardResult forward(const ModelParams& params,
                      const std::vector<TokenId>& input_ids,
                      const std::vector<TokenId>& target_ids) {
    check_ids(input_ids, params.vocab, "input");
    check_ids(target_ids, params.vocab, "target");
    if (target_ids.back() != kEos)
        fail(ErrorCode::invalid_argument, "target must end with EOS");

    auto cache = std::make_unique<ForwardCache>();
    ForwardCache& c = *cache;
    c.input_ids = input_ids;
    c.target_ids = target_ids;

    const std::size_t big_t = input_ids.size();
    const std::size_t big_l = target_ids.size();
    const std::size_t h = params.h;

    c.enc_z.resize(big_t); c.enc_r.resize(big_t); c.enc_g.resize(big_t);
    c.enc_m.resize(big_t); c.enc_h.resize(big_t); c.att_uh.resize(big_t);
    Vec h_prev(h, 0.0);
    for (std::size_t t = 0; t < big_t; ++t) {
        const double* x =
            params.embed.row(static_cast<std::size_t>(input_ids[t]));
        gru_forward(params.enc, x, h_prev, c.enc_z[t], c.enc_r[t], c.enc_g[t],
                    c.enc_m[t], c.enc_h[t]);
        if (!all_finite(c.enc_h[t]))
            fail(ErrorCode::numeric, "non-finite activation at encoder step " +
                                         std::to_string(t));
        h_prev = c.enc_h[t];
        c.att_uh[t].assign(h, 0.0);
        matvec_acc(params.att_u, c.enc_h[t].data(), c.att_uh[t].data());
    }

    c.prev_ids.resize(big_l);
    c.dec_q.resize(big_l); c.dec_alpha.resize(big_l); c.dec_ctx.resize(big_l);
    c.dec_z.resize(big_l); c.dec_r.resize(big_l); c.dec_g.resize(big_l);
    c.dec_m.resize(big_l); c.dec_s.resize(big_l); c.dec_probs.resize(big_l);
    c.att_tanh.resize(big_l);

    Vec s_prev = c.enc_h.back();  // s_0 = last encoder state
    double loss = 0.0;
    DecStep step;
    for (std::size_t t = 0; t < big_l; ++t) {
        c.prev_ids[t] = t == 0 ? kBos : target_ids[t - 1];
        decoder_step(params, c.enc_h, c.att_uh, s_prev, c.prev_ids[t], step);
        if (!all_finite(step.s))
            fail(ErrorCode::numeric, "non-finite activation at decoder step " +
                                         std::to_string(t));
        Vec logits;
        output_logits(params, step.s, step.ctx, logits);
        softmax_inplace(logits);
        const double p_target =
            logits[static_cast<std::size_t>(target_ids[t])];
        loss -= std::log(p_target);
        c.dec_q[t] = std::move(step.q);
        c.dec_alpha[t] = std::move(step.alpha);
        c.dec_ctx[t] = std::move(step.ctx);
        c.dec_z[t] = std::move(step.z);
        c.dec_r[t] = std::move(step.r);
        c.dec_g[t] = std::move(step.g);
        c.dec_m[t] = std::move(step.m);
        c.dec_s[t] = std::move(step.s);
        c.att_tanh[t] = std::move(step.tanh_rows);
        c.dec_probs[t] = std::move(logits);
        s_prev = c.dec_s[t];
    }
    loss /= static_cast<double>(big_l);
    if (!std::isfinite(loss))
        fail(ErrorCode::numeric, "non-finite loss at output layer");

    ForwardResult result;
    result.loss = loss;
    result.cache = std::move(cache);
    return result;
}

void backward(const ModelParams& params, const ForwardCache& c,
              ModelParams& grads) {
    if (grads.vocab != params.vocab || grads.d != params.d ||
        grads.h != params.h)
        fail(ErrorCode::invalid_argument,
             "backward: gradient shapes do not match parameters");

    const std::size_t big_t = c.input_ids.size();
    const std::size_t big_l = c.target_ids.size();
    const std::size_t h = params.h;
    const std::size_t d = params.d;
    const double inv_l = 1.0 / static_cast<double>(big_l);

    std::vector<Vec> dh_enc(big_t, Vec(h, 0.0));   // grads into encoder states
    std::vector<Vec> du_acc(big_t, Vec(h, 0.0));   // grads into att_u * h_j
    Vec ds(h, 0.0);                                 // grad into s_t, carried

    const Vec h0(h, 0.0);
    for (std::size_t ti = big_l; ti-- > 0;) {
        const Vec& s_t = c.dec_s[ti];
        const Vec& ctx = c.dec_ctx[ti];
        const Vec& s_prev = ti == 0 ? c.enc_h.back() : c.dec_s[ti - 1];

        // output layer: dlogits = (softmax - onehot) / L
        Vec dlogits = c.dec_probs[ti];
        dlogits[static_cast<std::size_t>(c.target_ids[ti])] -= 1.0;
        for (double& v : dlogits) v *= inv_l;
        Vec concat(2 * h);
        std::copy(s_t.begin(), s_t.end(), concat.begin());
        std::copy(ctx.begin(), ctx.end(), concat.begin() + static_cast<std::ptrdiff_t>(h));
        outer_acc(grads.out_w, dlogits.data(), concat.data());
        for (std::size_t i = 0; i < params.vocab; ++i)
            grads.out_b[i] += dlogits[i];
        Vec dconcat(2 * h, 0.0);
        matvec_transpose_acc(params.out_w, dlogits.data(), dconcat.data());
        for (std::size_t i = 0; i < h; ++i) ds[i] += dconcat[i];
        Vec dctx(dconcat.begin() + static_cast<std::ptrdiff_t>(h), dconcat.end());

        // decoder GRU cell
        Vec xi(d + h);
        const double* e =
            params.embed.row(static_cast<std::size_t>(c.prev_ids[ti]));
        std::copy(e, e + d, xi.begin());
        std::copy(ctx.begin(), ctx.end(), xi.begin() + static_cast<std::ptrdiff_t>(d));
        Vec dxi(d + h, 0.0);
        Vec ds_prev(h, 0.0);
        gru_backward(params.dec, grads.dec, xi.data(), s_prev, c.dec_z[ti],
                     c.dec_r[ti], c.dec_g[ti], c.dec_m[ti], ds, dxi.data(),
                     ds_prev);
        double* de =
            grads.embed.row(static_cast<std::size_t>(c.prev_ids[ti]));
        for (std::size_t i = 0; i < d; ++i) de[i] += dxi[i];
        for (std::size_t i = 0; i < h; ++i) dctx[i] += dxi[d + i];

        // attention: ctx = sum_j alpha_j h_j, alpha = softmax(v . tanh(q + u_j))
        const Vec& alpha = c.dec_alpha[ti];
        const Tensor2& tanh_rows = c.att_tanh[ti];
        Vec dalpha(big_t, 0.0);
        for (std::size_t j = 0; j < big_t; ++j) {
            const Vec& hj = c.enc_h[j];
            double dot = 0.0;
            for (std::size_t i = 0; i < h; ++i) dot += dctx[i] * hj[i];
            dalpha[j] = dot;
            axpy(dh_enc[j], alpha[j], dctx);
        }
        double mix = 0.0;
        for (std::size_t j = 0; j < big_t; ++j) mix += alpha[j] * dalpha[j];
        Vec dq(h, 0.0);
        for (std::size_t j = 0; j < big_t; ++j) {
            const double dscore = alpha[j] * (dalpha[j] - mix);
            const double* w = tanh_rows.row(j);
            Vec& du = du_acc[j];
            for (std::size_t i = 0; i < h; ++i) {
                grads.att_v[i] += dscore * w[i];
                const double dpre =
                    dscore * params.att_v[i] * (1.0 - w[i] * w[i]);
                dq[i] += dpre;
                du[i] += dpre;
            }
        }
        outer_acc(grads.att_w, dq.data(), s_prev.data());
        matvec_transpose_acc(params.att_w, dq.data(), ds_prev.data());

        ds = std::move(ds_prev);
    }
    // s_0 is the last encoder state.
    for (std::size_t i = 0; i < h; ++i) dh_enc[big_t - 1][i] += ds[i];

    // fold the att_u path into the encoder state gradients
    for (std::size_t j = 0; j < big_t; ++j) {
        outer_acc(grads.att_u, du_acc[j].data(), c.enc_h[j].data());
        matvec_transpose_acc(params.att_u, du_acc[j].data(),
                             dh_enc[j].data());
    }

    // encoder BPTT
    Vec dh_carry(h, 0.0);
    for (std::size_t t = big_t; t-- > 0;) {
        Vec dh = dh_enc[t];
        for (std::size_t i = 0; i < h; ++i) dh[i] += dh_carry[i];
        const Vec& h_prev = t == 0 ? h0 : c.enc_h[t - 1];
        const double* x =
            params.embed.row(static_cast<std::size_t>(c.input_ids[t]));
        Vec dx(d, 0.0);
        dh_carry.assign(h, 0.0);
        gru_backward(params.enc, grads.enc, x, h_prev, c.enc_z[t], c.enc_r[t],
                     c.enc_g[t], c.enc_m[t], dh, dx.data(), dh_carry);
        double* de =
            grads.embed.row(static_cast<std::size_t>(c.input_ids[t]));
        for (std::size_t i = 0; i < d; ++i) de[i] += dx[i];
    }
}

void adam_step(ModelParams& params, ModelParams& grads, AdamState& state,
               const TrainConfig& config) {
    auto pviews = param_views(params);
    auto gviews = param_views(grads);
    double norm_sq = 0.0;
    for (const ParamView& g : gviews)
        for (std::size_t i = 0; i < g.size; ++i) norm_sq += g.data[i] * g.data[i];
    if (!std::isfinite(norm_sq))
        fail(ErrorCode::numeric, "adam_step: non-finite gradient");
    const double norm = std::sqrt(norm_sq);
    double scale = 1.0;
    if (config.gradient_clip_norm > 0.0 && norm > config.gradient_clip_norm)
        scale = config.gradient_clip_norm / norm;

    state.t += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
    for (std::size_t k = 0; k < pviews.size(); ++k) {
        double* p = pviews[k].data;
        const double* g = gviews[k].data;
        Vec& m = state.m[k];
        Vec& v = state.v[k];
        for (std::size_t i = 0; i < pviews[k].size; ++i) {
            const double gi = g[i] * scale;
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * gi;
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * gi * gi;
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
    }
}

PredictOutcome predict(const ModelParams& params, const std::string& phrase,
                       const ContextWindow* window, const Vocab& vocab,
                       const TrainConfig& config) {
    const std::u32string phrase_cps = utf8_decode(phrase);
    if (phrase_cps.empty() && window == nullptr) return {"", false};

    const EncodedExample ex =
        encode_example(phrase, "", window, vocab, config.fixed_input_len);
    const std::size_t big_t = ex.input_ids.size();
    const std::size_t h = params.h;

    std::vector<Vec> enc_h(big_t), att_uh(big_t);
    Vec z, r, g, m;
    Vec h_prev(h, 0.0);
    for (std::size_t t = 0; t < big_t; ++t) {
        const double* x =
            params.embed.row(static_cast<std::size_t>(ex.input_ids[t]));
        gru_forward(params.enc, x, h_prev, z, r, g, m, enc_h[t]);
        h_prev = enc_h[t];
        att_uh[t].assign(h, 0.0);
        matvec_acc(params.att_u, enc_h[t].data(), att_uh[t].data());
    }

    const std::size_t cap =
        static_cast<std::size_t>(config.max_decode_len_factor *
                                 static_cast<double>(phrase_cps.size())) +
        8;
    std::vector<TokenId> out_ids;
    Vec s_prev = enc_h.back();
    TokenId prev = kBos;
    DecStep step;
    bool truncated = true;
    for (std::size_t t = 0; t < cap; ++t) {
        decoder_step(params, enc_h, att_uh, s_prev, prev, step);
        Vec logits;
        output_logits(params, step.s, step.ctx, logits);
        const TokenId best = static_cast<TokenId>(
            std::max_element(logits.begin(), logits.end()) - logits.begin());
        if (best == kEos) {
            truncated = false;
            break;
        }
        out_ids.push_back(best);
        prev = best;
        s_prev = step.s;
    }
    return {decode_ids(out_ids, vocab), truncated};
}

namespace {

struct PreparedSample {
    std::string phrase;
    std::string lemma;
    ContextWindow window;  // extracted at max_span, truncated per epoch
};

std::vector<PreparedSample> prepare_samples(const Corpus& corpus,
                                            std::size_t max_span) {
    std::vector<PreparedSample> out;
    out.reserve(corpus.samples.size());
    for (const LemmaSample& s : corpus.samples) {
        PreparedSample ps;
        ps.phrase = s.orthographic;
        ps.lemma = s.lemma;
        ps.window = extract_context(corpus.document_of(s), s, max_span);
        out.push_back(std::move(ps));
    }
    return out;
}

}  // namespace

TrainResult train(const Corpus& train_corpus, const Corpus& dev_corpus,
                  const Vocab& vocab, const ContextPolicy& policy,
                  const TrainConfig& config) {
    config.validate();
    policy.validate(config.max_span);
    if (train_corpus.samples.empty())
        fail(ErrorCode::invalid_argument, "train corpus has no samples");
    if (dev_corpus.samples.empty())
        fail(ErrorCode::invalid_argument, "dev corpus has no samples");

    const auto train_samples = prepare_samples(train_corpus, config.max_span);
    const auto dev_samples = prepare_samples(dev_corpus, config.max_span);

    ModelParams params =
        init_params(vocab.size(), config.d, config.h, config.seed);
    ModelParams grads = ModelParams::zeros(vocab.size(), config.d, config.h);
    AdamState adam = AdamState::zeros_like(params);

    SplitMix64 root(config.seed);
    SplitMix64 shuffle_rng = root.derive(1);
    SplitMix64 policy_rng = root.derive(2);
    const std::uint64_t dev_seed = root.derive(3).next_u64();

    TrainResult result;
    double best_score = -1.0;

    std::vector<std::size_t> order(train_samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t in_batch = 0;
        std::size_t step_no = 0;
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const PreparedSample& ps = train_samples[order[pos]];
            const auto k = sample_context_length(policy, policy_rng);
            EncodedExample ex;
            if (k) {
                const ContextWindow w = truncate_window(ps.window, *k);
                ex = encode_example(ps.phrase, ps.lemma, &w, vocab,
                                    config.fixed_input_len);
            } else {
                ex = encode_example(ps.phrase, ps.lemma, nullptr, vocab,
                                    config.fixed_input_len);
            }
            ForwardResult fwd;
            try {
                fwd = forward(params, ex.input_ids, ex.target_ids);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::numeric)
                    fail(ErrorCode::numeric,
                         "training diverged at epoch " + std::to_string(epoch) +
                             ", step " + std::to_string(pos) + ": " + e.what());
                throw;
            }
            loss_sum += fwd.loss;
            backward(params, *fwd.cache, grads);
            ++in_batch;
            const bool flush =
                in_batch == config.batch_size || pos + 1 == order.size();
            if (flush) {
                const double inv = 1.0 / static_cast<double>(in_batch);
                for (ParamView& g : param_views(grads))
                    for (std::size_t i = 0; i < g.size; ++i) g.data[i] *= inv;
                adam_step(params, grads, adam, config);
                for (ParamView& g : param_views(grads))
                    std::fill(g.data, g.data + g.size, 0.0);
                in_batch = 0;
                ++step_no;
            }
        }

        // Dev evaluation with a fixed stream so context draws are identical
        // across epochs and model selection is consistent.
        SplitMix64 dev_rng(dev_seed);
        std::vector<std::pair<std::string, std::string>> pairs;
        pairs.reserve(dev_samples.size());
        for (const PreparedSample& ps : dev_samples) {
            const auto k = sample_context_length(policy, dev_rng);
            PredictOutcome out;
            if (k) {
                const ContextWindow w = truncate_window(ps.window, *k);
                out = predict(params, ps.phrase, &w, vocab, config);
            } else {
                out = predict(params, ps.phrase, nullptr, vocab, config);
            }
            pairs.emplace_back(out.text, ps.lemma);
        }
        EpochLog log;
        log.epoch = epoch;
        log.train_loss = loss_sum / static_cast<double>(order.size());
        log.dev = evaluate(pairs);
        result.log.push_back(log);
        if (log.dev.score > best_score) {
            best_score = log.dev.score;
            result.params = params;
            result.best_epoch = epoch;
        }
    }
    return result;
}

// ---- checkpoint io -----------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'L', 'M', 'K', 'C'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::string& in, std::size_t& pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(
                 static_cast<unsigned char>(in[pos + static_cast<std::size_t>(i)]))
             << (8 * i);
    pos += 4;
    return v;
}

std::uint64_t get_u64(const std::string& in, std::size_t& pos) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(
                 static_cast<unsigned char>(in[pos + static_cast<std::size_t>(i)]))
             << (8 * i);
    pos += 8;
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params,
                     std::uint64_t vocab_hash) {
    std::string out;
    out.append(kMagic, 4);
    put_u32(out, kFormatVersion);
    put_u64(out, vocab_hash);
    put_u32(out, static_cast<std::uint32_t>(params.vocab));
    put_u32(out, static_cast<std::uint32_t>(params.d));
    put_u32(out, static_cast<std::uint32_t>(params.h));
    ModelParams& mutable_params = const_cast<ModelParams&>(params);
    for (const ParamView& view : param_views(mutable_params))
        for (std::size_t i = 0; i < view.size; ++i)
            put_u64(out, std::bit_cast<std::uint64_t>(view.data[i]));
    write_file(path, out);
}

Checkpoint load_checkpoint(const std::string& path) {
    const std::string in = read_file(path);
    if (in.size() < 28 || std::memcmp(in.data(), kMagic, 4) != 0)
        fail(ErrorCode::parse, "not a checkpoint file: " + path);
    std::size_t pos = 4;
    const std::uint32_t version = get_u32(in, pos);
    if (version != kFormatVersion)
        fail(ErrorCode::parse, "unsupported checkpoint version " +
                                   std::to_string(version) + " in " + path);
    Checkpoint ckpt;
    ckpt.vocab_hash = get_u64(in, pos);
    const std::uint32_t vocab = get_u32(in, pos);
    const std::uint32_t d = get_u32(in, pos);
    const std::uint32_t h = get_u32(in, pos);
    ckpt.params = ModelParams::zeros(vocab, d, h);
    std::size_t need = 0;
    auto views = param_views(ckpt.params);
    for (const ParamView& view : views) need += view.size;
    if (in.size() != pos + need * 8)
        fail(ErrorCode::parse, "checkpoint size mismatch in " + path);
    for (ParamView& view : views)
        for (std::size_t i = 0; i < view.size; ++i)
            view.data[i] = std::bit_cast<double>(get_u64(in, pos));
    return ckpt;
}

}  // namespace lemkit
